#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "desat/channel.hpp"
#include "desat/declip.hpp"

namespace desat {

// Input-file syntax error carrying a 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Shortest decimal form that parses back to the same double;
// locale-independent.
std::string format_double(double v);

// Sample-stream CSV with header `index,location,value,flag`; flag is one of
// ok, lo, hi (est marks estimates on output and is rejected on input).
SaturatedStream read_stream_csv(std::istream& in);
SaturatedStream read_stream_csv(const std::filesystem::path& path);
void write_stream_csv(std::ostream& out, const SaturatedStream& stream);
void write_stream_csv(const std::filesystem::path& path, const SaturatedStream& stream);

// Declip output: input rows with estimated values substituted and their flag
// switched to est; skipped saturated rows pass through untouched.
void write_declipped_csv(std::ostream& out, const SaturatedStream& input,
                         const DeclipReport& report);
void write_declipped_csv(const std::filesystem::path& path, const SaturatedStream& input,
                         const DeclipReport& report);

// Channel-response CSV with header `freq_hz,mag_db` or
// `freq_hz,mag_db,phase_rad`.
ChannelResponse read_channel_csv(std::istream& in);
ChannelResponse read_channel_csv(const std::filesystem::path& path);
void write_channel_csv(std::ostream& out, const ChannelResponse& response);
void write_channel_csv(const std::filesystem::path& path, const ChannelResponse& response);

// Lookup-table files use full-precision decimals, so a save/load round trip
// reproduces every matrix bit for bit.
void save_inverse_table(std::ostream& out, const InverseTable& table);
void save_inverse_table(const std::filesystem::path& path, const InverseTable& table);
InverseTable load_inverse_table(std::istream& in);
InverseTable load_inverse_table(const std::filesystem::path& path);

}  // namespace desat
