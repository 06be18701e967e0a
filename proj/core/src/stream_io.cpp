#include "desat/stream_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace desat {

namespace {

std::string trimmed(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) {
    return {};
  }
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(trimmed(line.substr(start)));
      break;
    }
    out.push_back(trimmed(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

double parse_double(const std::string& field, std::size_t line, const char* what) {
  double v = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end) {
    throw ParseError(line, std::string("cannot parse ") + what + " '" + field + "'");
  }
  return v;
}

long parse_long(const std::string& field, std::size_t line, const char* what) {
  long v = 0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end) {
    throw ParseError(line, std::string("cannot parse ") + what + " '" + field + "'");
  }
  return v;
}

const char* flag_name(SampleFlag f) {
  switch (f) {
    case SampleFlag::Ok:
      return "ok";
    case SampleFlag::ClippedLow:
      return "lo";
    case SampleFlag::ClippedHigh:
      return "hi";
    case SampleFlag::Estimated:
      return "est";
  }
  return "?";
}

template <typename Emit>
void write_rows(std::ostream& out, const SaturatedStream& stream, Emit&& emit) {
  out << "index,location,value,flag\n";
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const auto [value, flag] = emit(i);
    out << i << ',' << format_double(stream.locations[i]) << ',' << format_double(value) << ','
        << flag_name(flag) << '\n';
  }
}

std::ofstream checked_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  return out;
}

std::ifstream checked_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string() + " for reading");
  }
  return in;
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) {
    throw std::runtime_error("format_double failed");
  }
  return std::string(buf.data(), ptr);
}

SaturatedStream read_stream_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError(1, "missing header");
  }
  if (trimmed(line) != "index,location,value,flag") {
    throw ParseError(1, "expected header 'index,location,value,flag'");
  }
  SaturatedStream stream;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trimmed(line).empty()) {
      continue;
    }
    const auto fields = split_fields(line);
    if (fields.size() != 4) {
      throw ParseError(line_no, "expected 4 fields, got " + std::to_string(fields.size()));
    }
    parse_long(fields[0], line_no, "index");
    stream.locations.push_back(parse_double(fields[1], line_no, "location"));
    stream.values.push_back(parse_double(fields[2], line_no, "value"));
    if (fields[3] == "ok") {
      stream.flags.push_back(SampleFlag::Ok);
    } else if (fields[3] == "lo") {
      stream.flags.push_back(SampleFlag::ClippedLow);
    } else if (fields[3] == "hi") {
      stream.flags.push_back(SampleFlag::ClippedHigh);
    } else if (fields[3] == "est") {
      throw ParseError(line_no, "flag 'est' marks outputs and cannot be declip input");
    } else {
      throw ParseError(line_no, "unknown flag '" + fields[3] + "' (expected ok, lo or hi)");
    }
  }
  stream.validate();
  return stream;
}

SaturatedStream read_stream_csv(const std::filesystem::path& path) {
  auto in = checked_in(path);
  return read_stream_csv(in);
}

void write_stream_csv(std::ostream& out, const SaturatedStream& stream) {
  write_rows(out, stream,
             [&](std::size_t i) { return std::pair(stream.values[i], stream.flags[i]); });
}

void write_stream_csv(const std::filesystem::path& path, const SaturatedStream& stream) {
  auto out = checked_out(path);
  write_stream_csv(out, stream);
}

void write_declipped_csv(std::ostream& out, const SaturatedStream& input,
                         const DeclipReport& report) {
  std::vector<double> values = apply_estimates(input, report);
  std::vector<bool> estimated(input.size(), false);
  for (const DeclipEstimate& e : report.estimates) {
    estimated.at(e.sample_index) = true;
  }
  write_rows(out, input, [&](std::size_t i) {
    return std::pair(values[i], estimated[i] ? SampleFlag::Estimated : input.flags[i]);
  });
}

void write_declipped_csv(const std::filesystem::path& path, const SaturatedStream& input,
                         const DeclipReport& report) {
  auto out = checked_out(path);
  write_declipped_csv(out, input, report);
}

ChannelResponse read_channel_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError(1, "missing header");
  }
  const std::string header = trimmed(line);
  bool with_phase = false;
  if (header == "freq_hz,mag_db,phase_rad") {
    with_phase = true;
  } else if (header != "freq_hz,mag_db") {
    throw ParseError(1, "expected header 'freq_hz,mag_db[,phase_rad]'");
  }
  ChannelResponse response;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trimmed(line).empty()) {
      continue;
    }
    const auto fields = split_fields(line);
    const std::size_t expected = with_phase ? 3 : 2;
    if (fields.size() != expected) {
      throw ParseError(line_no, "expected " + std::to_string(expected) + " fields, got " +
                                    std::to_string(fields.size()));
    }
    response.freq_hz.push_back(parse_double(fields[0], line_no, "freq_hz"));
    response.mag_db.push_back(parse_double(fields[1], line_no, "mag_db"));
    if (with_phase) {
      response.phase_rad.push_back(parse_double(fields[2], line_no, "phase_rad"));
    }
  }
  response.validate();
  return response;
}

ChannelResponse read_channel_csv(const std::filesystem::path& path) {
  auto in = checked_in(path);
  return read_channel_csv(in);
}

void write_channel_csv(std::ostream& out, const ChannelResponse& response) {
  const bool with_phase = !response.phase_rad.empty();
  out << (with_phase ? "freq_hz,mag_db,phase_rad" : "freq_hz,mag_db") << '\n';
  for (std::size_t i = 0; i < response.freq_hz.size(); ++i) {
    out << format_double(response.freq_hz[i]) << ',' << format_double(response.mag_db[i]);
    if (with_phase) {
      out << ',' << format_double(response.phase_rad[i]);
    }
    out << '\n';
  }
}

void write_channel_csv(const std::filesystem::path& path, const ChannelResponse& response) {
  auto out = checked_out(path);
  write_channel_csv(out, response);
}

void save_inverse_table(std::ostream& out, const InverseTable& table) {
  out << "desat-table v1\n";
  out << "band " << format_double(table.band.omega0()) << ' '
      << format_double(table.band.omega1()) << '\n';
  out << "window_n " << table.window_n << '\n';
  out << "epsilon " << format_double(table.epsilon) << '\n';
  out << "entries " << table.entries.size() << '\n';
  for (const auto& [pattern, entry] : table.entries) {
    out << "pattern";
    for (int o : pattern) {
      out << ' ' << o;
    }
    out << '\n';
    out << "cond " << format_double(entry.cond) << '\n';
    for (Eigen::Index r = 0; r < entry.inverse.rows(); ++r) {
      for (Eigen::Index c = 0; c < entry.inverse.cols(); ++c) {
        out << (c == 0 ? "" : " ") << format_double(entry.inverse(r, c));
      }
      out << '\n';
    }
  }
}

void save_inverse_table(const std::filesystem::path& path, const InverseTable& table) {
  auto out = checked_out(path);
  save_inverse_table(out, table);
}

namespace {

void expect_word(std::istream& in, const char* word) {
  std::string tok;
  if (!(in >> tok) || tok != word) {
    throw std::runtime_error(std::string("inverse-table file: expected '") + word + "', got '" +
                             tok + "'");
  }
}

}  // namespace

InverseTable load_inverse_table(std::istream& in) {
  std::string magic;
  std::string version;
  if (!(in >> magic >> version) || magic != "desat-table" || version != "v1") {
    throw std::runtime_error("inverse-table file: bad magic (expected 'desat-table v1')");
  }
  expect_word(in, "band");
  double w0 = 0.0;
  double w1 = 0.0;
  if (!(in >> w0 >> w1)) {
    throw std::runtime_error("inverse-table file: bad band line");
  }
  expect_word(in, "window_n");
  int n = 0;
  if (!(in >> n) || n < 1) {
    throw std::runtime_error("inverse-table file: bad window_n");
  }
  expect_word(in, "epsilon");
  double eps = 0.0;
  if (!(in >> eps)) {
    throw std::runtime_error("inverse-table file: bad epsilon");
  }
  expect_word(in, "entries");
  std::size_t count = 0;
  if (!(in >> count)) {
    throw std::runtime_error("inverse-table file: bad entry count");
  }
  InverseTable table{BandSpec(w0, w1), n, eps, {}};
  for (std::size_t e = 0; e < count; ++e) {
    expect_word(in, "pattern");
    std::vector<int> pattern(static_cast<std::size_t>(n));
    for (int& o : pattern) {
      if (!(in >> o)) {
        throw std::runtime_error("inverse-table file: truncated pattern");
      }
    }
    expect_word(in, "cond");
    InverseTable::Entry entry;
    if (!(in >> entry.cond)) {
      throw std::runtime_error("inverse-table file: bad cond value");
    }
    entry.inverse.resize(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < n; ++c) {
        if (!(in >> entry.inverse(r, c))) {
          throw std::runtime_error("inverse-table file: truncated matrix");
        }
      }
    }
    table.entries.emplace(std::move(pattern), std::move(entry));
  }
  return table;
}

InverseTable load_inverse_table(const std::filesystem::path& path) {
  auto in = checked_in(path);
  return load_inverse_table(in);
}

}  // namespace desat
