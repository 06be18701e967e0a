#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "desat/channel.hpp"
#include "desat/declip.hpp"
#include "desat/kernel.hpp"
#include "desat/ofdm.hpp"

namespace desat {

inline constexpr double kNoiseless = std::numeric_limits<double>::infinity();

// ADC model: mid-tread quantizer plus additive noise trimmed so the combined
// SINAD lands at the target (half-bit effective resolutions cannot be hit by
// level count alone).
struct AdcConfig {
  int bits = 7;
  double sinad_db = 41.0;
};

// Full description of one simulated link.
struct ExperimentConfig {
  OfdmConfig ofdm;
  WindowConfig window;
  std::optional<BandSpec> band;  // empty: lowpass band derived from the carriers
  double cr_target = 1.31;
  double snr_db = kNoiseless;
  std::optional<ChannelResponse> channel;
  double sample_rate_hz = 1.0;
  std::optional<AdcConfig> adc;  // wireline mode only
  bool use_tables = true;

  void validate() const;
  // Derived default: lowpass over exactly the occupied carrier support,
  // capped at Nyquist.
  BandSpec resolved_band() const;
};

// Named configurations for the shipped experiments.
ExperimentConfig preset(const std::string& name);
std::vector<std::string> preset_names();

// Scalar snapshot of the configuration a trial ran under.
struct ConfigSummary {
  std::string mode;
  int n_taps = 0;
  int active_carriers = 0;
  int qam_order = 0;
  int cp_len = 0;
  bool dc_zeroed = false;
  int window_n = 0;
  int margin = 0;
  double epsilon = 0.0;  // resolved value
  double band_lo = 0.0;
  double band_hi = 0.0;
  double cr_target = 0.0;
  double snr_db = 0.0;
  int adc_bits = 0;  // 0 = no ADC
};

struct TrialResult {
  std::uint64_t seed = 0;
  ConfigSummary config;
  long tx_bits = 0;
  long errors_saturated = 0;
  long errors_declipped = 0;
  long errors_baseline = 0;
  double ber_saturated = 0.0;
  double ber_declipped = 0.0;
  double ber_baseline = 0.0;
  double gamma = 0.0;
  double achieved_cr = 0.0;
  double papr_original = 0.0;
  double papr_saturated = 0.0;
  int saturated_samples = 0;
  int max_clipped_per_channel = 0;
  int declip_skipped = 0;
  int declip_solver_failures = 0;
  int declip_dense_failures = 0;
  int declip_unsolvable = 0;  // windows with rho above kSolvableRhoMax

  // Every saturated sample received an estimate.
  bool declip_clean() const {
    return declip_skipped == 0 && declip_dense_failures == 0;
  }

  // Every saturated sample received an estimate from a well-posed window.
  bool declip_solvable() const { return declip_clean() && declip_unsolvable == 0; }
};

// Optional per-trial dump for plotting: time traces per real channel and the
// received constellation under each receive path.
struct TrialCapture {
  std::vector<std::string> channel_names;        // {"i","q"} or {"s"}
  std::vector<std::vector<double>> original;     // clipper input
  std::vector<std::vector<double>> saturated;
  std::vector<std::vector<double>> declipped;
  std::vector<int> carriers;  // data carriers, decode order
  ComplexVec tx_points;
  ComplexVec rx_baseline;
  ComplexVec rx_saturated;
  ComplexVec rx_declipped;
};

double ber(std::span<const int> tx_bits, std::span<const int> rx_bits);

// 95% (by default) Wilson score interval for errors/bits.
std::pair<double, double> wilson_interval(long errors, long bits,
                                          double z = 1.959963984540054);

// One seeded trial: identical bits and noise feed three receive paths
// (unclipped baseline, clipped-uncorrected, clipped-then-declipped).
// Dense-saturation failures are recorded in the result, never thrown.
TrialResult run_trial(const ExperimentConfig& config, std::uint64_t seed,
                      const InverseTable* table = nullptr, TrialCapture* capture = nullptr);
TrialResult run_trial(ExperimentConfig config, double cr_target, int window_n, double snr_db,
                      std::uint64_t seed);

enum class SweepAxis { CrTarget, WindowN, SnrDb };
std::string axis_name(SweepAxis axis);

struct SweepSpec {
  ExperimentConfig base;
  SweepAxis axis = SweepAxis::CrTarget;
  std::vector<double> values;
  long trials = 10000;
  std::uint64_t base_seed = 1;
  int workers = 1;

  void validate() const;
};

struct SweepRow {
  std::string axis;
  double value = 0.0;
  long trials = 0;
  double ber_sat = 0.0;
  double ber_declip = 0.0;
  double ber_base = 0.0;
  double ci_lo = 0.0;  // Wilson bounds on the pooled declipped BER
  double ci_hi = 0.0;
  long errors_sat = 0;
  long errors_declip = 0;
  long errors_base = 0;
  long bits = 0;
  double mean_achieved_cr = 0.0;
  long incomplete_trials = 0;         // trials with skipped or failed windows
  std::vector<long> clipped_hist;     // index = saturated samples in the trial
};

// Trial i of point j draws seed derive_seed(base_seed, j, i); workers change
// wall time only, never the aggregate. Rows stream through on_row as points
// complete.
std::vector<SweepRow> sweep(const SweepSpec& spec,
                            const std::function<void(const SweepRow&)>& on_row = {});

// Deterministic artifact writers (no timestamps, fixed formatting).
void write_results_jsonl(const std::filesystem::path& path,
                         std::span<const TrialResult> results);
void write_sweep_csv(const std::filesystem::path& path, std::span<const SweepRow> rows);
void write_clipped_hist_csv(const std::filesystem::path& path, std::span<const SweepRow> rows);
void write_constellation_csv(const std::filesystem::path& path, const TrialCapture& capture);
void write_trace_csv(const std::filesystem::path& path, const TrialCapture& capture);

// trials.jsonl + constellation.csv + trace.csv under dir.
void emit_artifacts(const std::filesystem::path& dir, std::span<const TrialResult> results,
                    const TrialCapture* capture);

}  // namespace desat
