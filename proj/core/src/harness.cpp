#include "desat/harness.hpp"

#include <atomic>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "desat/rng.hpp"
#include "desat/stream_io.hpp"

namespace desat {

namespace {

constexpr std::uint64_t kBitStream = 0x0B;
constexpr std::uint64_t kSnrNoiseStream = 0x0A;
constexpr std::uint64_t kTrimNoiseStream = 0x0C;

double mean_power(const std::vector<double>& x) {
  double acc = 0.0;
  for (double v : x) {
    acc += v * v;
  }
  return x.empty() ? 0.0 : acc / static_cast<double>(x.size());
}

std::vector<double> concat(const std::vector<std::vector<double>>& channels) {
  std::vector<double> out;
  std::size_t total = 0;
  for (const auto& c : channels) {
    total += c.size();
  }
  out.reserve(total);
  for (const auto& c : channels) {
    out.insert(out.end(), c.begin(), c.end());
  }
  return out;
}

long hamming(std::span<const int> a, std::span<const int> b) {
  long d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d += a[i] != b[i] ? 1 : 0;
  }
  return d;
}

std::vector<double> quantize_unbounded(std::vector<double> x, double step) {
  for (double& v : x) {
    v = std::round(v / step) * step;
  }
  return x;
}

// One OFDM symbol is one period of a harmonic sum (the prefix is a copy of
// the core's tail), so the receiver may tile it periodically before
// declipping. Symbol-edge samples then see the same two-sided neighborhoods
// as interior ones instead of truncated windows, which otherwise dominate the
// reconstruction error. Estimates are read back for the real range only;
// skipped counts are likewise restricted to it.
DeclipReport declip_symbol(const SaturatedStream& stream, int core_len, const BandSpec& band,
                           const WindowConfig& window, const InverseTable* table) {
  const int len = static_cast<int>(stream.size());
  const int cp = len - core_len;
  const int pad = window.window_n + window.margin;
  SaturatedStream ext;
  ext.locations.reserve(static_cast<std::size_t>(len + 2 * pad));
  ext.values.reserve(ext.locations.capacity());
  ext.flags.reserve(ext.locations.capacity());
  for (int m = -pad; m < len + pad; ++m) {
    int src = m;
    if (src < 0 || src >= len) {
      src = cp + (((src - cp) % core_len) + core_len) % core_len;
    }
    ext.locations.push_back(m);
    ext.values.push_back(stream.values[static_cast<std::size_t>(src)]);
    ext.flags.push_back(stream.flags[static_cast<std::size_t>(src)]);
  }

  DeclipReport tiled = declip_stream(ext, band, window, table);

  DeclipReport report = tiled;
  report.estimates.clear();
  report.unsolvable_windows = 0;
  std::vector<char> estimated(ext.size(), 0);
  for (const DeclipEstimate& e : tiled.estimates) {
    estimated[e.sample_index] = 1;
    const auto real_index = static_cast<long>(e.sample_index) - pad;
    if (real_index >= 0 && real_index < len) {
      DeclipEstimate kept = e;
      kept.sample_index = static_cast<std::size_t>(real_index);
      kept.location = stream.locations[kept.sample_index];
      if (kept.rho > kSolvableRhoMax) {
        ++report.unsolvable_windows;
      }
      report.estimates.push_back(kept);
    }
  }
  report.skipped = 0;
  for (int m = 0; m < len; ++m) {
    const auto ext_index = static_cast<std::size_t>(m + pad);
    if (ext.flags[ext_index] != SampleFlag::Ok && estimated[ext_index] == 0) {
      ++report.skipped;
    }
  }
  return report;
}

SymbolFrame receive_frame(const std::vector<std::vector<double>>& channels,
                          const ExperimentConfig& cfg) {
  SymbolFrame f = channels.size() == 2 ? demodulate(merge_iq(channels[0], channels[1]), cfg.ofdm)
                                       : demodulate(channels[0], cfg.ofdm);
  if (cfg.channel.has_value()) {
    f = equalize(std::move(f), *cfg.channel, cfg.ofdm, cfg.sample_rate_hz);
  }
  return f;
}

ComplexVec data_points(const SymbolFrame& frame, const OfdmConfig& ofdm) {
  ComplexVec out;
  for (int c : ofdm.data_carriers()) {
    out.push_back(frame.symbols[static_cast<std::size_t>(c)]);
  }
  return out;
}

ConfigSummary summarize(const ExperimentConfig& cfg, const BandSpec& band) {
  ConfigSummary s;
  s.mode = cfg.ofdm.mode == OfdmMode::Wireless ? "wireless" : "wireline";
  s.n_taps = cfg.ofdm.n_taps;
  s.active_carriers = static_cast<int>(cfg.ofdm.active_carriers.size());
  s.qam_order = cfg.ofdm.qam_order;
  s.cp_len = cfg.ofdm.cp_len;
  s.dc_zeroed = cfg.ofdm.dc_zeroed;
  s.window_n = cfg.window.window_n;
  s.margin = cfg.window.margin;
  s.epsilon = cfg.window.epsilon.value_or(1e-8 * band.peak());
  s.band_lo = band.omega0();
  s.band_hi = band.omega1();
  s.cr_target = cfg.cr_target;
  s.snr_db = cfg.snr_db;
  s.adc_bits = cfg.adc.has_value() ? cfg.adc->bits : 0;
  return s;
}

std::vector<int> carrier_range(int lo, int hi) {
  std::vector<int> out;
  for (int c = lo; c <= hi; ++c) {
    out.push_back(c);
  }
  return out;
}

std::vector<int> join_ranges(std::vector<int> a, const std::vector<int>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

void ExperimentConfig::validate() const {
  ofdm.validate();
  window.validate();
  if (!(std::isfinite(cr_target) && cr_target > 0.0)) {
    throw std::invalid_argument("ExperimentConfig: cr_target must be positive");
  }
  if (std::isnan(snr_db) || snr_db == -std::numeric_limits<double>::infinity()) {
    throw std::invalid_argument("ExperimentConfig: snr_db must be finite or +infinity");
  }
  if (channel.has_value()) {
    channel->validate();
    if (!(sample_rate_hz > 0.0)) {
      throw std::invalid_argument("ExperimentConfig: channel requires a positive sample rate");
    }
  }
  if (adc.has_value()) {
    if (ofdm.mode != OfdmMode::Wireline) {
      throw std::invalid_argument("ExperimentConfig: the ADC model applies to wireline mode");
    }
    if (adc->bits < 2 || adc->bits > 30) {
      throw std::invalid_argument("ExperimentConfig: adc bits must lie in [2, 30]");
    }
    if (!(std::isfinite(adc->sinad_db) && adc->sinad_db > 0.0)) {
      throw std::invalid_argument("ExperimentConfig: adc sinad_db must be positive");
    }
  }
}

BandSpec ExperimentConfig::resolved_band() const {
  if (band.has_value()) {
    return *band;
  }
  int k_max = 0;
  for (int c : ofdm.active_carriers) {
    k_max = std::max(k_max, std::min(c, ofdm.n_taps - c));
  }
  // The band hugs the widest active carrier exactly; widening it beyond the
  // occupied support measurably degrades reconstruction of clipped clusters.
  const double w1 = std::min(std::numbers::pi, static_cast<double>(k_max) * 2.0 *
                                                   std::numbers::pi /
                                                   static_cast<double>(ofdm.n_taps));
  return BandSpec(0.0, w1);
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig cfg;
  const double bin = 2.0 * std::numbers::pi / 32.0;
  if (name == "ideal-case") {
    cfg.ofdm.mode = OfdmMode::Wireless;
    cfg.ofdm.active_carriers = join_ranges(carrier_range(1, 8), carrier_range(24, 31));
    cfg.ofdm.dc_zeroed = true;
    cfg.window.window_n = 8;
    cfg.window.margin = 8;
    cfg.window.epsilon = 0.0;
    cfg.cr_target = 1.0;
    cfg.band = BandSpec(bin, 8.0 * bin);
  } else if (name == "quality-wireless") {
    cfg.ofdm.mode = OfdmMode::Wireless;
    cfg.ofdm.active_carriers = join_ranges(carrier_range(1, 8), carrier_range(24, 31));
    cfg.ofdm.dc_zeroed = true;
    cfg.window.window_n = 10;
    cfg.window.margin = 10;
    cfg.cr_target = 1.31;
  } else if (name == "quality-wireline") {
    cfg.ofdm.mode = OfdmMode::Wireline;
    cfg.ofdm.active_carriers = join_ranges(carrier_range(1, 8), carrier_range(24, 31));
    cfg.ofdm.dc_zeroed = true;
    cfg.window.window_n = 10;
    cfg.window.margin = 10;
    cfg.cr_target = 1.66;
  } else if (name == "robustness") {
    cfg.ofdm.mode = OfdmMode::Wireless;
    cfg.ofdm.active_carriers = join_ranges(carrier_range(1, 8), carrier_range(24, 31));
    cfg.ofdm.dc_zeroed = true;
    cfg.window.window_n = 8;
    cfg.window.margin = 8;
    cfg.cr_target = 1.31;
    cfg.snr_db = 20.0;
  } else if (name == "wireline-link") {
    cfg.ofdm.mode = OfdmMode::Wireline;
    cfg.ofdm.active_carriers = join_ranges(carrier_range(0, 6), carrier_range(26, 31));
    cfg.ofdm.dc_zeroed = false;
    cfg.ofdm.cp_len = 4;
    cfg.window.window_n = 8;
    cfg.window.margin = 8;
    cfg.cr_target = 2.03;
    cfg.sample_rate_hz = 24e9;
    cfg.channel = ChannelResponse::calibrated_loss(11.0, 4.5e9, 12e9);
    cfg.adc = AdcConfig{7, 41.0};
  } else {
    std::string names;
    for (const auto& n : preset_names()) {
      names += names.empty() ? n : ", " + n;
    }
    throw std::invalid_argument("unknown preset '" + name + "' (available: " + names + ")");
  }
  cfg.validate();
  return cfg;
}

std::vector<std::string> preset_names() {
  return {"ideal-case", "quality-wireless", "quality-wireline", "robustness", "wireline-link"};
}

double ber(std::span<const int> tx_bits, std::span<const int> rx_bits) {
  if (tx_bits.empty() || tx_bits.size() != rx_bits.size()) {
    throw std::invalid_argument("ber: bit streams must be nonempty and equally long");
  }
  return static_cast<double>(hamming(tx_bits, rx_bits)) / static_cast<double>(tx_bits.size());
}

std::pair<double, double> wilson_interval(long errors, long bits, double z) {
  if (bits <= 0 || errors < 0 || errors > bits) {
    throw std::invalid_argument("wilson_interval: need 0 <= errors <= bits, bits > 0");
  }
  const double n = static_cast<double>(bits);
  const double p = static_cast<double>(errors) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  // The bound is exact at the degenerate counts; roundoff must not move it.
  const double lo = errors == 0 ? 0.0 : std::max(0.0, center - half);
  const double hi = errors == bits ? 1.0 : std::min(1.0, center + half);
  return {lo, hi};
}

TrialResult run_trial(const ExperimentConfig& config, std::uint64_t seed,
                      const InverseTable* table, TrialCapture* capture) {
  config.validate();
  const BandSpec band = config.resolved_band();
  const bool wireless = config.ofdm.mode == OfdmMode::Wireless;

  TrialResult result;
  result.seed = seed;
  result.config = summarize(config, band);

  // Source bits and modulation.
  Rng bit_rng(derive_seed(seed, kBitStream, 0));
  std::vector<int> bits(static_cast<std::size_t>(config.ofdm.bits_per_symbol()));
  for (int& b : bits) {
    b = bit_rng.bit();
  }
  result.tx_bits = static_cast<long>(bits.size());
  const SymbolFrame frame = frame_from_bits(bits, config.ofdm);

  // Transmit waveform, with the insertion loss applied to the core symbol and
  // the prefix rebuilt afterwards: one symbol stands in for the steady state
  // of a long stream, so the channel acts circularly on the core.
  std::vector<std::vector<double>> channels;
  std::vector<std::string> names;
  const int cp = config.ofdm.cp_len;
  if (wireless) {
    ComplexVec tx = modulate(frame, config.ofdm);
    if (config.channel.has_value()) {
      ComplexVec core(tx.begin() + cp, tx.end());
      core = apply_channel(core, *config.channel, config.sample_rate_hz);
      ComplexVec rebuilt(core.end() - cp, core.end());
      rebuilt.insert(rebuilt.end(), core.begin(), core.end());
      tx = std::move(rebuilt);
    }
    if (config.snr_db != kNoiseless) {
      tx = awgn(std::move(tx), config.snr_db, derive_seed(seed, kSnrNoiseStream, 0));
    }
    auto [i, q] = split_iq(tx);
    channels = {std::move(i), std::move(q)};
    names = {"i", "q"};
  } else {
    std::vector<double> tx = modulate_real(frame, config.ofdm);
    if (config.channel.has_value()) {
      std::vector<double> core(tx.begin() + cp, tx.end());
      core = apply_channel(core, *config.channel, config.sample_rate_hz);
      std::vector<double> rebuilt(core.end() - cp, core.end());
      rebuilt.insert(rebuilt.end(), core.begin(), core.end());
      tx = std::move(rebuilt);
    }
    if (config.snr_db != kNoiseless) {
      tx = awgn(std::move(tx), config.snr_db, derive_seed(seed, kSnrNoiseStream, 0));
    }
    channels = {std::move(tx)};
    names = {"s"};
  }

  // Clipping level from the unclipped RMS at the clipper input. The wireless
  // ratio is defined against the complex envelope's RMS (both rails share one
  // converter range), so each real rail sees an effective ratio sqrt(2)
  // higher; this is what splits the saturation events across the I and Q
  // channels instead of concentrating them.
  const std::vector<double> pooled_pre_trim = concat(channels);
  const double rms_scale = wireless ? std::numbers::sqrt2 : 1.0;
  const double gamma = rms_scale * gamma_for_target_cr(pooled_pre_trim, config.cr_target);
  result.gamma = gamma;

  // ADC front-end noise trimmed to the target SINAD (added before the
  // saturating conversion, like the thermal+jitter noise it stands in for).
  double step = 0.0;
  if (config.adc.has_value()) {
    step = quantizer_step(config.adc->bits, gamma);
    const double sigma = enob_noise_sigma(mean_power(pooled_pre_trim), config.adc->sinad_db, step);
    if (sigma > 0.0) {
      Rng trim_rng(derive_seed(seed, kTrimNoiseStream, 0));
      for (auto& channel : channels) {
        for (double& v : channel) {
          v += sigma * trim_rng.normal();
        }
      }
    }
  }

  const std::vector<double> pooled_input = concat(channels);
  result.papr_original = papr(pooled_input);

  // Clip (and quantize) each real channel; declip independently.
  const SaturationThresholds thresholds = SaturationThresholds::symmetric(gamma);
  std::vector<std::vector<double>> baseline(channels.size());
  std::vector<std::vector<double>> saturated(channels.size());
  std::vector<std::vector<double>> declipped(channels.size());
  std::vector<double> pooled_clipped;
  pooled_clipped.reserve(pooled_input.size());
  for (std::size_t c = 0; c < channels.size(); ++c) {
    SaturatedStream stream = clip(channels[c], thresholds);
    int clipped_here = 0;
    for (SampleFlag f : stream.flags) {
      clipped_here += f != SampleFlag::Ok ? 1 : 0;
    }
    result.saturated_samples += clipped_here;
    result.max_clipped_per_channel = std::max(result.max_clipped_per_channel, clipped_here);
    pooled_clipped.insert(pooled_clipped.end(), stream.values.begin(), stream.values.end());

    if (config.adc.has_value()) {
      stream.values = quantize(std::move(stream.values), config.adc->bits, gamma);
      baseline[c] = quantize_unbounded(channels[c], step);
    } else {
      baseline[c] = channels[c];
    }
    saturated[c] = stream.values;

    DeclipReport report;
    try {
      report = declip_symbol(stream, config.ofdm.n_taps, band, config.window, table);
    } catch (const DenseSaturationError&) {
      ++result.declip_dense_failures;
      result.declip_skipped += clipped_here;
    }
    result.declip_skipped += static_cast<int>(report.skipped);
    result.declip_solver_failures += static_cast<int>(report.solver_failures);
    result.declip_unsolvable += static_cast<int>(report.unsolvable_windows);
    declipped[c] = apply_estimates(stream, report);
  }
  result.papr_saturated = papr(pooled_clipped);
  result.achieved_cr = gamma / (rms_scale * std::sqrt(mean_power(pooled_clipped)));

  // Three receive paths on the same bits and noise.
  const SymbolFrame frame_base = receive_frame(baseline, config);
  const SymbolFrame frame_sat = receive_frame(saturated, config);
  const SymbolFrame frame_dec = receive_frame(declipped, config);
  const std::vector<int> bits_base = bits_from_frame(frame_base, config.ofdm);
  const std::vector<int> bits_sat = bits_from_frame(frame_sat, config.ofdm);
  const std::vector<int> bits_dec = bits_from_frame(frame_dec, config.ofdm);
  result.errors_baseline = hamming(bits, bits_base);
  result.errors_saturated = hamming(bits, bits_sat);
  result.errors_declipped = hamming(bits, bits_dec);
  const double n_bits = static_cast<double>(result.tx_bits);
  result.ber_baseline = static_cast<double>(result.errors_baseline) / n_bits;
  result.ber_saturated = static_cast<double>(result.errors_saturated) / n_bits;
  result.ber_declipped = static_cast<double>(result.errors_declipped) / n_bits;

  if (capture != nullptr) {
    capture->channel_names = names;
    capture->original = channels;
    capture->saturated = saturated;
    capture->declipped = declipped;
    capture->carriers = config.ofdm.data_carriers();
    capture->tx_points = data_points(frame, config.ofdm);
    capture->rx_baseline = data_points(frame_base, config.ofdm);
    capture->rx_saturated = data_points(frame_sat, config.ofdm);
    capture->rx_declipped = data_points(frame_dec, config.ofdm);
  }
  return result;
}

TrialResult run_trial(ExperimentConfig config, double cr_target, int window_n, double snr_db,
                      std::uint64_t seed) {
  config.cr_target = cr_target;
  config.window.window_n = window_n;
  config.snr_db = snr_db;
  return run_trial(config, seed);
}

std::string axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::CrTarget:
      return "cr";
    case SweepAxis::WindowN:
      return "window_n";
    case SweepAxis::SnrDb:
      return "snr_db";
  }
  throw std::invalid_argument("axis_name: unknown axis");
}

void SweepSpec::validate() const {
  base.validate();
  if (trials < 1) {
    throw std::invalid_argument("SweepSpec: trials must be at least 1");
  }
  if (workers < 1) {
    throw std::invalid_argument("SweepSpec: workers must be at least 1");
  }
  if (values.empty()) {
    throw std::invalid_argument("SweepSpec: need at least one axis value");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (!std::isfinite(v)) {
      throw std::invalid_argument("SweepSpec: axis values must be finite");
    }
    if (axis == SweepAxis::WindowN &&
        (v < 1.0 || std::abs(v - std::round(v)) > 1e-9)) {
      throw std::invalid_argument("SweepSpec: window_n axis values must be positive integers");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (values[j] == v) {
        throw std::invalid_argument("SweepSpec: axis values must be distinct");
      }
    }
  }
}

namespace {

struct TrialTally {
  long errors_sat = 0;
  long errors_dec = 0;
  long errors_base = 0;
  long bits = 0;
  double achieved_cr = 0.0;
  int saturated = 0;
  bool incomplete = false;
};

}  // namespace

std::vector<SweepRow> sweep(const SweepSpec& spec,
                            const std::function<void(const SweepRow&)>& on_row) {
  spec.validate();
  std::vector<SweepRow> rows;
  rows.reserve(spec.values.size());

  for (double value : spec.values) {
    ExperimentConfig cfg = spec.base;
    switch (spec.axis) {
      case SweepAxis::CrTarget:
        cfg.cr_target = value;
        break;
      case SweepAxis::WindowN:
        cfg.window.window_n = static_cast<int>(std::llround(value));
        break;
      case SweepAxis::SnrDb:
        cfg.snr_db = value;
        break;
    }
    cfg.validate();

    std::optional<InverseTable> table;
    if (cfg.use_tables) {
      const int stream_len = cfg.ofdm.n_taps + cfg.ofdm.cp_len;
      table = precompute_inverse_tables(cfg.resolved_band(), cfg.window,
                                        isolated_patterns(stream_len, cfg.window));
    }
    const InverseTable* table_ptr = table.has_value() ? &*table : nullptr;

    // The per-point seed keys off the axis value itself, so splitting a sweep
    // into separate runs cannot change any trial's seed.
    const std::uint64_t point_key = std::bit_cast<std::uint64_t>(value);

    std::vector<TrialTally> tallies(static_cast<std::size_t>(spec.trials));
    auto work = [&](std::atomic<long>& next) {
      for (long i = next.fetch_add(1); i < spec.trials; i = next.fetch_add(1)) {
        const std::uint64_t trial_seed =
            derive_seed(spec.base_seed, point_key, static_cast<std::uint64_t>(i));
        const TrialResult r = run_trial(cfg, trial_seed, table_ptr);
        TrialTally& t = tallies[static_cast<std::size_t>(i)];
        t.errors_sat = r.errors_saturated;
        t.errors_dec = r.errors_declipped;
        t.errors_base = r.errors_baseline;
        t.bits = r.tx_bits;
        t.achieved_cr = r.achieved_cr;
        t.saturated = r.saturated_samples;
        t.incomplete = !r.declip_clean();
      }
    };
    std::atomic<long> next{0};
    if (spec.workers == 1) {
      work(next);
    } else {
      std::vector<std::thread> pool;
      pool.reserve(static_cast<std::size_t>(spec.workers));
      for (int w = 0; w < spec.workers; ++w) {
        pool.emplace_back([&] { work(next); });
      }
      for (auto& th : pool) {
        th.join();
      }
    }

    // Sequential reduction in trial order keeps aggregates byte-identical for
    // any worker count.
    SweepRow row;
    row.axis = axis_name(spec.axis);
    row.value = value;
    row.trials = spec.trials;
    double cr_sum = 0.0;
    for (const TrialTally& t : tallies) {
      row.errors_sat += t.errors_sat;
      row.errors_declip += t.errors_dec;
      row.errors_base += t.errors_base;
      row.bits += t.bits;
      cr_sum += t.achieved_cr;
      row.incomplete_trials += t.incomplete ? 1 : 0;
      if (static_cast<std::size_t>(t.saturated) >= row.clipped_hist.size()) {
        row.clipped_hist.resize(static_cast<std::size_t>(t.saturated) + 1, 0);
      }
      ++row.clipped_hist[static_cast<std::size_t>(t.saturated)];
    }
    row.ber_sat = static_cast<double>(row.errors_sat) / static_cast<double>(row.bits);
    row.ber_declip = static_cast<double>(row.errors_declip) / static_cast<double>(row.bits);
    row.ber_base = static_cast<double>(row.errors_base) / static_cast<double>(row.bits);
    std::tie(row.ci_lo, row.ci_hi) = wilson_interval(row.errors_declip, row.bits);
    row.mean_achieved_cr = cr_sum / static_cast<double>(spec.trials);

    if (on_row) {
      on_row(row);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

nlohmann::ordered_json json_number_or_inf(double v) {
  if (std::isinf(v)) {
    return v > 0 ? "inf" : "-inf";
  }
  return v;
}

nlohmann::ordered_json trial_to_json(const TrialResult& r) {
  nlohmann::ordered_json j;
  j["seed"] = r.seed;
  j["config"] = {{"mode", r.config.mode},
                 {"n_taps", r.config.n_taps},
                 {"active_carriers", r.config.active_carriers},
                 {"qam_order", r.config.qam_order},
                 {"cp_len", r.config.cp_len},
                 {"dc_zeroed", r.config.dc_zeroed},
                 {"window_n", r.config.window_n},
                 {"margin", r.config.margin},
                 {"epsilon", r.config.epsilon},
                 {"band_lo", r.config.band_lo},
                 {"band_hi", r.config.band_hi},
                 {"cr_target", r.config.cr_target},
                 {"snr_db", json_number_or_inf(r.config.snr_db)},
                 {"adc_bits", r.config.adc_bits}};
  j["tx_bits"] = r.tx_bits;
  j["errors_saturated"] = r.errors_saturated;
  j["errors_declipped"] = r.errors_declipped;
  j["errors_baseline"] = r.errors_baseline;
  j["ber_saturated"] = r.ber_saturated;
  j["ber_declipped"] = r.ber_declipped;
  j["ber_baseline"] = r.ber_baseline;
  j["gamma"] = r.gamma;
  j["achieved_cr"] = r.achieved_cr;
  j["papr_original"] = r.papr_original;
  j["papr_saturated"] = r.papr_saturated;
  j["saturated_samples"] = r.saturated_samples;
  j["max_clipped_per_channel"] = r.max_clipped_per_channel;
  j["declip_skipped"] = r.declip_skipped;
  j["declip_solver_failures"] = r.declip_solver_failures;
  j["declip_dense_failures"] = r.declip_dense_failures;
  j["declip_unsolvable"] = r.declip_unsolvable;
  return j;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  return out;
}

}  // namespace

void write_results_jsonl(const std::filesystem::path& path,
                         std::span<const TrialResult> results) {
  auto out = open_out(path);
  for (const TrialResult& r : results) {
    out << trial_to_json(r).dump() << '\n';
  }
}

void write_sweep_csv(const std::filesystem::path& path, std::span<const SweepRow> rows) {
  auto out = open_out(path);
  out << "axis,value,trials,ber_sat,ber_declip,ber_base,ci_lo,ci_hi\n";
  for (const SweepRow& r : rows) {
    out << r.axis << ',' << format_double(r.value) << ',' << r.trials << ','
        << format_double(r.ber_sat) << ',' << format_double(r.ber_declip) << ','
        << format_double(r.ber_base) << ',' << format_double(r.ci_lo) << ','
        << format_double(r.ci_hi) << '\n';
  }
}

void write_clipped_hist_csv(const std::filesystem::path& path, std::span<const SweepRow> rows) {
  auto out = open_out(path);
  out << "axis,value,clipped_samples,trials\n";
  for (const SweepRow& r : rows) {
    for (std::size_t k = 0; k < r.clipped_hist.size(); ++k) {
      if (r.clipped_hist[k] > 0) {
        out << r.axis << ',' << format_double(r.value) << ',' << k << ',' << r.clipped_hist[k]
            << '\n';
      }
    }
  }
}

void write_constellation_csv(const std::filesystem::path& path, const TrialCapture& capture) {
  auto out = open_out(path);
  out << "carrier,tx_re,tx_im,baseline_re,baseline_im,saturated_re,saturated_im,"
         "declipped_re,declipped_im\n";
  for (std::size_t i = 0; i < capture.carriers.size(); ++i) {
    out << capture.carriers[i] << ',' << format_double(capture.tx_points[i].real()) << ','
        << format_double(capture.tx_points[i].imag()) << ','
        << format_double(capture.rx_baseline[i].real()) << ','
        << format_double(capture.rx_baseline[i].imag()) << ','
        << format_double(capture.rx_saturated[i].real()) << ','
        << format_double(capture.rx_saturated[i].imag()) << ','
        << format_double(capture.rx_declipped[i].real()) << ','
        << format_double(capture.rx_declipped[i].imag()) << '\n';
  }
}

void write_trace_csv(const std::filesystem::path& path, const TrialCapture& capture) {
  auto out = open_out(path);
  out << "index,channel,original,saturated,declipped\n";
  for (std::size_t c = 0; c < capture.channel_names.size(); ++c) {
    for (std::size_t i = 0; i < capture.original[c].size(); ++i) {
      out << i << ',' << capture.channel_names[c] << ','
          << format_double(capture.original[c][i]) << ','
          << format_double(capture.saturated[c][i]) << ','
          << format_double(capture.declipped[c][i]) << '\n';
    }
  }
}

void emit_artifacts(const std::filesystem::path& dir, std::span<const TrialResult> results,
                    const TrialCapture* capture) {
  if (results.empty()) {
    throw std::invalid_argument("emit_artifacts: results must be nonempty");
  }
  std::filesystem::create_directories(dir);
  write_results_jsonl(dir / "trials.jsonl", results);
  if (capture != nullptr) {
    write_constellation_csv(dir / "constellation.csv", *capture);
    write_trace_csv(dir / "trace.csv", *capture);
  }
}

}  // namespace desat
