#include "desat/declip.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace desat {

namespace {

constexpr double kCondWarnThreshold = 1e12;
constexpr double kIntegerTolerance = 1e-9;

double resolve_epsilon(const BandSpec& band, const WindowConfig& config) {
  // Gram diagonals are all phi(0), so the trace-relative default reduces to
  // 1e-8 * peak regardless of the window contents.
  return config.epsilon.has_value() ? *config.epsilon : 1e-8 * band.peak();
}

struct ThresholdPair {
  double t0 = -std::numeric_limits<double>::infinity();
  double t1 = std::numeric_limits<double>::infinity();
};

ThresholdPair stream_thresholds(const SaturatedStream& stream) {
  ThresholdPair thr;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    if (stream.flags[i] == SampleFlag::ClippedLow) {
      thr.t0 = stream.values[i];
    } else if (stream.flags[i] == SampleFlag::ClippedHigh) {
      thr.t1 = stream.values[i];
    }
  }
  return thr;
}

// The window_n nearest unsaturated frame members around `target`, searched
// within the window_n + margin nearest members of any flag. Members come out
// in index (= location) order. Returns false when the pool runs dry first.
bool select_window(const SaturatedStream& stream, std::size_t begin, std::size_t end,
                   std::size_t target, const WindowConfig& config,
                   std::vector<std::size_t>& out) {
  out.clear();
  const double t = stream.locations[target];
  std::ptrdiff_t left = static_cast<std::ptrdiff_t>(target) - 1;
  std::size_t right = target + 1;
  int pool_budget = config.window_n + config.margin;
  const std::size_t want = static_cast<std::size_t>(config.window_n);

  while (pool_budget > 0 && out.size() < want) {
    const bool has_left = left >= static_cast<std::ptrdiff_t>(begin);
    const bool has_right = right < end;
    if (!has_left && !has_right) {
      break;
    }
    std::size_t pick;
    if (has_left && has_right) {
      const double dl = t - stream.locations[static_cast<std::size_t>(left)];
      const double dr = stream.locations[right] - t;
      if (dl <= dr) {  // anterior wins ties
        pick = static_cast<std::size_t>(left--);
      } else {
        pick = right++;
      }
    } else if (has_left) {
      pick = static_cast<std::size_t>(left--);
    } else {
      pick = right++;
    }
    --pool_budget;
    if (stream.flags[pick] == SampleFlag::Ok) {
      out.push_back(pick);
    }
  }
  if (out.size() < want) {
    return false;
  }
  std::sort(out.begin(), out.end());
  return true;
}

bool integral_offsets(const std::vector<double>& offsets, std::vector<int>& key) {
  key.clear();
  key.reserve(offsets.size());
  for (double o : offsets) {
    const double r = std::round(o);
    if (std::abs(o - r) > kIntegerTolerance) {
      return false;
    }
    key.push_back(static_cast<int>(r));
  }
  return true;
}

void process_target(const SaturatedStream& stream, std::size_t begin, std::size_t end,
                    std::size_t target, const BandSpec& band, const WindowConfig& config,
                    double epsilon, const InverseTable* table, const ThresholdPair& thr,
                    DeclipReport& report) {
  std::vector<std::size_t> window;
  if (!select_window(stream, begin, end, target, config, window)) {
    ++report.skipped;
    return;
  }

  const double t = stream.locations[target];
  const std::size_t n = window.size();
  std::vector<double> offsets(n);
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    offsets[j] = stream.locations[window[j]] - t;
    y(static_cast<Eigen::Index>(j)) = stream.values[window[j]];
  }

  // k holds the kernel evaluated between the target and each window node; it
  // doubles as the prediction functional and the power-function test vector.
  Eigen::VectorXd k(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    k(static_cast<Eigen::Index>(j)) = kernel_value(band, -offsets[j]);
  }

  Eigen::VectorXd alpha;
  double cond = 0.0;
  double quad = 0.0;  // k'(R + eps*I)^-1 k
  bool from_table = false;
  std::vector<int> key;
  const InverseTable::Entry* entry = nullptr;
  if (table != nullptr && integral_offsets(offsets, key)) {
    const auto it = table->entries.find(key);
    if (it != table->entries.end()) {
      entry = &it->second;
    }
  }
  if (entry != nullptr) {
    alpha = entry->inverse * y;
    quad = k.dot(entry->inverse * k);
    cond = entry->cond;
    from_table = true;
    ++report.table_hits;
  } else {
    if (table != nullptr) {
      ++report.table_misses;
    }
    Eigen::MatrixXd r = gram_matrix(band, offsets);
    r.diagonal().array() += epsilon;
    try {
      const Eigen::MatrixXd l = cholesky_factor(std::move(r));
      cond = cholesky_cond_estimate(l);
      alpha = cholesky_solve(l, std::move(y));
      quad = k.dot(cholesky_solve(l, k));
    } catch (const SolverError&) {
      ++report.solver_failures;
      ++report.skipped;
      return;
    }
  }

  const double estimate = alpha.dot(k);
  const double rho = std::clamp(1.0 - quad / band.peak(), 0.0, 1.0);

  if (cond > kCondWarnThreshold) {
    ++report.high_cond_windows;
  }
  if (rho > kSolvableRhoMax) {
    ++report.unsolvable_windows;
  }
  if (estimate > thr.t0 && estimate < thr.t1) {
    ++report.inside_threshold_count;
  }
  report.estimates.push_back(DeclipEstimate{target, t, estimate, cond, rho, from_table});
}

void check_table(const InverseTable* table, const BandSpec& band, const WindowConfig& config,
                 double epsilon) {
  if (table == nullptr) {
    return;
  }
  if (!(table->band == band) || table->window_n != config.window_n ||
      table->epsilon != epsilon) {
    throw std::invalid_argument(
        "declip: lookup table was built for a different band, window or epsilon");
  }
}

// Declips samples in [begin, end). Returns the number of unsaturated members.
std::size_t process_frame(const SaturatedStream& stream, std::size_t begin, std::size_t end,
                          const BandSpec& band, const WindowConfig& config, double epsilon,
                          const InverseTable* table, const ThresholdPair& thr,
                          DeclipReport& report) {
  std::size_t unsaturated = 0;
  for (std::size_t i = begin; i < end; ++i) {
    if (stream.flags[i] == SampleFlag::Ok) {
      ++unsaturated;
    }
  }
  if (unsaturated < static_cast<std::size_t>(config.window_n)) {
    return unsaturated;
  }
  for (std::size_t i = begin; i < end; ++i) {
    if (stream.flags[i] != SampleFlag::Ok) {
      process_target(stream, begin, end, i, band, config, epsilon, table, thr, report);
    }
  }
  return unsaturated;
}

}  // namespace

void SaturatedStream::validate() const {
  if (locations.size() != values.size() || locations.size() != flags.size()) {
    throw std::invalid_argument("SaturatedStream: field lengths must agree");
  }
  double t0 = std::numeric_limits<double>::quiet_NaN();
  double t1 = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < size(); ++i) {
    if (!std::isfinite(locations[i]) || !std::isfinite(values[i])) {
      throw std::invalid_argument("SaturatedStream: locations and values must be finite");
    }
    if (i > 0 && !(locations[i] > locations[i - 1])) {
      throw std::invalid_argument("SaturatedStream: locations must be strictly increasing");
    }
    switch (flags[i]) {
      case SampleFlag::Ok:
        break;
      case SampleFlag::ClippedLow:
        if (std::isnan(t0)) {
          t0 = values[i];
        } else if (values[i] != t0) {
          throw std::invalid_argument(
              "SaturatedStream: clipped-low samples must share the threshold value");
        }
        break;
      case SampleFlag::ClippedHigh:
        if (std::isnan(t1)) {
          t1 = values[i];
        } else if (values[i] != t1) {
          throw std::invalid_argument(
              "SaturatedStream: clipped-high samples must share the threshold value");
        }
        break;
      case SampleFlag::Estimated:
        throw std::invalid_argument("SaturatedStream: input streams cannot carry estimates");
    }
  }
  if (!std::isnan(t0) && !std::isnan(t1) && !(t0 < t1)) {
    throw std::invalid_argument("SaturatedStream: thresholds must satisfy T0 < T1");
  }
}

void WindowConfig::validate() const {
  if (window_n < 1) {
    throw std::invalid_argument("WindowConfig: window_n must be at least 1");
  }
  if (margin < 0) {
    throw std::invalid_argument("WindowConfig: margin must be nonnegative");
  }
  if (epsilon.has_value() && !(std::isfinite(*epsilon) && *epsilon >= 0.0)) {
    throw std::invalid_argument("WindowConfig: epsilon must be finite and nonnegative");
  }
}

std::pair<SampleSet, std::vector<double>> partition(const SaturatedStream& stream) {
  stream.validate();
  SampleSet unsaturated;
  std::vector<double> saturated;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    if (stream.flags[i] == SampleFlag::Ok) {
      unsaturated.locations.push_back(stream.locations[i]);
      unsaturated.values.push_back(stream.values[i]);
    } else {
      saturated.push_back(stream.locations[i]);
    }
  }
  return {std::move(unsaturated), std::move(saturated)};
}

SampleSet nearest_neighbors(const SampleSet& unsaturated, double target, int n) {
  if (n < 1) {
    throw std::invalid_argument("nearest_neighbors: n must be positive");
  }
  if (unsaturated.size() < static_cast<std::size_t>(n)) {
    throw DenseSaturationError("saturation too dense: " + std::to_string(unsaturated.size()) +
                               " unsaturated samples, need " + std::to_string(n));
  }
  std::vector<std::size_t> order(unsaturated.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    order[i] = i;
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double da = std::abs(unsaturated.locations[a] - target);
    const double db = std::abs(unsaturated.locations[b] - target);
    if (da != db) {
      return da < db;
    }
    return unsaturated.locations[a] < unsaturated.locations[b];  // anterior wins
  });
  order.resize(static_cast<std::size_t>(n));
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return unsaturated.locations[a] < unsaturated.locations[b];
  });
  SampleSet out;
  for (std::size_t i : order) {
    out.locations.push_back(unsaturated.locations[i]);
    out.values.push_back(unsaturated.values[i]);
  }
  return out;
}

InverseTable precompute_inverse_tables(const BandSpec& band, const WindowConfig& config,
                                       const std::vector<std::vector<int>>& patterns) {
  config.validate();
  const double epsilon = resolve_epsilon(band, config);
  InverseTable table{band, config.window_n, epsilon, {}};
  for (const auto& pattern : patterns) {
    if (pattern.size() != static_cast<std::size_t>(config.window_n)) {
      throw std::invalid_argument("precompute_inverse_tables: pattern length must equal window_n");
    }
    for (std::size_t i = 1; i < pattern.size(); ++i) {
      if (pattern[i] <= pattern[i - 1]) {
        throw std::invalid_argument(
            "precompute_inverse_tables: patterns must be strictly increasing");
      }
    }
    std::vector<double> offsets(pattern.begin(), pattern.end());
    Eigen::MatrixXd r = gram_matrix(band, offsets);
    r.diagonal().array() += epsilon;
    const Eigen::MatrixXd l = cholesky_factor(std::move(r));
    const double cond = cholesky_cond_estimate(l);
    const auto n = l.rows();
    Eigen::MatrixXd inverse(n, n);
    for (Eigen::Index c = 0; c < n; ++c) {
      inverse.col(c) = cholesky_solve(l, Eigen::VectorXd::Unit(n, c));
    }
    table.entries.insert_or_assign(pattern, InverseTable::Entry{std::move(inverse), cond});
  }
  return table;
}

std::vector<std::vector<int>> isolated_patterns(int frame_len, const WindowConfig& config) {
  config.validate();
  if (frame_len < config.window_n + 1) {
    throw std::invalid_argument("isolated_patterns: frame too short for the window");
  }
  SaturatedStream probe;
  probe.locations.resize(static_cast<std::size_t>(frame_len));
  probe.values.assign(static_cast<std::size_t>(frame_len), 0.0);
  probe.flags.assign(static_cast<std::size_t>(frame_len), SampleFlag::Ok);
  for (int i = 0; i < frame_len; ++i) {
    probe.locations[static_cast<std::size_t>(i)] = static_cast<double>(i);
  }

  std::set<std::vector<int>> unique;
  std::vector<std::size_t> window;
  for (int g = 0; g < frame_len; ++g) {
    if (!select_window(probe, 0, probe.size(), static_cast<std::size_t>(g), config, window)) {
      continue;
    }
    std::vector<int> pattern;
    pattern.reserve(window.size());
    for (std::size_t m : window) {
      pattern.push_back(static_cast<int>(m) - g);
    }
    unique.insert(std::move(pattern));
  }
  return {unique.begin(), unique.end()};
}

DeclipReport declip_stream(const SaturatedStream& stream, const BandSpec& band,
                           const WindowConfig& config, const InverseTable* table) {
  stream.validate();
  config.validate();
  const double epsilon = resolve_epsilon(band, config);
  check_table(table, band, config, epsilon);

  std::size_t unsaturated = 0;
  for (SampleFlag f : stream.flags) {
    if (f == SampleFlag::Ok) {
      ++unsaturated;
    }
  }
  if (unsaturated < static_cast<std::size_t>(config.window_n)) {
    throw DenseSaturationError("saturation too dense: " + std::to_string(unsaturated) +
                               " unsaturated samples, need " +
                               std::to_string(config.window_n));
  }

  DeclipReport report;
  const ThresholdPair thr = stream_thresholds(stream);
  process_frame(stream, 0, stream.size(), band, config, epsilon, table, thr, report);
  return report;
}

DeclipReport declip_frames(const SaturatedStream& stream, const BandSpec& band,
                           const WindowConfig& config, double frame_len,
                           const InverseTable* table) {
  stream.validate();
  config.validate();
  if (!(frame_len > 0.0)) {
    throw std::invalid_argument("declip_frames: frame_len must be positive");
  }
  const double epsilon = resolve_epsilon(band, config);
  check_table(table, band, config, epsilon);

  DeclipReport report;
  const ThresholdPair thr = stream_thresholds(stream);
  std::size_t begin = 0;
  while (begin < stream.size()) {
    const double frame_id = std::floor(stream.locations[begin] / frame_len);
    std::size_t end = begin + 1;
    while (end < stream.size() &&
           std::floor(stream.locations[end] / frame_len) == frame_id) {
      ++end;
    }
    const std::size_t unsaturated =
        process_frame(stream, begin, end, band, config, epsilon, table, thr, report);
    if (unsaturated < static_cast<std::size_t>(config.window_n)) {
      ++report.dense_frame_failures;
      for (std::size_t i = begin; i < end; ++i) {
        if (stream.flags[i] != SampleFlag::Ok) {
          ++report.skipped;
        }
      }
    }
    begin = end;
  }
  return report;
}

std::vector<double> apply_estimates(const SaturatedStream& stream, const DeclipReport& report) {
  std::vector<double> out = stream.values;
  for (const DeclipEstimate& e : report.estimates) {
    out.at(e.sample_index) = e.value;
  }
  return out;
}

}  // namespace desat
