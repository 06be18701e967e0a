#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "desat/kernel.hpp"
#include "desat/reconstruct.hpp"

namespace desat {

enum class SampleFlag {
  Ok,           // value is the true sample
  ClippedLow,   // value pinned to the under-saturation threshold T0
  ClippedHigh,  // value pinned to the over-saturation threshold T1
  Estimated,    // reconstructed value (output streams only)
};

/// Time-ordered samples as delivered by a saturating front end. Clipped
/// samples carry the threshold value they were pinned to.
struct SaturatedStream {
  std::vector<double> locations;  // strictly increasing
  std::vector<double> values;
  std::vector<SampleFlag> flags;

  std::size_t size() const { return locations.size(); }
  void validate() const;
};

/// Sliding-window parameters: the regression uses the window_n nearest
/// unsaturated neighbors, searched within a pool of window_n + margin
/// surrounding samples. Margin samples only widen the search pool; they never
/// enter the regression. No epsilon selects the trace-relative default.
struct WindowConfig {
  int window_n = 8;
  int margin = 8;
  std::optional<double> epsilon = std::nullopt;

  void validate() const;
};

/// Fewer unsaturated samples than the window requires.
class DenseSaturationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Worst-case squared prediction error of a window at its target, per unit
/// signal norm and relative to phi(0): rho = 1 - k'(R+eps*I)^-1 k / phi(0),
/// the power function of the interpolation. Near 0 the neighbors pin the
/// target down; near 1 they leave it undetermined (typically because the
/// neighborhood itself is riddled with saturated samples). A window counts as
/// solvable when rho stays below this bound.
inline constexpr double kSolvableRhoMax = 0.01;

struct DeclipEstimate {
  std::size_t sample_index;  // index into the input stream
  double location;
  double value;
  double window_cond;  // condition estimate of R + eps*I for this window
  double rho;          // relative power-function value, see kSolvableRhoMax
  bool from_table;
};

struct DeclipReport {
  std::vector<DeclipEstimate> estimates;
  int skipped = 0;                 // saturated samples left unestimated
  int solver_failures = 0;         // windows whose factorization broke down
  int dense_frame_failures = 0;    // frames with fewer unsaturated than window_n
  int inside_threshold_count = 0;  // estimates that stayed inside (T0, T1)
  int high_cond_windows = 0;       // condition estimate above 1e12
  int unsolvable_windows = 0;      // estimates with rho above kSolvableRhoMax
  int table_hits = 0;
  int table_misses = 0;
};

/// Splits a stream by flag into the unsaturated sample set and the saturated
/// locations, preserving time order within each group.
std::pair<SampleSet, std::vector<double>> partition(const SaturatedStream& stream);

/// The n entries of `unsaturated` closest to `target`, anterior sample
/// winning distance ties; result sorted by location. Throws
/// DenseSaturationError when fewer than n samples exist.
SampleSet nearest_neighbors(const SampleSet& unsaturated, double target, int n);

/// Pre-inverted window systems keyed by the integer offsets of the selected
/// neighbors relative to the saturated sample. Built once, then read-only.
struct InverseTable {
  struct Entry {
    Eigen::MatrixXd inverse;  // (R + eps*I)^-1 for this offset pattern
    double cond;
  };

  BandSpec band;
  int window_n = 0;
  double epsilon = 0.0;  // resolved value baked into the entries
  std::map<std::vector<int>, Entry> entries;
};

/// Builds the lookup table for the given offset patterns. Each pattern must
/// be a strictly increasing vector of window_n integer offsets.
InverseTable precompute_inverse_tables(const BandSpec& band, const WindowConfig& config,
                                       const std::vector<std::vector<int>>& patterns);

/// Offset patterns that arise on a length-`frame_len` integer grid when
/// saturated samples are isolated, including the truncated patterns near the
/// frame edges.
std::vector<std::vector<int>> isolated_patterns(int frame_len, const WindowConfig& config);

/// Reconstructs every saturated sample of the stream from its window_n
/// nearest unsaturated neighbors (Algorithm: partition, per-sample neighbor
/// sort, regression, single-point interpolation). Unsaturated samples are
/// never touched. Throws DenseSaturationError when the whole stream holds
/// fewer than window_n unsaturated samples; per-window failures are recorded
/// and the sample skipped.
DeclipReport declip_stream(const SaturatedStream& stream, const BandSpec& band,
                           const WindowConfig& config,
                           const InverseTable* table = nullptr);

/// Per-frame variant: samples are grouped by floor(location / frame_len) and
/// each frame is declipped independently, so no window spans a frame
/// boundary. Dense-saturation failures are recorded per frame instead of
/// thrown.
DeclipReport declip_frames(const SaturatedStream& stream, const BandSpec& band,
                           const WindowConfig& config, double frame_len,
                           const InverseTable* table = nullptr);

/// Stream values with the report's estimates substituted in.
std::vector<double> apply_estimates(const SaturatedStream& stream, const DeclipReport& report);

}  // namespace desat
