#include "desat/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace desat {

namespace {
constexpr double kPi = std::numbers::pi;
}

BandSpec::BandSpec(double omega0, double omega1) : omega0_(omega0), omega1_(omega1) {
  if (!std::isfinite(omega0) || !std::isfinite(omega1)) {
    throw std::invalid_argument("BandSpec: band edges must be finite");
  }
  if (omega0 < 0.0) {
    throw std::invalid_argument("BandSpec: omega0 must be nonnegative, got " +
                                std::to_string(omega0));
  }
  if (omega1 <= omega0) {
    throw std::invalid_argument("BandSpec: omega1 must exceed omega0");
  }
  if (omega1 > kPi * (1.0 + 1e-12)) {
    throw std::invalid_argument("BandSpec: omega1 must not exceed pi on the unit grid");
  }
}

double BandSpec::peak() const { return (omega1_ - omega0_) / kPi; }

BandSpec BandSpec::nyquist() { return BandSpec(0.0, kPi); }

BandSpec BandSpec::lowpass(double omega1) { return BandSpec(0.0, omega1); }

double kernel_value(const BandSpec& band, double t) {
  const double w0 = band.omega0();
  const double w1 = band.omega1();
  if (std::abs(t) < 1e-12) {
    // Series around the peak; the sin difference cancels catastrophically
    // near zero when the band is narrow.
    const double c0 = (w1 - w0) / kPi;
    const double c2 = (w1 * w1 * w1 - w0 * w0 * w0) / (6.0 * kPi);
    return c0 - c2 * t * t;
  }
  return (std::sin(w1 * t) - std::sin(w0 * t)) / (kPi * t);
}

Eigen::MatrixXd gram_matrix(const BandSpec& band, std::span<const double> locations) {
  const auto n = static_cast<Eigen::Index>(locations.size());
  std::vector<double> sorted(locations.begin(), locations.end());
  for (double t : sorted) {
    if (!std::isfinite(t)) {
      throw std::invalid_argument("gram_matrix: locations must be finite");
    }
  }
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("gram_matrix: sample locations must be pairwise distinct");
  }

  Eigen::MatrixXd r(n, n);
  const double peak = band.peak();
  for (Eigen::Index i = 0; i < n; ++i) {
    r(i, i) = peak;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = kernel_value(band, locations[i] - locations[j]);
      r(i, j) = v;
      r(j, i) = v;
    }
  }
  return r;
}

}  // namespace desat
