#pragma once

#include <span>

#include <Eigen/Dense>

namespace desat {

/// Symmetric spectral support (-omega1, -omega0] u [omega0, omega1), in
/// radians per sample interval. The sampling grid has unit spacing, so the
/// usable band is (-pi, pi); omega0 = 0 gives the lowpass case and (0, pi)
/// Shannon's classic space.
class BandSpec {
public:
  BandSpec(double omega0, double omega1);

  double omega0() const { return omega0_; }
  double omega1() const { return omega1_; }

  /// Kernel peak value phi(0) = (omega1 - omega0) / pi.
  double peak() const;

  bool operator==(const BandSpec& other) const = default;

  static BandSpec nyquist();
  static BandSpec lowpass(double omega1);

private:
  double omega0_;
  double omega1_;
};

/// Reproducing kernel of the bandpass space at offset t, the inverse Fourier
/// transform of the band indicator:
///
///   phi(t) = (sin(omega1 t) - sin(omega0 t)) / (pi t),  phi(0) = (w1-w0)/pi.
///
/// Even in t, bounded by phi(0), positive definite.
double kernel_value(const BandSpec& band, double t);

/// Gram matrix R with R(m, n) = phi(t_m - t_n). Symmetric positive definite
/// for pairwise-distinct locations; duplicates are rejected.
Eigen::MatrixXd gram_matrix(const BandSpec& band, std::span<const double> locations);

}  // namespace desat
