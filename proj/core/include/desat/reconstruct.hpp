#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "desat/kernel.hpp"

namespace desat {

/// Cholesky breakdown: the system R + eps*I produced a nonpositive or
/// nonfinite pivot, i.e. it is numerically indefinite.
class SolverError : public std::runtime_error {
public:
  SolverError(const std::string& what, int pivot_index)
      : std::runtime_error(what), pivot_index_(pivot_index) {}

  int pivot_index() const { return pivot_index_; }

private:
  int pivot_index_;
};

/// Nonuniform real-valued samples (t_n, f_n): the regression input.
struct SampleSet {
  std::vector<double> locations;
  std::vector<double> values;

  std::size_t size() const { return locations.size(); }
  void validate() const;
};

/// Kernel expansion f(t) = sum_n coefficients[n] * phi(t - nodes[n]),
/// immutable once built.
struct KernelFit {
  BandSpec band;
  std::vector<double> nodes;
  Eigen::VectorXd coefficients;
  double epsilon = 0.0;  // regularization actually used in the solve
};

/// Lower Cholesky factor of an SPD matrix, computed in place. Throws
/// SolverError naming the offending pivot on breakdown.
Eigen::MatrixXd cholesky_factor(Eigen::MatrixXd a);

/// Solves L L^T x = b given the lower factor L.
Eigen::VectorXd cholesky_solve(const Eigen::MatrixXd& l, Eigen::VectorXd b);

/// Squared ratio of extreme factor diagonals; cheap order-of-magnitude
/// estimate of the condition number of the factored matrix.
double cholesky_cond_estimate(const Eigen::MatrixXd& l);

/// Trace-relative regularization floor, 1e-8 * trace(R) / N. Used whenever a
/// caller does not pin epsilon explicitly.
double default_epsilon(const Eigen::MatrixXd& gram);

/// Solves (R + eps*I) alpha = y for the expansion coefficients. No epsilon
/// selects the trace-relative default; epsilon = 0 interpolates exactly.
KernelFit regress(const SampleSet& samples, const BandSpec& band,
                  std::optional<double> epsilon = std::nullopt);

/// Evaluates the expansion at one query location.
double interpolate_at(const KernelFit& fit, double query);

/// Evaluates the expansion at each query location (the E*alpha product).
std::vector<double> interpolate(const KernelFit& fit, std::span<const double> queries);

/// Squared L2 norm of the expansion, alpha^T R alpha.
double fit_norm(const KernelFit& fit);

}  // namespace desat
