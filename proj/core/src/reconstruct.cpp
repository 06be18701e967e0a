#include "desat/reconstruct.hpp"

#include <algorithm>
#include <cmath>

namespace desat {

void SampleSet::validate() const {
  if (locations.size() != values.size()) {
    throw std::invalid_argument("SampleSet: locations and values must have equal length");
  }
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("SampleSet: values must be finite");
    }
  }
  std::vector<double> sorted(locations);
  for (double t : sorted) {
    if (!std::isfinite(t)) {
      throw std::invalid_argument("SampleSet: locations must be finite");
    }
  }
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("SampleSet: locations must be pairwise distinct");
  }
}

Eigen::MatrixXd cholesky_factor(Eigen::MatrixXd a) {
  const Eigen::Index n = a.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    const double d = a(j, j) - a.row(j).head(j).squaredNorm();
    if (!(d > 0.0)) {  // also catches NaN
      throw SolverError("ill-conditioned system: nonpositive pivot at index " +
                            std::to_string(j),
                        static_cast<int>(j));
    }
    const double ljj = std::sqrt(d);
    a(j, j) = ljj;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      a(i, j) = (a(i, j) - a.row(i).head(j).dot(a.row(j).head(j))) / ljj;
    }
  }
  a.triangularView<Eigen::StrictlyUpper>().setZero();
  return a;
}

Eigen::VectorXd cholesky_solve(const Eigen::MatrixXd& l, Eigen::VectorXd b) {
  const Eigen::Index n = l.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    b(i) = (b(i) - l.row(i).head(i).dot(b.head(i))) / l(i, i);
  }
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    b(i) = (b(i) - l.col(i).tail(n - i - 1).dot(b.tail(n - i - 1))) / l(i, i);
  }
  return b;
}

double cholesky_cond_estimate(const Eigen::MatrixXd& l) {
  if (l.rows() == 0) {
    return 1.0;
  }
  const double dmax = l.diagonal().maxCoeff();
  const double dmin = l.diagonal().minCoeff();
  const double ratio = dmax / dmin;
  return ratio * ratio;
}

double default_epsilon(const Eigen::MatrixXd& gram) {
  if (gram.rows() == 0) {
    return 0.0;
  }
  return 1e-8 * gram.trace() / static_cast<double>(gram.rows());
}

KernelFit regress(const SampleSet& samples, const BandSpec& band,
                  std::optional<double> epsilon) {
  samples.validate();
  Eigen::MatrixXd r = gram_matrix(band, samples.locations);
  const double eps = epsilon.has_value() ? *epsilon : default_epsilon(r);
  if (!(eps >= 0.0)) {
    throw std::invalid_argument("regress: epsilon must be nonnegative");
  }
  r.diagonal().array() += eps;
  const Eigen::MatrixXd l = cholesky_factor(std::move(r));
  Eigen::VectorXd y =
      Eigen::Map<const Eigen::VectorXd>(samples.values.data(), samples.values.size());
  Eigen::VectorXd alpha = cholesky_solve(l, std::move(y));
  return KernelFit{band, samples.locations, std::move(alpha), eps};
}

double interpolate_at(const KernelFit& fit, double query) {
  double acc = 0.0;
  for (std::size_t n = 0; n < fit.nodes.size(); ++n) {
    acc += fit.coefficients(static_cast<Eigen::Index>(n)) *
           kernel_value(fit.band, query - fit.nodes[n]);
  }
  return acc;
}

std::vector<double> interpolate(const KernelFit& fit, std::span<const double> queries) {
  std::vector<double> out;
  out.reserve(queries.size());
  for (double q : queries) {
    out.push_back(interpolate_at(fit, q));
  }
  return out;
}

double fit_norm(const KernelFit& fit) {
  const Eigen::MatrixXd r = gram_matrix(fit.band, fit.nodes);
  return fit.coefficients.dot(r * fit.coefficients);
}

}  // namespace desat
