#include <desat/dft.hpp>
#include <desat/rng.hpp>

#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

using namespace desat;
using std::numbers::pi;

namespace {

ComplexVec random_vec(Rng& rng, std::size_t n) {
  ComplexVec x(n);
  for (auto& v : x) {
    v = {rng.normal(), rng.normal()};
  }
  return x;
}

double max_abs_diff(const ComplexVec& a, const ComplexVec& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  return worst;
}

double energy(const ComplexVec& x) {
  double e = 0.0;
  for (const auto& v : x) {
    e += std::norm(v);
  }
  return e;
}

}  // namespace

TEST_SUITE_BEGIN("dft");

TEST_CASE("round trip is the identity") {
  Rng rng(0xd1d1);
  for (std::size_t n : {1, 2, 8, 32, 256}) {
    const auto x = random_vec(rng, n);
    CHECK(max_abs_diff(dft_inverse(dft_forward(x)), x) < 1e-12);
    CHECK(max_abs_diff(dft_forward(dft_inverse(x)), x) < 1e-12);
  }
}

TEST_CASE("the transform is unitary (Parseval)") {
  Rng rng(0x9a25);
  for (std::size_t n : {4, 32, 128}) {
    const auto x = random_vec(rng, n);
    const auto y = dft_forward(x);
    CHECK(energy(y) == doctest::Approx(energy(x)).epsilon(1e-10));
  }
}

TEST_CASE("an impulse transforms to a flat spectrum") {
  ComplexVec x(16, 0.0);
  x[0] = 1.0;
  const auto y = dft_forward(x);
  for (const auto& v : y) {
    CHECK(v.real() == doctest::Approx(0.25).epsilon(1e-12));  // 1/sqrt(16)
    CHECK(std::abs(v.imag()) < 1e-12);
  }
}

TEST_CASE("a single bin inverts to a unit-magnitude exponential") {
  const std::size_t n = 32;
  const int k = 5;
  ComplexVec spec(n, 0.0);
  spec[k] = 1.0;
  const auto x = dft_inverse(spec);
  const double mag = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double angle = 2.0 * pi * k * static_cast<double>(i) / static_cast<double>(n);
    CHECK(x[i].real() == doctest::Approx(mag * std::cos(angle)).epsilon(1e-12));
    CHECK(x[i].imag() == doctest::Approx(mag * std::sin(angle)).epsilon(1e-12));
  }
}

TEST_CASE("the transform is linear") {
  Rng rng(0x11fe);
  const auto a = random_vec(rng, 64);
  const auto b = random_vec(rng, 64);
  const std::complex<double> ca(1.5, -0.5);
  const std::complex<double> cb(-2.0, 0.25);
  ComplexVec combo(64);
  for (std::size_t i = 0; i < 64; ++i) {
    combo[i] = ca * a[i] + cb * b[i];
  }
  const auto ya = dft_forward(a);
  const auto yb = dft_forward(b);
  const auto yc = dft_forward(combo);
  double worst = 0.0;
  for (std::size_t i = 0; i < 64; ++i) {
    worst = std::max(worst, std::abs(yc[i] - (ca * ya[i] + cb * yb[i])));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("non-power-of-two lengths agree with the direct definition") {
  Rng rng(0x3c3c);
  for (std::size_t n : {3, 7, 12, 13}) {
    const auto x = random_vec(rng, n);
    const auto y = dft_forward(x);
    REQUIRE(y.size() == n);
    for (std::size_t k = 0; k < n; ++k) {
      std::complex<double> acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double angle = -2.0 * pi * static_cast<double>(k * i) / static_cast<double>(n);
        acc += x[i] * std::complex<double>(std::cos(angle), std::sin(angle));
      }
      acc /= std::sqrt(static_cast<double>(n));
      CHECK(std::abs(y[k] - acc) < 1e-10);
    }
    CHECK(max_abs_diff(dft_inverse(dft_forward(x)), x) < 1e-10);
  }
}

TEST_SUITE_END();
