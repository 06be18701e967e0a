#include "desat/dft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace desat {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void fft_radix2(ComplexVec& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) {
      j ^= bit;
    }
    j ^= bit;
    if (i < j) {
      std::swap(a[i], a[j]);
    }
  }
  const double sign = inverse ? 1.0 : -1.0;
  ComplexVec twiddle(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    twiddle[k] = std::polar(1.0, sign * 2.0 * std::numbers::pi *
                                     static_cast<double>(k) / static_cast<double>(n));
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t stride = n / len;
    for (std::size_t base = 0; base < n; base += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[base + k];
        const std::complex<double> v = a[base + k + len / 2] * twiddle[k * stride];
        a[base + k] = u + v;
        a[base + k + len / 2] = u - v;
      }
    }
  }
}

ComplexVec dft_direct(const ComplexVec& x, bool inverse) {
  const std::size_t n = x.size();
  const double sign = inverse ? 1.0 : -1.0;
  ComplexVec out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      // k*m reduced mod n keeps the angle argument small and accurate.
      const std::size_t phase = (k * m) % n;
      acc += x[m] * std::polar(1.0, sign * 2.0 * std::numbers::pi *
                                        static_cast<double>(phase) / static_cast<double>(n));
    }
    out[k] = acc;
  }
  return out;
}

ComplexVec transform(ComplexVec x, bool inverse) {
  if (x.empty()) {
    throw std::invalid_argument("dft: input must be nonempty");
  }
  if (is_power_of_two(x.size())) {
    fft_radix2(x, inverse);
  } else {
    x = dft_direct(x, inverse);
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(x.size()));
  for (auto& v : x) {
    v *= scale;
  }
  return x;
}

}  // namespace

ComplexVec dft_forward(ComplexVec x) { return transform(std::move(x), false); }

ComplexVec dft_inverse(ComplexVec x) { return transform(std::move(x), true); }

}  // namespace desat
