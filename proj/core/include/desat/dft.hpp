#pragma once

#include <complex>
#include <vector>

namespace desat {

using ComplexVec = std::vector<std::complex<double>>;

// Unitary discrete Fourier transform: both directions scale by 1/sqrt(N), so
// a round trip is the identity and Parseval holds with no bookkeeping.
// Power-of-two lengths run on an iterative radix-2 path; other lengths fall
// back to the direct O(N^2) sum (sizes here are small).
ComplexVec dft_forward(ComplexVec x);
ComplexVec dft_inverse(ComplexVec x);

}  // namespace desat
