#pragma once

#include <utility>
#include <vector>

#include "desat/dft.hpp"

namespace desat {

enum class OfdmMode { Wireless, Wireline };

// Transmitter/receiver parameters. Wireless mode sends an unconstrained
// complex baseband signal; wireline mode enforces Hermitian symmetry so the
// time-domain signal is real.
struct OfdmConfig {
  OfdmMode mode = OfdmMode::Wireless;
  int n_taps = 32;
  std::vector<int> active_carriers;  // strictly increasing, each in [0, n_taps)
  int qam_order = 64;
  int cp_len = 0;
  bool dc_zeroed = true;

  void validate() const;
  bool self_conjugate(int carrier) const;  // DC or Nyquist bin
  // Carriers that carry independent data, in bit-packing order. In wireline
  // mode the upper mirrors are derived, not packed.
  std::vector<int> data_carriers() const;
  int bits_per_symbol() const;
};

struct SymbolFrame {
  ComplexVec symbols;     // length n_taps; inactive carriers exactly zero
  std::vector<int> bits;  // source bits; empty on the receive side
};

// K for order = 2^K; throws unless order is an even power of two >= 4.
int qam_bits(int order);

// Per-axis reflected-Gray square QAM, unit average constellation energy.
ComplexVec qam_encode(const std::vector<int>& bits, int order);
std::vector<int> qam_decode(const ComplexVec& points, int order);

// One QAM axis on its own: self-conjugate carriers carry K/2 bits as real
// PAM (unit average energy) so the spectrum stays Hermitian.
double pam_encode(const std::vector<int>& bits, int order);
std::vector<int> pam_decode(double value, int order);

SymbolFrame frame_from_bits(const std::vector<int>& bits, const OfdmConfig& config);
std::vector<int> bits_from_frame(const SymbolFrame& frame, const OfdmConfig& config);

// IDFT of the assembled spectrum with the cyclic prefix prepended. Wireline
// frames come out with |imag| <= 1e-12; modulate_real strips it after
// checking.
ComplexVec modulate(const SymbolFrame& frame, const OfdmConfig& config);
std::vector<double> modulate_real(const SymbolFrame& frame, const OfdmConfig& config);

// Cyclic-prefix removal followed by the forward DFT. Inactive carriers are
// reported too (distortion leaks into them), so the result is a full
// spectrum, not just the active set.
SymbolFrame demodulate(const ComplexVec& signal, const OfdmConfig& config);
SymbolFrame demodulate(const std::vector<double>& signal, const OfdmConfig& config);

std::pair<std::vector<double>, std::vector<double>> split_iq(const ComplexVec& signal);
ComplexVec merge_iq(const std::vector<double>& in_phase, const std::vector<double>& quadrature);

// Peak instantaneous power over mean power, linear scale.
double papr(const ComplexVec& signal);
double papr(const std::vector<double>& signal);

}  // namespace desat
