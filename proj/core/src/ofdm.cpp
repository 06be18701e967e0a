#include "desat/ofdm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace desat {

namespace {

int gray_code(int i) { return i ^ (i >> 1); }

int gray_decode(int v) {
  int i = v;
  for (int shift = v >> 1; shift != 0; shift >>= 1) {
    i ^= shift;
  }
  return i;
}

int bits_to_int(const int* bits, int count) {
  int v = 0;
  for (int b = 0; b < count; ++b) {
    if (bits[b] != 0 && bits[b] != 1) {
      throw std::invalid_argument("bits must be 0 or 1");
    }
    v = (v << 1) | bits[b];
  }
  return v;
}

void int_to_bits(int v, int count, std::vector<int>& out) {
  for (int b = count - 1; b >= 0; --b) {
    out.push_back((v >> b) & 1);
  }
}

// Amplitude of one Gray-labelled axis: label bits v on an m-level axis map to
// level index gray_decode(v), amplitudes m-1, m-3, ..., -(m-1).
double axis_amplitude(int v, int m) { return static_cast<double>(m - 1 - 2 * gray_decode(v)); }

// Nearest level index for amplitude y; exact midpoints resolve toward the
// smaller Gray label.
int axis_slice(double y, int m) {
  const double pos = (static_cast<double>(m - 1) - y) / 2.0;
  double lo_d = std::floor(pos);
  lo_d = std::clamp(lo_d, 0.0, static_cast<double>(m - 1));
  int lo = static_cast<int>(lo_d);
  int hi = std::min(lo + 1, m - 1);
  const double d_lo = std::abs(pos - lo);
  const double d_hi = std::abs(pos - hi);
  if (d_lo < d_hi) {
    return lo;
  }
  if (d_hi < d_lo) {
    return hi;
  }
  return gray_code(lo) < gray_code(hi) ? lo : hi;
}

double qam_scale(int m) {
  // Mean energy over the square constellation is 2(m^2-1)/3.
  return 1.0 / std::sqrt(2.0 * (static_cast<double>(m) * m - 1.0) / 3.0);
}

double pam_scale(int m) {
  return 1.0 / std::sqrt((static_cast<double>(m) * m - 1.0) / 3.0);
}

}  // namespace

int qam_bits(int order) {
  if (order < 4) {
    throw std::invalid_argument("qam order must be at least 4");
  }
  int k = 0;
  int v = order;
  while (v > 1) {
    if (v % 2 != 0) {
      throw std::invalid_argument("qam order must be a power of two");
    }
    v /= 2;
    ++k;
  }
  if (k % 2 != 0) {
    throw std::invalid_argument("qam order must be square (even power of two)");
  }
  return k;
}

ComplexVec qam_encode(const std::vector<int>& bits, int order) {
  const int k = qam_bits(order);
  if (bits.size() % static_cast<std::size_t>(k) != 0) {
    throw std::invalid_argument("bit count must be divisible by bits-per-symbol");
  }
  const int half = k / 2;
  const int m = 1 << half;
  const double scale = qam_scale(m);
  ComplexVec out;
  out.reserve(bits.size() / static_cast<std::size_t>(k));
  for (std::size_t p = 0; p + static_cast<std::size_t>(k) <= bits.size();
       p += static_cast<std::size_t>(k)) {
    const int vi = bits_to_int(bits.data() + p, half);
    const int vq = bits_to_int(bits.data() + p + half, half);
    out.emplace_back(scale * axis_amplitude(vi, m), scale * axis_amplitude(vq, m));
  }
  return out;
}

std::vector<int> qam_decode(const ComplexVec& points, int order) {
  const int k = qam_bits(order);
  const int half = k / 2;
  const int m = 1 << half;
  const double inv_scale = 1.0 / qam_scale(m);
  std::vector<int> bits;
  bits.reserve(points.size() * static_cast<std::size_t>(k));
  for (const auto& p : points) {
    const int ii = axis_slice(p.real() * inv_scale, m);
    const int iq = axis_slice(p.imag() * inv_scale, m);
    int_to_bits(gray_code(ii), half, bits);
    int_to_bits(gray_code(iq), half, bits);
  }
  return bits;
}

double pam_encode(const std::vector<int>& bits, int order) {
  const int half = qam_bits(order) / 2;
  if (bits.size() != static_cast<std::size_t>(half)) {
    throw std::invalid_argument("pam_encode expects bits-per-axis bits");
  }
  const int m = 1 << half;
  return pam_scale(m) * axis_amplitude(bits_to_int(bits.data(), half), m);
}

std::vector<int> pam_decode(double value, int order) {
  const int half = qam_bits(order) / 2;
  const int m = 1 << half;
  std::vector<int> bits;
  int_to_bits(gray_code(axis_slice(value / pam_scale(m), m)), half, bits);
  return bits;
}

void OfdmConfig::validate() const {
  if (n_taps < 2) {
    throw std::invalid_argument("OfdmConfig: n_taps must be at least 2");
  }
  qam_bits(qam_order);
  if (cp_len < 0 || cp_len > n_taps) {
    throw std::invalid_argument("OfdmConfig: cp_len must lie in [0, n_taps]");
  }
  if (active_carriers.empty()) {
    throw std::invalid_argument("OfdmConfig: need at least one active carrier");
  }
  for (std::size_t i = 0; i < active_carriers.size(); ++i) {
    const int c = active_carriers[i];
    if (c < 0 || c >= n_taps) {
      throw std::invalid_argument("OfdmConfig: carrier index out of range");
    }
    if (i > 0 && c <= active_carriers[i - 1]) {
      throw std::invalid_argument("OfdmConfig: carriers must be strictly increasing");
    }
  }
  if (dc_zeroed && std::binary_search(active_carriers.begin(), active_carriers.end(), 0)) {
    throw std::invalid_argument("OfdmConfig: dc_zeroed forbids carrier 0");
  }
  if (mode == OfdmMode::Wireline) {
    for (int c : active_carriers) {
      const int mirror = (n_taps - c) % n_taps;
      if (!std::binary_search(active_carriers.begin(), active_carriers.end(), mirror)) {
        throw std::invalid_argument(
            "OfdmConfig: wireline carriers must be conjugate-consistent (carrier " +
            std::to_string(c) + " lacks mirror " + std::to_string(mirror) + ")");
      }
    }
  }
}

bool OfdmConfig::self_conjugate(int carrier) const {
  return carrier == 0 || 2 * carrier == n_taps;
}

std::vector<int> OfdmConfig::data_carriers() const {
  if (mode == OfdmMode::Wireless) {
    return active_carriers;
  }
  std::vector<int> out;
  for (int c : active_carriers) {
    if (2 * c <= n_taps) {
      out.push_back(c);
    }
  }
  return out;
}

int OfdmConfig::bits_per_symbol() const {
  const int k = qam_bits(qam_order);
  int total = 0;
  for (int c : data_carriers()) {
    total += (mode == OfdmMode::Wireline && self_conjugate(c)) ? k / 2 : k;
  }
  return total;
}

SymbolFrame frame_from_bits(const std::vector<int>& bits, const OfdmConfig& config) {
  config.validate();
  if (bits.size() != static_cast<std::size_t>(config.bits_per_symbol())) {
    throw std::invalid_argument("frame_from_bits: expected " +
                                std::to_string(config.bits_per_symbol()) + " bits, got " +
                                std::to_string(bits.size()));
  }
  const int k = qam_bits(config.qam_order);
  SymbolFrame frame;
  frame.symbols.assign(static_cast<std::size_t>(config.n_taps), 0.0);
  frame.bits = bits;
  std::size_t pos = 0;
  for (int c : config.data_carriers()) {
    if (config.mode == OfdmMode::Wireline && config.self_conjugate(c)) {
      const std::vector<int> chunk(bits.begin() + static_cast<std::ptrdiff_t>(pos),
                                   bits.begin() + static_cast<std::ptrdiff_t>(pos + k / 2));
      frame.symbols[static_cast<std::size_t>(c)] = pam_encode(chunk, config.qam_order);
      pos += static_cast<std::size_t>(k / 2);
    } else {
      const std::vector<int> chunk(bits.begin() + static_cast<std::ptrdiff_t>(pos),
                                   bits.begin() + static_cast<std::ptrdiff_t>(pos + k));
      const auto point = qam_encode(chunk, config.qam_order).front();
      frame.symbols[static_cast<std::size_t>(c)] = point;
      if (config.mode == OfdmMode::Wireline) {
        frame.symbols[static_cast<std::size_t>(config.n_taps - c)] = std::conj(point);
      }
      pos += static_cast<std::size_t>(k);
    }
  }
  return frame;
}

std::vector<int> bits_from_frame(const SymbolFrame& frame, const OfdmConfig& config) {
  config.validate();
  if (frame.symbols.size() != static_cast<std::size_t>(config.n_taps)) {
    throw std::invalid_argument("bits_from_frame: frame length mismatch");
  }
  std::vector<int> bits;
  bits.reserve(static_cast<std::size_t>(config.bits_per_symbol()));
  for (int c : config.data_carriers()) {
    const std::complex<double> sym = frame.symbols[static_cast<std::size_t>(c)];
    if (config.mode == OfdmMode::Wireline && config.self_conjugate(c)) {
      const auto chunk = pam_decode(sym.real(), config.qam_order);
      bits.insert(bits.end(), chunk.begin(), chunk.end());
    } else {
      const auto chunk = qam_decode({sym}, config.qam_order);
      bits.insert(bits.end(), chunk.begin(), chunk.end());
    }
  }
  return bits;
}

ComplexVec modulate(const SymbolFrame& frame, const OfdmConfig& config) {
  config.validate();
  if (frame.symbols.size() != static_cast<std::size_t>(config.n_taps)) {
    throw std::invalid_argument("modulate: frame length mismatch");
  }
  std::size_t next_active = 0;
  for (int c = 0; c < config.n_taps; ++c) {
    const bool active = next_active < config.active_carriers.size() &&
                        config.active_carriers[next_active] == c;
    if (active) {
      ++next_active;
    } else if (frame.symbols[static_cast<std::size_t>(c)] != std::complex<double>(0.0, 0.0)) {
      throw std::invalid_argument("modulate: inactive carrier " + std::to_string(c) +
                                  " must be exactly zero");
    }
  }
  ComplexVec core = dft_inverse(frame.symbols);
  ComplexVec out;
  out.reserve(core.size() + static_cast<std::size_t>(config.cp_len));
  out.insert(out.end(), core.end() - config.cp_len, core.end());
  out.insert(out.end(), core.begin(), core.end());
  return out;
}

std::vector<double> modulate_real(const SymbolFrame& frame, const OfdmConfig& config) {
  if (config.mode != OfdmMode::Wireline) {
    throw std::invalid_argument("modulate_real requires wireline mode");
  }
  const ComplexVec signal = modulate(frame, config);
  std::vector<double> out(signal.size());
  for (std::size_t i = 0; i < signal.size(); ++i) {
    if (std::abs(signal[i].imag()) > 1e-12) {
      throw std::logic_error("modulate_real: Hermitian assembly produced imaginary output");
    }
    out[i] = signal[i].real();
  }
  return out;
}

SymbolFrame demodulate(const ComplexVec& signal, const OfdmConfig& config) {
  config.validate();
  if (signal.size() != static_cast<std::size_t>(config.n_taps + config.cp_len)) {
    throw std::invalid_argument("demodulate: expected " +
                                std::to_string(config.n_taps + config.cp_len) +
                                " samples, got " + std::to_string(signal.size()));
  }
  ComplexVec core(signal.begin() + config.cp_len, signal.end());
  return SymbolFrame{dft_forward(std::move(core)), {}};
}

SymbolFrame demodulate(const std::vector<double>& signal, const OfdmConfig& config) {
  ComplexVec promoted(signal.size());
  for (std::size_t i = 0; i < signal.size(); ++i) {
    promoted[i] = signal[i];
  }
  return demodulate(promoted, config);
}

std::pair<std::vector<double>, std::vector<double>> split_iq(const ComplexVec& signal) {
  std::vector<double> i(signal.size());
  std::vector<double> q(signal.size());
  for (std::size_t n = 0; n < signal.size(); ++n) {
    i[n] = signal[n].real();
    q[n] = signal[n].imag();
  }
  return {std::move(i), std::move(q)};
}

ComplexVec merge_iq(const std::vector<double>& in_phase, const std::vector<double>& quadrature) {
  if (in_phase.size() != quadrature.size()) {
    throw std::invalid_argument("merge_iq: channel lengths must agree");
  }
  ComplexVec out(in_phase.size());
  for (std::size_t n = 0; n < out.size(); ++n) {
    out[n] = {in_phase[n], quadrature[n]};
  }
  return out;
}

namespace {

template <typename Power>
double papr_impl(std::size_t n, Power&& power) {
  if (n == 0) {
    throw std::invalid_argument("papr: signal must be nonempty");
  }
  double peak = 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = power(i);
    peak = std::max(peak, p);
    sum += p;
  }
  if (sum == 0.0) {
    throw std::invalid_argument("papr: signal must not be all zero");
  }
  return peak / (sum / static_cast<double>(n));
}

}  // namespace

double papr(const ComplexVec& signal) {
  return papr_impl(signal.size(), [&](std::size_t i) { return std::norm(signal[i]); });
}

double papr(const std::vector<double>& signal) {
  return papr_impl(signal.size(), [&](std::size_t i) { return signal[i] * signal[i]; });
}

}  // namespace desat
