#include "desat/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "desat/rng.hpp"

namespace desat {

namespace {

double mean_power(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) {
    acc += v * v;
  }
  return x.empty() ? 0.0 : acc / static_cast<double>(x.size());
}

double rms(std::span<const double> x) { return std::sqrt(mean_power(x)); }

}  // namespace

void SaturationThresholds::validate() const {
  if (!(std::isfinite(t0) && std::isfinite(t1) && t0 < t1)) {
    throw std::invalid_argument("SaturationThresholds: need finite t0 < t1");
  }
}

SaturationThresholds SaturationThresholds::symmetric(double gamma) {
  if (!(std::isfinite(gamma) && gamma > 0.0)) {
    throw std::invalid_argument("SaturationThresholds: gamma must be positive");
  }
  return {-gamma, gamma};
}

SaturatedStream clip(std::span<const double> signal, const SaturationThresholds& thr) {
  thr.validate();
  SaturatedStream out;
  out.locations.resize(signal.size());
  out.values.resize(signal.size());
  out.flags.resize(signal.size());
  for (std::size_t i = 0; i < signal.size(); ++i) {
    out.locations[i] = static_cast<double>(i);
    const double v = signal[i];
    if (v <= thr.t0) {
      out.values[i] = thr.t0;
      out.flags[i] = SampleFlag::ClippedLow;
    } else if (v >= thr.t1) {
      out.values[i] = thr.t1;
      out.flags[i] = SampleFlag::ClippedHigh;
    } else {
      out.values[i] = v;
      out.flags[i] = SampleFlag::Ok;
    }
  }
  return out;
}

double clipping_ratio(double gamma, const SaturatedStream& clipped) {
  if (!(std::isfinite(gamma) && gamma > 0.0)) {
    throw std::invalid_argument("clipping_ratio: gamma must be positive");
  }
  const double r = rms(clipped.values);
  if (!(r > 0.0)) {
    throw std::invalid_argument("clipping_ratio: stream RMS must be positive");
  }
  return gamma / r;
}

double gamma_for_target_cr(std::span<const double> signal, double target_cr) {
  if (!(std::isfinite(target_cr) && target_cr > 0.0)) {
    throw std::invalid_argument("gamma_for_target_cr: target must be positive");
  }
  const double r = rms(signal);
  if (!(r > 0.0)) {
    throw std::invalid_argument("gamma_for_target_cr: signal RMS must be positive");
  }
  return target_cr * r;
}

std::vector<double> awgn(std::vector<double> signal, double snr_db, std::uint64_t seed) {
  if (signal.empty()) {
    throw std::invalid_argument("awgn: signal must be nonempty");
  }
  if (snr_db == std::numeric_limits<double>::infinity()) {
    return signal;
  }
  const double sigma = std::sqrt(mean_power(signal) / std::pow(10.0, snr_db / 10.0));
  Rng rng(seed);
  for (double& v : signal) {
    v += sigma * rng.normal();
  }
  return signal;
}

ComplexVec awgn(ComplexVec signal, double snr_db, std::uint64_t seed) {
  if (signal.empty()) {
    throw std::invalid_argument("awgn: signal must be nonempty");
  }
  if (snr_db == std::numeric_limits<double>::infinity()) {
    return signal;
  }
  auto [i, q] = split_iq(signal);
  const double lin = std::pow(10.0, snr_db / 10.0);
  const double sigma_i = std::sqrt(mean_power(i) / lin);
  const double sigma_q = std::sqrt(mean_power(q) / lin);
  Rng rng(seed);
  for (auto& v : signal) {
    const double ni = sigma_i * rng.normal();
    const double nq = sigma_q * rng.normal();
    v += std::complex<double>(ni, nq);
  }
  return signal;
}

void ChannelResponse::validate() const {
  if (freq_hz.size() < 2 || freq_hz.size() != mag_db.size()) {
    throw std::invalid_argument("ChannelResponse: need at least two (freq, mag) rows");
  }
  if (!phase_rad.empty() && phase_rad.size() != freq_hz.size()) {
    throw std::invalid_argument("ChannelResponse: phase column length mismatch");
  }
  for (std::size_t i = 0; i < freq_hz.size(); ++i) {
    if (!(std::isfinite(freq_hz[i]) && freq_hz[i] >= 0.0) || !std::isfinite(mag_db[i]) ||
        (!phase_rad.empty() && !std::isfinite(phase_rad[i]))) {
      throw std::invalid_argument("ChannelResponse: entries must be finite, freqs nonnegative");
    }
    if (i > 0 && !(freq_hz[i] > freq_hz[i - 1])) {
      throw std::invalid_argument("ChannelResponse: frequencies must be strictly increasing");
    }
  }
}

std::complex<double> ChannelResponse::at(double f_hz) const {
  if (f_hz < 0.0) {
    return std::conj(at(-f_hz));
  }
  const double lo = freq_hz.front();
  const double hi = freq_hz.back();
  // Tolerate one part in 1e9 at the ends so bin frequencies computed with
  // different arithmetic than the grid still resolve.
  const double slack = 1e-9 * std::max(std::abs(hi), 1.0);
  double f = f_hz;
  if (f < lo) {
    if (f < lo - slack) {
      throw std::out_of_range("ChannelResponse: frequency " + std::to_string(f_hz) +
                              " Hz below the sampled grid");
    }
    f = lo;
  } else if (f > hi) {
    if (f > hi + slack) {
      throw std::out_of_range("ChannelResponse: frequency " + std::to_string(f_hz) +
                              " Hz above the sampled grid");
    }
    f = hi;
  }
  auto it = std::upper_bound(freq_hz.begin(), freq_hz.end(), f);
  std::size_t seg = it == freq_hz.end() ? freq_hz.size() - 1
                                        : static_cast<std::size_t>(it - freq_hz.begin());
  if (seg == 0) {
    seg = 1;
  }
  const double f0 = freq_hz[seg - 1];
  const double f1 = freq_hz[seg];
  const double t = (f - f0) / (f1 - f0);
  const double mag = mag_db[seg - 1] + t * (mag_db[seg] - mag_db[seg - 1]);
  double phase = 0.0;
  if (!phase_rad.empty()) {
    phase = phase_rad[seg - 1] + t * (phase_rad[seg] - phase_rad[seg - 1]);
  }
  return std::polar(std::pow(10.0, mag / 20.0), phase);
}

ChannelResponse ChannelResponse::synthetic_loss(double sqrt_db_per_sqrt_ghz,
                                                double linear_db_per_ghz, double f_max_hz,
                                                std::size_t points) {
  if (!(f_max_hz > 0.0) || points < 2) {
    throw std::invalid_argument("synthetic_loss: need positive f_max and >= 2 points");
  }
  ChannelResponse r;
  r.freq_hz.resize(points);
  r.mag_db.resize(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double f = f_max_hz * static_cast<double>(i) / static_cast<double>(points - 1);
    const double g = f / 1e9;
    r.freq_hz[i] = f;
    r.mag_db[i] = -(sqrt_db_per_sqrt_ghz * std::sqrt(g) + linear_db_per_ghz * g);
  }
  return r;
}

ChannelResponse ChannelResponse::calibrated_loss(double target_loss_db, double f_edge_hz,
                                                 double f_max_hz) {
  if (!(target_loss_db > 0.0 && f_edge_hz > 0.0)) {
    throw std::invalid_argument("calibrated_loss: loss and edge frequency must be positive");
  }
  const double sqrt_term = 4.0;
  const double g_edge = f_edge_hz / 1e9;
  const double linear_term = (target_loss_db - sqrt_term * std::sqrt(g_edge)) / g_edge;
  return synthetic_loss(sqrt_term, linear_term, f_max_hz);
}

namespace {

ComplexVec apply_channel_complex(ComplexVec signal, const ChannelResponse& response,
                                 double sample_rate_hz) {
  response.validate();
  if (signal.empty()) {
    throw std::invalid_argument("apply_channel: signal must be nonempty");
  }
  if (!(sample_rate_hz > 0.0)) {
    throw std::invalid_argument("apply_channel: sample rate must be positive");
  }
  const int n = static_cast<int>(signal.size());
  ComplexVec spectrum = dft_forward(std::move(signal));
  for (int k = 0; k < n; ++k) {
    const int shifted = 2 * k <= n ? k : k - n;
    const double f = static_cast<double>(shifted) * sample_rate_hz / static_cast<double>(n);
    spectrum[static_cast<std::size_t>(k)] *= response.at(f);
  }
  return dft_inverse(std::move(spectrum));
}

}  // namespace

std::vector<double> apply_channel(const std::vector<double>& signal,
                                  const ChannelResponse& response, double sample_rate_hz) {
  ComplexVec promoted(signal.size());
  for (std::size_t i = 0; i < signal.size(); ++i) {
    promoted[i] = signal[i];
  }
  const ComplexVec out = apply_channel_complex(std::move(promoted), response, sample_rate_hz);
  std::vector<double> real_out(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    real_out[i] = out[i].real();
  }
  return real_out;
}

ComplexVec apply_channel(const ComplexVec& signal, const ChannelResponse& response,
                         double sample_rate_hz) {
  return apply_channel_complex(signal, response, sample_rate_hz);
}

SymbolFrame equalize(SymbolFrame frame, const ChannelResponse& response,
                     const OfdmConfig& config, double sample_rate_hz) {
  config.validate();
  response.validate();
  if (frame.symbols.size() != static_cast<std::size_t>(config.n_taps)) {
    throw std::invalid_argument("equalize: frame length mismatch");
  }
  if (!(sample_rate_hz > 0.0)) {
    throw std::invalid_argument("equalize: sample rate must be positive");
  }
  for (int c : config.active_carriers) {
    const int shifted = 2 * c <= config.n_taps ? c : c - config.n_taps;
    const double f =
        static_cast<double>(shifted) * sample_rate_hz / static_cast<double>(config.n_taps);
    const std::complex<double> h = response.at(f);
    if (std::abs(h) < 1e-12) {
      throw std::invalid_argument("equalize: response vanishes at carrier " +
                                  std::to_string(c));
    }
    frame.symbols[static_cast<std::size_t>(c)] /= h;
  }
  return frame;
}

double quantizer_step(int bits, double full_scale) {
  if (bits < 1 || bits > 30) {
    throw std::invalid_argument("quantizer: bits must lie in [1, 30]");
  }
  if (!(std::isfinite(full_scale) && full_scale > 0.0)) {
    throw std::invalid_argument("quantizer: full_scale must be positive");
  }
  return std::ldexp(2.0 * full_scale, -bits);
}

std::vector<double> quantize(std::vector<double> signal, int bits, double full_scale) {
  const double step = quantizer_step(bits, full_scale);
  const double code_lo = -std::ldexp(1.0, bits - 1);
  const double code_hi = std::ldexp(1.0, bits - 1) - 1.0;
  for (double& v : signal) {
    const double code = std::clamp(std::round(v / step), code_lo, code_hi);
    v = code * step;
  }
  return signal;
}

double enob_noise_sigma(double signal_power, double target_sinad_db, double step) {
  if (!(signal_power > 0.0) || !(step > 0.0)) {
    throw std::invalid_argument("enob_noise_sigma: power and step must be positive");
  }
  const double total_noise = signal_power / std::pow(10.0, target_sinad_db / 10.0);
  const double quant_noise = step * step / 12.0;
  return std::sqrt(std::max(0.0, total_noise - quant_noise));
}

}  // namespace desat
