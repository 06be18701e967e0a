#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "desat/declip.hpp"
#include "desat/dft.hpp"
#include "desat/ofdm.hpp"

namespace desat {

struct SaturationThresholds {
  double t0;
  double t1;

  void validate() const;
  static SaturationThresholds symmetric(double gamma);
};

// Hard limiter: values <= t0 pin to (t0, lo), values >= t1 pin to (t1, hi),
// the open interval passes through untouched. Locations are sample indices.
SaturatedStream clip(std::span<const double> signal, const SaturationThresholds& thr);

// CR = gamma / RMS of the clipped values.
double clipping_ratio(double gamma, const SaturatedStream& clipped);

// gamma = target_cr * RMS of the unclipped signal. The achieved ratio per
// clipping_ratio comes out slightly above target because clipping lowers the
// RMS; callers report the achieved value.
double gamma_for_target_cr(std::span<const double> signal, double target_cr);

// Additive white Gaussian noise at the requested SNR; +infinity passes the
// signal through. Noise variance is signal power / 10^(snr_db/10), measured
// and applied per real channel.
std::vector<double> awgn(std::vector<double> signal, double snr_db, std::uint64_t seed);
ComplexVec awgn(ComplexVec signal, double snr_db, std::uint64_t seed);

// Frequency response sampled on a nonnegative grid; magnitudes in dB, phases
// in radians (an empty phase vector means zero phase, i.e. a pure zero
// delay). Negative frequencies evaluate to the conjugate. Queries beyond the
// grid throw std::out_of_range.
struct ChannelResponse {
  std::vector<double> freq_hz;
  std::vector<double> mag_db;
  std::vector<double> phase_rad;  // empty or same length as freq_hz

  void validate() const;
  std::complex<double> at(double f_hz) const;

  // Insertion-loss model mag_db(f) = -(a*sqrt(f_GHz) + b*f_GHz) sampled on a
  // uniform grid over [0, f_max].
  static ChannelResponse synthetic_loss(double sqrt_db_per_sqrt_ghz, double linear_db_per_ghz,
                                        double f_max_hz, std::size_t points = 1025);
  // Same model with the sqrt term fixed at 4 dB/sqrt(GHz) and the linear term
  // solved so the loss at f_edge equals target_loss_db.
  static ChannelResponse calibrated_loss(double target_loss_db, double f_edge_hz,
                                         double f_max_hz);
};

// Multiplies the signal spectrum by the interpolated response. The sample
// rate maps DFT bins to hertz; bins above Nyquist take the conjugate via
// their negative frequency.
std::vector<double> apply_channel(const std::vector<double>& signal,
                                  const ChannelResponse& response, double sample_rate_hz);
ComplexVec apply_channel(const ComplexVec& signal, const ChannelResponse& response,
                         double sample_rate_hz);

// Divides each active-carrier symbol by the response at that carrier.
SymbolFrame equalize(SymbolFrame frame, const ChannelResponse& response,
                     const OfdmConfig& config, double sample_rate_hz);

// Uniform mid-tread quantizer over [-full_scale, +full_scale] with 2^bits
// levels; out-of-range values saturate to the extreme codes.
std::vector<double> quantize(std::vector<double> signal, int bits, double full_scale);

// Quantizer step size 2*full_scale / 2^bits.
double quantizer_step(int bits, double full_scale);

// Standard deviation of the additive noise that, stacked on quantization
// noise step^2/12, brings SINAD down to the target. Zero when quantization
// noise alone already exceeds the target.
double enob_noise_sigma(double signal_power, double target_sinad_db, double step);

}  // namespace desat
