#include <desat/channel.hpp>
#include <desat/rng.hpp>

#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include "oracles.hpp"

using namespace desat;
using std::numbers::pi;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> coherent_sine(std::size_t n, int cycles, double amplitude) {
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = amplitude * std::sin(2.0 * pi * cycles * static_cast<double>(i) /
                                static_cast<double>(n));
  }
  return s;
}

}  // namespace

TEST_SUITE_BEGIN("channel");

TEST_CASE("threshold construction and validation") {
  const auto thr = SaturationThresholds::symmetric(2.0);
  CHECK(thr.t0 == -2.0);
  CHECK(thr.t1 == 2.0);
  CHECK_THROWS_AS(SaturationThresholds::symmetric(0.0), std::invalid_argument);
  CHECK_THROWS_AS(SaturationThresholds::symmetric(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(SaturationThresholds::symmetric(std::nan("")), std::invalid_argument);
  CHECK_THROWS_AS((SaturationThresholds{1.0, 1.0}.validate()), std::invalid_argument);
}

TEST_CASE("clip pins values at the thresholds and passes the open interval") {
  const std::vector<double> signal{0.0, 1.9, 2.0, 2.5, -1.9, -2.0, -3.0};
  const auto clipped = clip(signal, SaturationThresholds::symmetric(2.0));
  REQUIRE(clipped.size() == signal.size());
  for (std::size_t i = 0; i < signal.size(); ++i) {
    CHECK(clipped.locations[i] == static_cast<double>(i));
  }
  CHECK(clipped.flags[0] == SampleFlag::Ok);
  CHECK(clipped.flags[1] == SampleFlag::Ok);
  CHECK(clipped.flags[2] == SampleFlag::ClippedHigh);  // boundary clips
  CHECK(clipped.flags[3] == SampleFlag::ClippedHigh);
  CHECK(clipped.flags[4] == SampleFlag::Ok);
  CHECK(clipped.flags[5] == SampleFlag::ClippedLow);
  CHECK(clipped.flags[6] == SampleFlag::ClippedLow);
  CHECK(clipped.values[3] == 2.0);
  CHECK(clipped.values[6] == -2.0);
  CHECK(clipped.values[1] == 1.9);
  CHECK_NOTHROW(clipped.validate());

  // Clipping its own output changes nothing.
  const auto twice = clip(clipped.values, SaturationThresholds::symmetric(2.0));
  CHECK(twice.values == clipped.values);
  for (double v : clipped.values) {
    CHECK(v >= -2.0);
    CHECK(v <= 2.0);
  }
}

TEST_CASE("clipping ratio is gamma over the clipped RMS") {
  const std::vector<double> signal{1.0, -1.0};
  const auto clipped = clip(signal, SaturationThresholds::symmetric(2.0));
  CHECK(clipping_ratio(2.0, clipped) == doctest::Approx(2.0).epsilon(1e-14));

  const std::vector<double> spiky{1.0, -1.0, 3.0};
  const auto spiky_clipped = clip(spiky, SaturationThresholds::symmetric(2.0));
  CHECK(oracles::rms(spiky_clipped.values) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(clipping_ratio(2.0, spiky_clipped) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

  // Scale invariance: scaling signal and gamma together leaves CR fixed.
  const std::vector<double> scaled{5.0, -5.0, 15.0};
  const auto scaled_clipped = clip(scaled, SaturationThresholds::symmetric(10.0));
  CHECK(clipping_ratio(10.0, scaled_clipped) ==
        doctest::Approx(clipping_ratio(2.0, spiky_clipped)).epsilon(1e-14));

  CHECK_THROWS_AS(clipping_ratio(0.0, clipped), std::invalid_argument);
}

TEST_CASE("gamma targets the unclipped RMS") {
  const auto sine = coherent_sine(1024, 3, std::sqrt(2.0));  // unit RMS
  CHECK(oracles::rms(sine) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(gamma_for_target_cr(sine, 10.0) == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(gamma_for_target_cr(sine, 1.31) == doctest::Approx(1.31).epsilon(1e-12));

  // A target above the crest factor yields no clipping at all.
  const auto none = clip(sine, SaturationThresholds::symmetric(gamma_for_target_cr(sine, 10.0)));
  for (auto f : none.flags) {
    CHECK(f == SampleFlag::Ok);
  }

  // Achieved CR (gamma over clipped RMS) rises with the target and never
  // falls below it.
  double prev = 0.0;
  for (double target : {1.1, 1.2, 1.5, 2.0}) {
    const double gamma = gamma_for_target_cr(sine, target);
    const double achieved = clipping_ratio(gamma, clip(sine, SaturationThresholds::symmetric(gamma)));
    CHECK(achieved >= target - 1e-12);
    CHECK(achieved > prev);
    prev = achieved;
  }

  CHECK_THROWS_AS(gamma_for_target_cr(sine, 0.0), std::invalid_argument);
  const std::vector<double> zeros(8, 0.0);
  CHECK_THROWS_AS(gamma_for_target_cr(zeros, 1.5), std::invalid_argument);
}

TEST_CASE("awgn at infinite SNR is the identity") {
  const std::vector<double> signal{1.0, -2.0, 3.0};
  CHECK(awgn(signal, kInf, 42) == signal);
  const ComplexVec csig{{1.0, 2.0}, {-0.5, 0.25}};
  const auto out = awgn(csig, kInf, 42);
  CHECK(out[0] == csig[0]);
  CHECK(out[1] == csig[1]);
  CHECK_THROWS_AS(awgn(std::vector<double>{}, 20.0, 1), std::invalid_argument);
}

TEST_CASE("awgn is seed deterministic") {
  const std::vector<double> signal(64, 1.0);
  const auto a = awgn(signal, 15.0, 0x1234);
  const auto b = awgn(signal, 15.0, 0x1234);
  const auto c = awgn(signal, 15.0, 0x1235);
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("awgn hits the requested SNR on a long run") {
  const std::size_t n = 1'000'000;
  const std::vector<double> signal(n, 1.0);
  const auto noisy = awgn(signal, 20.0, 0xa0a0);
  double sum = 0.0;
  double power = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = noisy[i] - signal[i];
    sum += e;
    power += e * e;
  }
  const double mean = sum / static_cast<double>(n);
  const double var = power / static_cast<double>(n) - mean * mean;
  // sigma = 0.1: mean within 3 sigma/sqrt(N), variance within 3*sqrt(2/N)
  // relative.
  CHECK(std::abs(mean) < 3.0e-4);
  CHECK(std::abs(var / 0.01 - 1.0) < 3.0 * std::sqrt(2.0 / static_cast<double>(n)));
  const double measured_snr = 10.0 * std::log10(1.0 / var);
  CHECK(std::abs(measured_snr - 20.0) < 0.1);
}

TEST_CASE("complex awgn scales noise per rail") {
  const std::size_t n = 200'000;
  ComplexVec signal(n, {2.0, 1.0});
  const auto noisy = awgn(signal, 20.0, 0xb1b1);
  double var_i = 0.0;
  double var_q = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto e = noisy[i] - signal[i];
    var_i += e.real() * e.real();
    var_q += e.imag() * e.imag();
  }
  var_i /= static_cast<double>(n);
  var_q /= static_cast<double>(n);
  const double tol = 3.0 * std::sqrt(2.0 / static_cast<double>(n));
  CHECK(std::abs(var_i / 0.04 - 1.0) < tol);  // sigma_i = 2/10
  CHECK(std::abs(var_q / 0.01 - 1.0) < tol);  // sigma_q = 1/10
}

TEST_CASE("channel response validation") {
  ChannelResponse r;
  r.freq_hz = {0.0, 1.0};
  r.mag_db = {0.0, -3.0};
  CHECK_NOTHROW(r.validate());
  r.mag_db = {0.0};
  CHECK_THROWS_AS(r.validate(), std::invalid_argument);
  r.mag_db = {0.0, -3.0};
  r.phase_rad = {0.0};
  CHECK_THROWS_AS(r.validate(), std::invalid_argument);
  r.phase_rad.clear();
  r.freq_hz = {1.0, 0.5};
  CHECK_THROWS_AS(r.validate(), std::invalid_argument);
  r.freq_hz = {-1.0, 1.0};
  CHECK_THROWS_AS(r.validate(), std::invalid_argument);
}

TEST_CASE("response interpolation is linear in dB and phase") {
  ChannelResponse r;
  r.freq_hz = {0.0, 1.0};
  r.mag_db = {0.0, -20.0 * std::log10(2.0)};
  CHECK(std::abs(r.at(0.0) - std::complex<double>(1.0, 0.0)) < 1e-12);
  CHECK(std::abs(r.at(1.0)) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(r.at(0.5)) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));

  r.phase_rad = {0.0, pi / 2.0};
  const auto mid = r.at(0.5);
  CHECK(std::arg(mid) == doctest::Approx(pi / 4.0).epsilon(1e-12));
  // Negative frequencies take the conjugate.
  CHECK(std::abs(r.at(-0.5) - std::conj(mid)) < 1e-15);

  CHECK_THROWS_AS(r.at(1.5), std::out_of_range);
  CHECK_NOTHROW(r.at(1.0 * (1.0 + 5e-10)));  // end-point slack
}

TEST_CASE("synthetic loss follows the square-root-plus-linear model") {
  const auto r = ChannelResponse::synthetic_loss(4.0, 2.0, 16e9);
  CHECK(std::abs(r.at(0.0) - std::complex<double>(1.0, 0.0)) < 1e-12);
  // On-grid sample at 1 GHz (spacing 15.625 MHz divides it exactly).
  const double expect_db = -(4.0 * 1.0 + 2.0 * 1.0);
  CHECK(20.0 * std::log10(std::abs(r.at(1e9))) == doctest::Approx(expect_db).epsilon(1e-9));
  // Loss grows monotonically with frequency.
  double prev = 1.0;
  for (double f = 1e9; f <= 16e9; f += 1e9) {
    const double mag = std::abs(r.at(f));
    CHECK(mag < prev);
    prev = mag;
  }
}

TEST_CASE("calibrated loss hits the target at the edge frequency") {
  const auto r = ChannelResponse::calibrated_loss(11.0, 4.5e9, 12e9);
  const double loss_db = -20.0 * std::log10(std::abs(r.at(4.5e9)));
  CHECK(loss_db == doctest::Approx(11.0).epsilon(1e-4));
  CHECK_THROWS_AS(ChannelResponse::calibrated_loss(-1.0, 4.5e9, 12e9), std::invalid_argument);
}

TEST_CASE("a flat response passes signals through") {
  ChannelResponse flat;
  flat.freq_hz = {0.0, 32e9};
  flat.mag_db = {0.0, 0.0};
  Rng rng(0x0f0f);
  std::vector<double> signal(64);
  for (auto& v : signal) {
    v = rng.normal();
  }
  const auto out = apply_channel(signal, flat, 32e9);
  REQUIRE(out.size() == signal.size());
  for (std::size_t i = 0; i < signal.size(); ++i) {
    CHECK(out[i] == doctest::Approx(signal[i]).epsilon(1e-12));
  }
}

TEST_CASE("a cosine is scaled by the response magnitude at its bin") {
  const auto r = ChannelResponse::synthetic_loss(4.0, 2.0, 16e9);
  std::vector<double> signal(32);
  for (std::size_t i = 0; i < 32; ++i) {
    signal[i] = std::cos(2.0 * pi * 4.0 * static_cast<double>(i) / 32.0);
  }
  const auto out = apply_channel(signal, r, 32e9);  // bin 4 -> 4 GHz, on grid
  const double gain = std::abs(r.at(4e9));
  for (std::size_t i = 0; i < 32; ++i) {
    CHECK(out[i] == doctest::Approx(gain * signal[i]).epsilon(1e-9));
  }
}

TEST_CASE("equalize undoes the channel on the active carriers") {
  Rng rng(0xe4a1);
  OfdmConfig cfg;
  cfg.mode = OfdmMode::Wireline;
  cfg.n_taps = 32;
  cfg.active_carriers = {1, 2, 3, 4, 16, 28, 29, 30, 31};
  cfg.qam_order = 64;
  cfg.cp_len = 0;
  std::vector<int> bits(static_cast<std::size_t>(cfg.bits_per_symbol()));
  for (auto& b : bits) {
    b = rng.bit();
  }
  const auto frame = frame_from_bits(bits, cfg);
  const auto tx = modulate_real(frame, cfg);
  const auto response = ChannelResponse::calibrated_loss(11.0, 4.5e9, 16e9);
  const auto rx_signal = apply_channel(tx, response, 32e9);
  const auto rx = demodulate(rx_signal, cfg);
  const auto eq = equalize(rx, response, cfg, 32e9);
  for (int c : cfg.active_carriers) {
    CHECK(std::abs(eq.symbols[static_cast<std::size_t>(c)] -
                   frame.symbols[static_cast<std::size_t>(c)]) < 1e-8);
  }
  CHECK(bits_from_frame(eq, cfg) == bits);

  SymbolFrame wrong;
  wrong.symbols.assign(16, 0.0);
  CHECK_THROWS_AS(equalize(wrong, response, cfg, 32e9), std::invalid_argument);
}

TEST_CASE("equalize rejects a vanishing response") {
  ChannelResponse dead;
  dead.freq_hz = {0.0, 32e9};
  dead.mag_db = {-400.0, -400.0};
  OfdmConfig cfg;
  cfg.mode = OfdmMode::Wireless;
  cfg.n_taps = 8;
  cfg.active_carriers = {1};
  cfg.qam_order = 4;
  SymbolFrame frame;
  frame.symbols.assign(8, 0.0);
  frame.symbols[1] = {1.0, 0.0};
  CHECK_THROWS_AS(equalize(frame, dead, cfg, 32e9), std::invalid_argument);
}

TEST_CASE("quantizer basics") {
  CHECK(quantizer_step(3, 4.0) == doctest::Approx(1.0));
  CHECK(quantizer_step(7, 1.0) == doctest::Approx(2.0 / 128.0));
  CHECK_THROWS_AS(quantizer_step(0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(quantizer_step(31, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(quantizer_step(8, 0.0), std::invalid_argument);

  CHECK(quantize({0.0}, 7, 1.0)[0] == 0.0);  // mid-tread keeps zero exact

  Rng rng(0x4a4a);
  const int bits = 7;
  const double fs = 1.0;
  const double step = quantizer_step(bits, fs);
  std::vector<double> signal(4096);
  for (auto& v : signal) {
    v = oracles::uniform(rng, -fs + step, fs - step);
  }
  const auto q = quantize(signal, bits, fs);
  for (std::size_t i = 0; i < signal.size(); ++i) {
    CHECK(std::abs(q[i] - signal[i]) <= step / 2.0 + 1e-15);
  }

  // Saturation to the extreme codes.
  const auto sat = quantize({10.0, -10.0}, bits, fs);
  CHECK(sat[0] == doctest::Approx(fs - step).epsilon(1e-12));
  CHECK(sat[1] == doctest::Approx(-fs).epsilon(1e-12));
}

TEST_CASE("seven-bit quantization of a sine sits near the ideal SINAD") {
  const double fs = 1.0;
  const int bits = 7;
  const double step = quantizer_step(bits, fs);
  const auto sine = coherent_sine(4096, 101, fs - step);
  const auto q = quantize(sine, bits, fs);
  const double sinad = oracles::sinad_db(q, 101);
  CHECK(std::abs(sinad - (6.02 * bits + 1.76)) < 1.5);
}

TEST_CASE("enob noise brings the combined SINAD to the target") {
  const double fs = 1.0;
  const int bits = 7;
  const double step = quantizer_step(bits, fs);
  const double amp = fs - step;
  const auto sine = coherent_sine(8192, 101, amp);
  const double power = amp * amp / 2.0;
  const double target = 41.0;
  const double sigma = enob_noise_sigma(power, target, step);
  CHECK(sigma > 0.0);

  Rng rng(0x6e0b);
  auto noisy = sine;
  for (auto& v : noisy) {
    v += sigma * rng.normal();
  }
  const double sinad = oracles::sinad_db(quantize(noisy, bits, fs), 101);
  CHECK(std::abs(sinad - target) < 1.0);

  // When quantization noise alone exceeds the target, no extra noise is
  // needed.
  CHECK(enob_noise_sigma(1.0, 40.0, 1.0) == 0.0);
  CHECK_THROWS_AS(enob_noise_sigma(0.0, 40.0, step), std::invalid_argument);
}

TEST_SUITE_END();
