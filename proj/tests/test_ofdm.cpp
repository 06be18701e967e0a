#include <desat/ofdm.hpp>
#include <desat/rng.hpp>

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "oracles.hpp"

using namespace desat;
using std::numbers::pi;

namespace {

std::vector<int> random_bits(Rng& rng, std::size_t n) {
  std::vector<int> bits(n);
  for (auto& b : bits) {
    b = rng.bit();
  }
  return bits;
}

OfdmConfig wireless_config() {
  OfdmConfig cfg;
  cfg.mode = OfdmMode::Wireless;
  cfg.n_taps = 32;
  cfg.active_carriers = {1, 2, 3, 4, 5, 6, 7, 8};
  cfg.qam_order = 64;
  cfg.cp_len = 8;
  return cfg;
}

OfdmConfig wireline_config() {
  OfdmConfig cfg;
  cfg.mode = OfdmMode::Wireline;
  cfg.n_taps = 32;
  cfg.active_carriers = {1, 2, 3, 4, 16, 28, 29, 30, 31};
  cfg.qam_order = 64;
  cfg.cp_len = 8;
  return cfg;
}

}  // namespace

TEST_SUITE_BEGIN("ofdm");

TEST_CASE("qam_bits accepts square powers of two only") {
  CHECK(qam_bits(4) == 2);
  CHECK(qam_bits(16) == 4);
  CHECK(qam_bits(64) == 6);
  CHECK(qam_bits(256) == 8);
  CHECK_THROWS_AS(qam_bits(2), std::invalid_argument);
  CHECK_THROWS_AS(qam_bits(8), std::invalid_argument);
  CHECK_THROWS_AS(qam_bits(12), std::invalid_argument);
  CHECK_THROWS_AS(qam_bits(3), std::invalid_argument);
}

TEST_CASE("4-QAM maps bit pairs to the unit-energy corners") {
  const double s = 1.0 / std::sqrt(2.0);
  const auto p00 = qam_encode({0, 0}, 4);
  REQUIRE(p00.size() == 1);
  CHECK(p00[0].real() == doctest::Approx(s).epsilon(1e-15));
  CHECK(p00[0].imag() == doctest::Approx(s).epsilon(1e-15));
  const auto p11 = qam_encode({1, 1}, 4);
  CHECK(p11[0].real() == doctest::Approx(-s).epsilon(1e-15));
  CHECK(p11[0].imag() == doctest::Approx(-s).epsilon(1e-15));
  // First half of the chunk steers the in-phase axis.
  const auto p10 = qam_encode({1, 0}, 4);
  CHECK(p10[0].real() == doctest::Approx(-s).epsilon(1e-15));
  CHECK(p10[0].imag() == doctest::Approx(s).epsilon(1e-15));
}

TEST_CASE("64-QAM packs the first three bits onto the in-phase axis") {
  const double s = 1.0 / std::sqrt(42.0);
  const auto p = qam_encode({0, 0, 0, 1, 1, 1}, 64);
  REQUIRE(p.size() == 1);
  CHECK(p[0].real() == doctest::Approx(7.0 * s).epsilon(1e-12));
  CHECK(p[0].imag() == doctest::Approx(-3.0 * s).epsilon(1e-12));
}

TEST_CASE("every constellation has unit average energy") {
  for (int order : {4, 16, 64, 256}) {
    const int k = qam_bits(order);
    double total = 0.0;
    for (int v = 0; v < order; ++v) {
      std::vector<int> bits;
      for (int b = k - 1; b >= 0; --b) {
        bits.push_back((v >> b) & 1);
      }
      total += std::norm(qam_encode(bits, order).front());
    }
    CHECK(total / order == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("qam round trip survives sub-decision-distance noise") {
  Rng rng(0x9a11);
  for (int order : {4, 16, 64}) {
    const int k = qam_bits(order);
    const int m = 1 << (k / 2);
    const double axis_step = 2.0 / std::sqrt(2.0 * (static_cast<double>(m) * m - 1.0) / 3.0);
    const auto bits = random_bits(rng, static_cast<std::size_t>(k) * 500);
    auto points = qam_encode(bits, order);
    CHECK(qam_decode(points, order) == bits);
    for (auto& p : points) {
      p += std::complex<double>(oracles::uniform(rng, -0.45, 0.45) * axis_step,
                                oracles::uniform(rng, -0.45, 0.45) * axis_step);
    }
    CHECK(qam_decode(points, order) == bits);
  }
}

TEST_CASE("the origin decodes to the smaller Gray label on both axes") {
  // Midpoint ties resolve toward the smaller Gray code; for 64-QAM the axis
  // tie at zero sits between level indices 3 and 4, Gray 2 and 6.
  const auto bits = qam_decode({std::complex<double>(0.0, 0.0)}, 64);
  CHECK(bits == std::vector<int>{0, 1, 0, 0, 1, 0});
}

TEST_CASE("qam_encode rejects ragged or non-binary input") {
  CHECK_THROWS_AS(qam_encode({0, 1, 0}, 4), std::invalid_argument);
  CHECK_THROWS_AS(qam_encode({0, 2}, 4), std::invalid_argument);
}

TEST_CASE("pam carries half the bits on one axis at unit energy") {
  const double s = 1.0 / std::sqrt(21.0);
  CHECK(pam_encode({0, 0, 0}, 64) == doctest::Approx(7.0 * s).epsilon(1e-12));
  double total = 0.0;
  for (int v = 0; v < 8; ++v) {
    const std::vector<int> bits{(v >> 2) & 1, (v >> 1) & 1, v & 1};
    const double amp = pam_encode(bits, 64);
    total += amp * amp;
    CHECK(pam_decode(amp, 64) == bits);
  }
  CHECK(total / 8.0 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(pam_encode({0, 1}, 64), std::invalid_argument);
}

TEST_CASE("config validation") {
  OfdmConfig cfg = wireless_config();
  CHECK_NOTHROW(cfg.validate());

  OfdmConfig bad = cfg;
  bad.n_taps = 1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.qam_order = 8;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.cp_len = -1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.cp_len = 33;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.active_carriers = {};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.active_carriers = {1, 40};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.active_carriers = {3, 2};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.active_carriers = {0, 1};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);  // DC is pinned off

  OfdmConfig line = wireline_config();
  CHECK_NOTHROW(line.validate());
  line.active_carriers = {1, 2, 3};  // mirrors missing
  CHECK_THROWS_AS(line.validate(), std::invalid_argument);
}

TEST_CASE("self-conjugate carriers are DC and Nyquist") {
  const OfdmConfig cfg = wireline_config();
  CHECK(cfg.self_conjugate(0));
  CHECK(cfg.self_conjugate(16));
  CHECK_FALSE(cfg.self_conjugate(5));
  CHECK_FALSE(cfg.self_conjugate(31));
}

TEST_CASE("wireline data carriers exclude the derived mirrors") {
  const OfdmConfig line = wireline_config();
  CHECK(line.data_carriers() == std::vector<int>{1, 2, 3, 4, 16});
  // 4 full QAM carriers at 6 bits plus the Nyquist axis at 3.
  CHECK(line.bits_per_symbol() == 4 * 6 + 3);
  const OfdmConfig air = wireless_config();
  CHECK(air.data_carriers() == air.active_carriers);
  CHECK(air.bits_per_symbol() == 48);
}

TEST_CASE("wireless frame round trip preserves bits and zeroes inactive carriers") {
  Rng rng(0xbeef);
  const OfdmConfig cfg = wireless_config();
  const auto bits = random_bits(rng, static_cast<std::size_t>(cfg.bits_per_symbol()));
  const auto frame = frame_from_bits(bits, cfg);
  REQUIRE(frame.symbols.size() == 32);
  for (int c = 0; c < 32; ++c) {
    const bool active = std::binary_search(cfg.active_carriers.begin(),
                                           cfg.active_carriers.end(), c);
    if (!active) {
      CHECK(frame.symbols[static_cast<std::size_t>(c)] == std::complex<double>(0.0, 0.0));
    }
  }
  CHECK(bits_from_frame(frame, cfg) == bits);
  CHECK_THROWS_AS(frame_from_bits({0, 1}, cfg), std::invalid_argument);
}

TEST_CASE("wireline frames are Hermitian and round trip through real modulation") {
  Rng rng(0xfeed);
  const OfdmConfig cfg = wireline_config();
  const auto bits = random_bits(rng, static_cast<std::size_t>(cfg.bits_per_symbol()));
  const auto frame = frame_from_bits(bits, cfg);
  for (int c : cfg.active_carriers) {
    const auto sym = frame.symbols[static_cast<std::size_t>(c)];
    const auto mirror = frame.symbols[static_cast<std::size_t>((32 - c) % 32)];
    CHECK(sym == std::conj(mirror));
  }
  CHECK(std::abs(frame.symbols[16].imag()) == 0.0);

  const auto signal = modulate_real(frame, cfg);
  REQUIRE(signal.size() == static_cast<std::size_t>(32 + cfg.cp_len));
  const auto rx = demodulate(signal, cfg);
  CHECK(bits_from_frame(rx, cfg) == bits);

  CHECK_THROWS_AS(modulate_real(frame, wireless_config()), std::invalid_argument);
}

TEST_CASE("a single active carrier modulates to a scaled exponential") {
  OfdmConfig cfg;
  cfg.mode = OfdmMode::Wireless;
  cfg.n_taps = 32;
  cfg.active_carriers = {5};
  cfg.qam_order = 4;
  cfg.cp_len = 0;
  SymbolFrame frame;
  frame.symbols.assign(32, 0.0);
  frame.symbols[5] = 1.0;
  const auto signal = modulate(frame, cfg);
  REQUIRE(signal.size() == 32);
  for (std::size_t n = 0; n < 32; ++n) {
    const double angle = 2.0 * pi * 5.0 * static_cast<double>(n) / 32.0;
    CHECK(signal[n].real() ==
          doctest::Approx(std::cos(angle) / std::sqrt(32.0)).epsilon(1e-12));
    CHECK(signal[n].imag() ==
          doctest::Approx(std::sin(angle) / std::sqrt(32.0)).epsilon(1e-12));
  }
}

TEST_CASE("the cyclic prefix copies the core tail") {
  Rng rng(0xc0de);
  const OfdmConfig cfg = wireless_config();
  const auto bits = random_bits(rng, static_cast<std::size_t>(cfg.bits_per_symbol()));
  const auto signal = modulate(frame_from_bits(bits, cfg), cfg);
  REQUIRE(signal.size() == 40);
  for (int i = 0; i < 8; ++i) {
    CHECK(signal[static_cast<std::size_t>(i)] == signal[static_cast<std::size_t>(32 + i)]);
  }
}

TEST_CASE("modulation is unitary on the symbol core") {
  Rng rng(0x7777);
  const OfdmConfig cfg = wireless_config();
  const auto bits = random_bits(rng, static_cast<std::size_t>(cfg.bits_per_symbol()));
  const auto frame = frame_from_bits(bits, cfg);
  const auto signal = modulate(frame, cfg);
  double sym_energy = 0.0;
  for (const auto& s : frame.symbols) {
    sym_energy += std::norm(s);
  }
  double core_energy = 0.0;
  for (std::size_t i = 8; i < signal.size(); ++i) {
    core_energy += std::norm(signal[i]);
  }
  CHECK(core_energy == doctest::Approx(sym_energy).epsilon(1e-10));
}

TEST_CASE("demodulation inverts modulation") {
  Rng rng(0x5e5e);
  const OfdmConfig cfg = wireless_config();
  const auto bits = random_bits(rng, static_cast<std::size_t>(cfg.bits_per_symbol()));
  const auto frame = frame_from_bits(bits, cfg);
  const auto rx = demodulate(modulate(frame, cfg), cfg);
  REQUIRE(rx.symbols.size() == 32);
  for (std::size_t c = 0; c < 32; ++c) {
    CHECK(std::abs(rx.symbols[c] - frame.symbols[c]) < 1e-10);
  }
  CHECK_THROWS_AS(demodulate(ComplexVec(17), cfg), std::invalid_argument);
}

TEST_CASE("modulate rejects energy on inactive carriers") {
  const OfdmConfig cfg = wireless_config();
  SymbolFrame frame;
  frame.symbols.assign(32, 0.0);
  frame.symbols[20] = 0.5;  // not in the active set
  CHECK_THROWS_AS(modulate(frame, cfg), std::invalid_argument);
  frame.symbols[20] = 0.0;
  const auto signal = modulate(frame, cfg);
  for (const auto& s : signal) {
    CHECK(s == std::complex<double>(0.0, 0.0));
  }
}

TEST_CASE("clipping leaks energy into inactive carriers") {
  Rng rng(0xc11f);
  const OfdmConfig cfg = wireless_config();
  const auto bits = random_bits(rng, static_cast<std::size_t>(cfg.bits_per_symbol()));
  auto signal = modulate(frame_from_bits(bits, cfg), cfg);
  double peak = 0.0;
  for (const auto& s : signal) {
    peak = std::max({peak, std::abs(s.real()), std::abs(s.imag())});
  }
  const double t1 = 0.4 * peak;
  for (auto& s : signal) {
    s = {std::clamp(s.real(), -t1, t1), std::clamp(s.imag(), -t1, t1)};
  }
  const auto rx = demodulate(signal, cfg);
  double leaked = 0.0;
  for (int c = 0; c < 32; ++c) {
    if (!std::binary_search(cfg.active_carriers.begin(), cfg.active_carriers.end(), c)) {
      leaked += std::norm(rx.symbols[static_cast<std::size_t>(c)]);
    }
  }
  CHECK(leaked > 1e-6);
}

TEST_CASE("split and merge are lossless") {
  Rng rng(0x1a2b);
  ComplexVec signal(64);
  for (auto& s : signal) {
    s = {rng.normal(), rng.normal()};
  }
  const auto [i, q] = split_iq(signal);
  const auto merged = merge_iq(i, q);
  REQUIRE(merged.size() == signal.size());
  for (std::size_t n = 0; n < signal.size(); ++n) {
    CHECK(merged[n] == signal[n]);
  }
  ComplexVec real_signal(16);
  for (std::size_t n = 0; n < 16; ++n) {
    real_signal[n] = static_cast<double>(n);
  }
  const auto [ri, rq] = split_iq(real_signal);
  for (double v : rq) {
    CHECK(v == 0.0);
  }
  CHECK_THROWS_AS(merge_iq({1.0, 2.0}, {1.0}), std::invalid_argument);
}

TEST_CASE("papr of constant-modulus signals is one") {
  ComplexVec tone(32);
  for (std::size_t n = 0; n < 32; ++n) {
    const double angle = 2.0 * pi * 3.0 * static_cast<double>(n) / 32.0;
    tone[n] = {std::cos(angle), std::sin(angle)};
  }
  CHECK(papr(tone) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(papr(std::vector<double>{2.0, 2.0, 2.0}) == doctest::Approx(1.0));
  CHECK(papr(std::vector<double>{-2.0, 2.0, -2.0}) == doctest::Approx(1.0));
}

TEST_CASE("papr follows peak over mean power") {
  CHECK(papr(std::vector<double>{1.0, 3.0}) == doctest::Approx(1.8).epsilon(1e-12));
  CHECK_THROWS_AS(papr(std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(papr(std::vector<double>{0.0, 0.0}), std::invalid_argument);
}

TEST_SUITE_END();
