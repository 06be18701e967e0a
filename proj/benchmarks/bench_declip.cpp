#include <benchmark/benchmark.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "desat/declip.hpp"
#include "desat/harness.hpp"
#include "desat/kernel.hpp"
#include "desat/reconstruct.hpp"
#include "desat/rng.hpp"

namespace {

const desat::BandSpec kBand(0.3, 2.8);

// Window regression input: n unsaturated neighbors at integer offsets.
desat::SampleSet window_samples(int n) {
  desat::Rng rng(0x5eed);
  desat::SampleSet samples;
  for (int k = -n / 2; k <= n / 2; ++k) {
    if (k != 0) {
      samples.locations.push_back(static_cast<double>(k));
      samples.values.push_back(rng.normal());
    }
  }
  return samples;
}

// Band-limited stream with one isolated clipped sample every `spacing`.
desat::SaturatedStream clipped_stream(int len, int spacing) {
  desat::Rng rng(0xbe9c);
  std::vector<double> centers;
  std::vector<double> beta;
  for (int c = 3; c < len - 3; c += 7) {
    centers.push_back(static_cast<double>(c));
    beta.push_back(rng.normal());
  }
  desat::SaturatedStream stream;
  for (int i = 0; i < len; ++i) {
    double v = 0.0;
    for (std::size_t c = 0; c < centers.size(); ++c) {
      v += beta[c] * desat::kernel_value(kBand, static_cast<double>(i) - centers[c]);
    }
    stream.locations.push_back(static_cast<double>(i));
    stream.values.push_back(v);
    stream.flags.push_back(desat::SampleFlag::Ok);
  }
  double max_ok = 0.0;
  for (int i = 0; i < len; ++i) {
    if (i % spacing != spacing / 2) {
      max_ok = std::max(max_ok, std::abs(stream.values[static_cast<std::size_t>(i)]));
    }
  }
  const double threshold = max_ok + 0.25;
  for (int i = spacing / 2; i < len; i += spacing) {
    stream.values[static_cast<std::size_t>(i)] = threshold;
    stream.flags[static_cast<std::size_t>(i)] = desat::SampleFlag::ClippedHigh;
  }
  return stream;
}

void BM_WindowRegression(benchmark::State& state) {
  const auto samples = window_samples(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(desat::regress(samples, kBand, 0.0));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_WindowRegression)->RangeMultiplier(2)->Range(8, 64)->Complexity(benchmark::oNCubed);

void BM_KernelValue(benchmark::State& state) {
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(desat::kernel_value(kBand, t));
    t += 0.37;
  }
}
BENCHMARK(BM_KernelValue);

void BM_DeclipStreamDirect(benchmark::State& state) {
  const auto stream = clipped_stream(512, 16);
  desat::WindowConfig window;
  for (auto _ : state) {
    benchmark::DoNotOptimize(desat::declip_stream(stream, kBand, window, nullptr));
  }
  state.SetItemsProcessed(state.iterations() * 32);  // clipped samples per pass
}
BENCHMARK(BM_DeclipStreamDirect);

void BM_DeclipStreamTable(benchmark::State& state) {
  const auto stream = clipped_stream(512, 16);
  desat::WindowConfig window;
  const auto table =
      desat::precompute_inverse_tables(kBand, window, desat::isolated_patterns(512, window));
  for (auto _ : state) {
    benchmark::DoNotOptimize(desat::declip_stream(stream, kBand, window, &table));
  }
  state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_DeclipStreamTable);

void BM_LinkTrial(benchmark::State& state) {
  const desat::ExperimentConfig cfg = desat::preset("ideal-case");
  const auto table = desat::precompute_inverse_tables(
      cfg.resolved_band(), cfg.window,
      desat::isolated_patterns(cfg.ofdm.n_taps + cfg.ofdm.cp_len, cfg.window));
  std::uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(desat::run_trial(cfg, seed++, &table, nullptr));
  }
}
BENCHMARK(BM_LinkTrial);

}  // namespace

BENCHMARK_MAIN();
