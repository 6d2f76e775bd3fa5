// Copyright 2026 the feelsim authors
// SPDX-License-Identifier: Apache-2.0
//
// Parallel kernels against their serial reference twins. The serial versions
// are the correctness oracles in the test suite; these benchmarks show what
// the OpenMP versions buy at realistic sizes.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "feelsim/capacity.hpp"
#include "feelsim/channel.hpp"
#include "feelsim/downlink.hpp"
#include "feelsim/rng.hpp"
#include "feelsim/uplink.hpp"

using namespace feelsim;

namespace {

std::vector<ComplexVec> random_symbols(std::size_t m, std::size_t n,
                                       std::uint64_t device0) {
  std::vector<ComplexVec> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    SeededRng rng(3, StreamPurpose::kDataGen, 0, device0 + i);
    out[i] = draw_fading(1.0, n, rng);
  }
  return out;
}

void bm_apply_mac(benchmark::State& state, bool parallel) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const std::size_t n = 8192;
  const auto xs = random_symbols(m, n, 0);
  const auto hs = random_symbols(m, n, 1000);
  SeededRng zr(3, StreamPurpose::kUplinkNoise, 0, 0);
  const ComplexVec z = draw_noise(n, zr);
  for (auto _ : state) {
    ComplexVec y = parallel ? apply_mac(xs, hs, z) : serial::apply_mac(xs, hs, z);
    benchmark::DoNotOptimize(y.re.data());
  }
}

void bm_common_rate(benchmark::State& state, bool parallel) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const std::size_t n = 512;
  std::vector<std::vector<double>> gains(m, std::vector<double>(n));
  for (std::size_t i = 0; i < m; ++i) {
    SeededRng rng(3, StreamPurpose::kDownlinkFading, 0, i);
    const ComplexVec h = draw_fading(1.0, n, rng);
    for (std::size_t k = 0; k < n; ++k)
      gains[i][k] = h.re[k] * h.re[k] + h.im[k] * h.im[k];
  }
  const GainProfile profile(gains, 100.0);
  for (auto _ : state) {
    const double r =
        parallel ? common_rate(profile) : serial::common_rate(profile);
    benchmark::DoNotOptimize(r);
  }
}

void bm_analog_broadcast(benchmark::State& state, bool parallel) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const std::size_t d = 8192, d2 = d / 2;
  SeededRng tr(3, StreamPurpose::kDataGen, 1, 0);
  std::vector<double> theta(d);
  for (double& v : theta) v = tr.gaussian();
  const auto hs = random_symbols(m, d2, 0);
  const auto zs = random_symbols(m, d2, 1000);
  for (auto _ : state) {
    auto est = parallel ? analog_broadcast(theta, 10.0, 256, hs, zs)
                        : serial::analog_broadcast(theta, 10.0, 256, hs, zs);
    benchmark::DoNotOptimize(est.data());
  }
}

void bm_aggregate_round(benchmark::State& state, bool parallel) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const std::size_t d = 8192, d2 = d / 2;
  std::vector<std::vector<double>> deltas(m, std::vector<double>(d));
  for (std::size_t i = 0; i < m; ++i) {
    SeededRng rng(3, StreamPurpose::kDataGen, 2, i);
    for (double& v : deltas[i]) v = rng.gaussian();
  }
  const auto hs = random_symbols(m, d2, 0);
  SeededRng zr(3, StreamPurpose::kUplinkNoise, 1, 0);
  const ComplexVec z = draw_noise(d2, zr);
  const UplinkConfig cfg(10.0, 0.2, 256);
  for (auto _ : state) {
    UplinkRoundResult res = parallel ? aggregate_round(deltas, hs, z, cfg)
                                     : serial::aggregate_round(deltas, hs, z, cfg);
    benchmark::DoNotOptimize(res.delta_hat.data());
  }
}

}  // namespace

BENCHMARK_CAPTURE(bm_apply_mac, parallel, true)
    ->Arg(16)->Arg(64)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(bm_apply_mac, serial, false)
    ->Arg(16)->Arg(64)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(bm_common_rate, parallel, true)
    ->Arg(16)->Arg(64)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(bm_common_rate, serial, false)
    ->Arg(16)->Arg(64)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(bm_analog_broadcast, parallel, true)
    ->Arg(8)->Arg(32)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(bm_analog_broadcast, serial, false)
    ->Arg(8)->Arg(32)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(bm_aggregate_round, parallel, true)
    ->Arg(8)->Arg(32)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(bm_aggregate_round, serial, false)
    ->Arg(8)->Arg(32)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
