// Copyright 2026 the feelsim authors
// SPDX-License-Identifier: Apache-2.0
//
// The parallel kernels must match the serial reference bit for bit, and the
// parallel results must not depend on the thread count: randomness is keyed
// per (round, device) and every reduction runs in a fixed order.

#include <omp.h>

#include <cstdint>
#include <string>
#include <vector>

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "feelsim/capacity.hpp"
#include "feelsim/channel.hpp"
#include "feelsim/config.hpp"
#include "feelsim/downlink.hpp"
#include "feelsim/experiment.hpp"
#include "feelsim/rng.hpp"
#include "feelsim/trace.hpp"
#include "feelsim/uplink.hpp"

using namespace feelsim;

namespace {

std::string render(const std::vector<TraceRow>& rows) {
  std::string out;
  for (const auto& row : rows) {
    out += format_trace_row(row);
    out += '\n';
  }
  return out;
}

std::vector<double> random_vec(SeededRng& rng, std::size_t n,
                               double scale = 1.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = scale * (2.0 * rng.uniform01() - 1.0);
  return v;
}

void check_same_run(const SimConfig& cfg) {
  const RunResult par = run_experiment(cfg, true);
  const RunResult ser = run_experiment(cfg, false);
  CHECK(par.theta == ser.theta);
  CHECK(par.theta_hat == ser.theta_hat);
  CHECK(render(par.trace) == render(ser.trace));
}

SimConfig base_config() {
  SimConfig cfg;
  cfg.M = 8;
  cfg.T = 4;
  cfg.tau = 2;
  cfg.batch_size = 4;
  cfg.eta0 = 0.05;
  cfg.P_dl = 1e6;
  cfg.n_dl = 16;
  cfg.dataset_samples = 160;
  cfg.dataset_features = 10;
  cfg.dataset_classes = 4;
  cfg.test_fraction = 0.25;
  cfg.seed = 17;
  return cfg;
}

}  // namespace

TEST_CASE("large multi-access sums match the serial reference bitwise") {
  SeededRng rng(101, StreamPurpose::kDataGen);
  const std::size_t n = 301, m_count = 16;
  std::vector<ComplexVec> xs, hs;
  for (std::size_t m = 0; m < m_count; ++m) {
    SeededRng fr(101, StreamPurpose::kUplinkFading, 1, m);
    hs.push_back(draw_fading(1.0, n, fr));
    ComplexVec x(n);
    for (std::size_t i = 0; i < n; ++i) {
      x.re[i] = 2.0 * rng.uniform01() - 1.0;
      x.im[i] = 2.0 * rng.uniform01() - 1.0;
    }
    xs.push_back(std::move(x));
  }
  SeededRng nr(101, StreamPurpose::kUplinkNoise, 1);
  const ComplexVec z = draw_noise(n, nr);
  const ComplexVec par = apply_mac(xs, hs, z);
  const ComplexVec ser = serial::apply_mac(xs, hs, z);
  CHECK(par.re == ser.re);
  CHECK(par.im == ser.im);
}

TEST_CASE("large capacity evaluations match the serial reference bitwise") {
  SeededRng rng(102, StreamPurpose::kDataGen);
  std::vector<std::vector<double>> gains(24);
  for (auto& g : gains) {
    g.resize(64);
    for (double& v : g) v = rng.uniform01() * 3.0;
  }
  const GainProfile profile(gains, 7.5);
  CHECK(common_rate(profile) == serial::common_rate(profile));
}

TEST_CASE("large analog broadcasts match the serial reference bitwise") {
  SeededRng rng(103, StreamPurpose::kDataGen);
  const std::size_t d = 513, d2 = (d + 1) / 2, m_count = 12;
  const std::vector<double> theta = random_vec(rng, d, 2.0);
  std::vector<ComplexVec> h, z;
  for (std::size_t m = 0; m < m_count; ++m) {
    SeededRng fr(103, StreamPurpose::kDownlinkFading, 1, m);
    SeededRng nr(103, StreamPurpose::kDownlinkNoise, 1, m);
    h.push_back(draw_fading(1.0, d2, fr));
    z.push_back(draw_noise(d2, nr));
  }
  const auto par = analog_broadcast(theta, 5.0, 100, h, z);
  const auto ser = serial::analog_broadcast(theta, 5.0, 100, h, z);
  for (std::size_t m = 0; m < m_count; ++m) {
    CHECK(par[m].theta_hat_m == ser[m].theta_hat_m);
    CHECK(par[m].mse == ser[m].mse);
  }
}

TEST_CASE("large aggregation rounds match the serial reference bitwise") {
  SeededRng rng(104, StreamPurpose::kDataGen);
  const std::size_t d = 257, d2 = (d + 1) / 2, m_count = 16;
  std::vector<std::vector<double>> deltas;
  std::vector<ComplexVec> hs;
  for (std::size_t m = 0; m < m_count; ++m) {
    deltas.push_back(random_vec(rng, d, 1.0));
    SeededRng fr(104, StreamPurpose::kUplinkFading, 1, m);
    hs.push_back(draw_fading(1.0, d2, fr));
  }
  SeededRng nr(104, StreamPurpose::kUplinkNoise, 1);
  const ComplexVec z = draw_noise(d2, nr);
  const UplinkConfig cfg(4.0, 0.3, d2);
  const UplinkRoundResult par = aggregate_round(deltas, hs, z, cfg);
  const UplinkRoundResult ser = serial::aggregate_round(deltas, hs, z, cfg);
  CHECK(par.delta_hat == ser.delta_hat);
  CHECK(par.gammas == ser.gammas);
  CHECK(par.gamma_bar == ser.gamma_bar);
  CHECK(par.active_counts == ser.active_counts);
}

TEST_CASE("full runs agree between parallel and serial paths in every mode") {
  SUBCASE("digital downlink, fading uplink") {
    SimConfig cfg = base_config();
    cfg.s = 3;
    check_same_run(cfg);
  }
  SUBCASE("digital downlink with an infeasible budget") {
    SimConfig cfg = base_config();
    cfg.s = 3;
    cfg.P_dl = 1e-12;
    check_same_run(cfg);
  }
  SUBCASE("analog downlink, fading uplink") {
    SimConfig cfg = base_config();
    cfg.downlink = DownlinkMode::kAnalog;
    cfg.P_dl = 100.0;
    check_same_run(cfg);
  }
  SUBCASE("analog downlink, error-free uplink") {
    SimConfig cfg = base_config();
    cfg.downlink = DownlinkMode::kAnalog;
    cfg.uplink = UplinkMode::kErrorFree;
    cfg.P_dl = 100.0;
    check_same_run(cfg);
  }
  SUBCASE("error-free everywhere, softmax, label shards") {
    SimConfig cfg = base_config();
    cfg.downlink = DownlinkMode::kErrorFree;
    cfg.uplink = UplinkMode::kErrorFree;
    cfg.model = "softmax";
    cfg.partition = PartitionMode::kNonIid;
    cfg.M = 4;  // 2M = 8 shards over 4 classes
    cfg.dataset_samples = 160;  // 30 training samples per class, 2 shards each
    cfg.dataset_features = 5;
    cfg.test_fraction = 0.25;
    check_same_run(cfg);
  }
}

TEST_CASE("results do not depend on the OpenMP thread count") {
  const int saved = omp_get_max_threads();
  SimConfig cfg = base_config();
  cfg.downlink = DownlinkMode::kAnalog;
  cfg.P_dl = 50.0;

  omp_set_num_threads(1);
  const RunResult one = run_experiment(cfg, true);
  omp_set_num_threads(saved > 1 ? saved : 4);
  const RunResult many = run_experiment(cfg, true);
  omp_set_num_threads(saved);

  CHECK(one.theta == many.theta);
  CHECK(render(one.trace) == render(many.trace));
}
