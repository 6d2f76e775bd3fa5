// Copyright 2026 the feelsim authors
// SPDX-License-Identifier: Apache-2.0

#include "feelsim/experiment.hpp"

#include <cmath>
#include <exception>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "feelsim/capacity.hpp"
#include "feelsim/channel.hpp"
#include "feelsim/downlink.hpp"
#include "feelsim/learner.hpp"
#include "feelsim/model.hpp"
#include "feelsim/rng.hpp"
#include "feelsim/uplink.hpp"

namespace feelsim {

PreparedData prepare_data(const SimConfig& cfg) {
  Dataset full =
      cfg.dataset_path.empty()
          ? make_synthetic(cfg.dataset_samples, cfg.dataset_features,
                           cfg.dataset_classes, cfg.seed)
          : load_dataset(cfg.dataset_path);
  auto [train, test] = split_train_test(full, cfg.test_fraction);
  if (train.size() == 0)
    throw std::invalid_argument("experiment: no training samples after split");

  SeededRng part_rng(cfg.seed, StreamPurpose::kPartition);
  Partition parts = cfg.partition == PartitionMode::kIid
                        ? partition_iid(train, cfg.M, part_rng)
                        : partition_noniid(train, cfg.M, part_rng);
  std::vector<double> weights(parts.size());
  for (std::size_t m = 0; m < parts.size(); ++m) {
    if (parts[m].empty())
      throw std::invalid_argument(
          "experiment: device " + std::to_string(m) +
          " received no training samples; increase dataset_samples");
    weights[m] =
        static_cast<double>(parts[m].size()) / static_cast<double>(train.size());
  }
  return PreparedData{std::move(train), std::move(test), std::move(parts),
                      std::move(weights)};
}

namespace {

double sq_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    acc += diff * diff;
  }
  return acc;
}

// Device loop with exception capture so OpenMP regions never leak throws.
template <typename Fn>
void for_each_device(std::size_t m_count, bool parallel, Fn&& fn) {
  std::exception_ptr first_error = nullptr;
  const std::int64_t n = static_cast<std::int64_t>(m_count);
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t m = 0; m < n; ++m) {
      try {
        fn(static_cast<std::size_t>(m));
      } catch (...) {
#pragma omp critical
        if (!first_error) first_error = std::current_exception();
      }
    }
  } else {
    for (std::int64_t m = 0; m < n; ++m) {
      try {
        fn(static_cast<std::size_t>(m));
      } catch (...) {
        if (!first_error) first_error = std::current_exception();
      }
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

RunResult run_experiment(const SimConfig& cfg, bool parallel) {
  Diagnostics diag;
  validate_config(cfg, diag);
  if (!diag.ok()) {
    std::string msg = "invalid config";
    for (const std::string& e : diag.errors) msg += "\n  " + e;
    throw std::invalid_argument(msg);
  }

  PreparedData data = prepare_data(cfg);
  const auto model =
      make_model(cfg.model, data.train.feature_dim(), data.train.num_classes);
  const std::size_t d = model->dim();
  const std::size_t d2 = (d + 1) / 2;
  const std::size_t n_dl = cfg.n_dl != 0 ? cfg.n_dl : d2;
  const std::size_t n_ul = cfg.n_ul != 0 ? cfg.n_ul : d2;
  const bool digital = cfg.downlink == DownlinkMode::kDigital;
  if (digital && cfg.s > d)
    throw std::invalid_argument("experiment: s = " + std::to_string(cfg.s) +
                                " exceeds model dimension " +
                                std::to_string(d));

  std::vector<std::size_t> all_train(data.train.size());
  std::iota(all_train.begin(), all_train.end(), std::size_t{0});

  PsState ps;
  ps.theta.assign(d, 0.0);
  ps.theta_hat = ps.theta;
  // Device-side copy of the shared estimate; must track ps.theta_hat
  // bit-for-bit since every device decodes the same broadcast.
  std::vector<double> replica = ps.theta_hat;

  const UplinkConfig ucfg(cfg.P_ul, cfg.lambda_thr, n_ul);

  RunResult result;
  result.trace.reserve(cfg.T);

  std::vector<std::vector<double>> starts(cfg.M);
  std::vector<std::vector<double>> deltas(cfg.M);

  for (std::uint64_t t = 0; t < cfg.T; ++t) {
    TraceRow row;
    row.t = t;
    ps.round = static_cast<std::int64_t>(t);

    // ---- downlink: what model does each device start the round from ----
    switch (cfg.downlink) {
      case DownlinkMode::kDigital: {
        if (t > 0) {
          std::vector<std::vector<double>> gains(cfg.M);
          for (std::uint32_t m = 0; m < cfg.M; ++m) {
            SeededRng rng(cfg.seed, StreamPurpose::kDownlinkFading, t, m);
            const ComplexVec h = draw_fading(cfg.sigma_dl, n_dl, rng);
            gains[m].resize(n_dl);
            for (std::size_t i = 0; i < n_dl; ++i)
              gains[m][i] = h.re[i] * h.re[i] + h.im[i] * h.im[i];
          }
          const GainProfile profile(std::move(gains), cfg.P_dl);
          const double capacity =
              parallel ? common_rate(profile) : serial::common_rate(profile);
          SeededRng quant_rng(cfg.seed, StreamPurpose::kQuantizer, t);
          const DigitalRoundOutcome out =
              digital_broadcast(ps, capacity, cfg.s, quant_rng);
          for (std::size_t i = 0; i < d; ++i) replica[i] += out.decoded[i];
          row.capacity_bits = out.capacity_bits;
          if (out.q) {
            row.q = *out.q;
            row.bit_cost = out.bits_used;
          }
        }
        if (replica != ps.theta_hat)
          throw std::logic_error(
              "experiment: device estimate diverged from server state");
        row.mean_est_mse = sq_distance(ps.theta_hat, ps.theta);
        for (std::uint32_t m = 0; m < cfg.M; ++m) starts[m] = ps.theta_hat;
        break;
      }
      case DownlinkMode::kAnalog: {
        std::vector<ComplexVec> hs(cfg.M), zs(cfg.M);
        for (std::uint32_t m = 0; m < cfg.M; ++m) {
          SeededRng frng(cfg.seed, StreamPurpose::kDownlinkFading, t, m);
          SeededRng nrng(cfg.seed, StreamPurpose::kDownlinkNoise, t, m);
          hs[m] = draw_fading(cfg.sigma_dl, d2, frng);
          zs[m] = draw_noise(d2, nrng);
        }
        const std::vector<DeviceEstimate> est =
            parallel ? analog_broadcast(ps.theta, cfg.P_dl, n_dl, hs, zs)
                     : serial::analog_broadcast(ps.theta, cfg.P_dl, n_dl, hs,
                                                zs);
        double mse = 0.0;
        for (std::uint32_t m = 0; m < cfg.M; ++m) {
          starts[m] = est[m].theta_hat_m;
          mse += est[m].mse;
        }
        row.mean_est_mse = mse / static_cast<double>(cfg.M);
        break;
      }
      case DownlinkMode::kErrorFree: {
        for (std::uint32_t m = 0; m < cfg.M; ++m) starts[m] = ps.theta;
        row.mean_est_mse = 0.0;
        break;
      }
    }

    // ---- local SGD on every device ----
    const double eta_t =
        cfg.eta0 / (1.0 + cfg.eta_decay * static_cast<double>(t));
    const SgdSchedule sched(cfg.tau, cfg.batch_size, eta_t);
    for_each_device(cfg.M, parallel, [&](std::size_t m) {
      SeededRng batch_rng(cfg.seed, StreamPurpose::kBatchSampling, t, m);
      deltas[m] = local_sgd(*model, starts[m], data.train, data.parts[m],
                            sched, batch_rng);
    });

    // ---- uplink aggregation ----
    std::vector<double> delta_hat;
    if (cfg.uplink == UplinkMode::kAnalog) {
      std::vector<ComplexVec> hs(cfg.M);
      for (std::uint32_t m = 0; m < cfg.M; ++m) {
        SeededRng rng(cfg.seed, StreamPurpose::kUplinkFading, t, m);
        hs[m] = draw_fading(cfg.sigma_ul, d2, rng);
      }
      SeededRng nrng(cfg.seed, StreamPurpose::kUplinkNoise, t);
      const ComplexVec z = draw_noise(d2, nrng);
      const UplinkRoundResult agg =
          parallel ? aggregate_round(deltas, hs, z, ucfg)
                   : serial::aggregate_round(deltas, hs, z, ucfg);
      delta_hat = agg.delta_hat;
      row.gamma_bar = agg.gamma_bar;
      std::uint64_t active = 0;
      for (std::uint32_t c : agg.active_counts) active += c;
      row.active_fraction = static_cast<double>(active) /
                            (static_cast<double>(cfg.M) *
                             static_cast<double>(agg.active_counts.size()));
    } else {
      delta_hat = aggregate_errorfree(deltas, data.weights);
    }

    // ---- global update ----
    if (digital) {
      for (std::size_t i = 0; i < d; ++i)
        ps.theta[i] = ps.theta_hat[i] + delta_hat[i];
    } else {
      for (std::size_t i = 0; i < d; ++i) ps.theta[i] += delta_hat[i];
    }

    row.train_loss = model->loss(ps.theta, data.train, all_train);
    if (data.test.size() > 0)
      row.test_metric = model->test_metric(ps.theta, data.test);
    result.trace.push_back(std::move(row));
  }

  result.theta = std::move(ps.theta);
  if (digital) result.theta_hat = std::move(ps.theta_hat);
  return result;
}

}  // namespace feelsim
