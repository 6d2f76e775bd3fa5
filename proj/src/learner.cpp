// Copyright 2026 the feelsim authors
// SPDX-License-Identifier: Apache-2.0

#include "feelsim/learner.hpp"

#include <stdexcept>

namespace feelsim {

SgdSchedule::SgdSchedule(std::uint32_t tau_, std::uint32_t batch_size_,
                         double eta_)
    : tau(tau_), batch_size(batch_size_), eta(eta_) {
  if (tau == 0) throw std::invalid_argument("sgd: tau must be >= 1");
  if (!(eta > 0.0)) throw std::invalid_argument("sgd: eta must be > 0");
}

std::vector<double> local_sgd(const LearnerModel& model,
                              const std::vector<double>& theta_start,
                              const Dataset& data,
                              const std::vector<std::size_t>& shard,
                              const SgdSchedule& schedule, SeededRng& rng,
                              std::vector<std::vector<double>>* step_grads) {
  if (schedule.tau == 0) throw std::invalid_argument("sgd: tau must be >= 1");
  if (!(schedule.eta > 0.0))
    throw std::invalid_argument("sgd: eta must be > 0");
  if (theta_start.size() != model.dim())
    throw std::invalid_argument("sgd: theta dimension mismatch");
  if (shard.empty()) throw std::invalid_argument("sgd: empty shard");

  const std::size_t d = model.dim();
  std::vector<double> acc(d, 0.0);      // accumulated update
  std::vector<double> theta_cur(d);
  std::vector<double> g(d);
  std::vector<std::size_t> batch;

  for (std::uint32_t step = 0; step < schedule.tau; ++step) {
    for (std::size_t j = 0; j < d; ++j) theta_cur[j] = theta_start[j] + acc[j];

    if (schedule.batch_size == 0) {
      model.grad(theta_cur, data, shard, g);
    } else {
      batch.resize(schedule.batch_size);
      for (std::size_t b = 0; b < batch.size(); ++b)
        batch[b] = shard[rng.uniform_below(shard.size())];
      model.grad(theta_cur, data, batch, g);
    }
    if (step_grads) step_grads->push_back(g);
    for (std::size_t j = 0; j < d; ++j) acc[j] -= schedule.eta * g[j];
  }
  return acc;
}

}  // namespace feelsim
