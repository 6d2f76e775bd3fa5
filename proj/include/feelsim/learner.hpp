// Copyright 2026 the feelsim authors
// SPDX-License-Identifier: Apache-2.0
//
// Local multi-step SGD run by each device between communication rounds.

#pragma once

#include <cstdint>
#include <vector>

#include "feelsim/dataset.hpp"
#include "feelsim/model.hpp"
#include "feelsim/rng.hpp"

namespace feelsim {

struct SgdSchedule {
  std::uint32_t tau = 1;        // local steps per round, >= 1
  std::uint32_t batch_size = 0; // 0 means full shard each step
  double eta = 0.1;             // step size used for every local step

  SgdSchedule() = default;
  SgdSchedule(std::uint32_t tau_, std::uint32_t batch_size_, double eta_);
};

// Runs tau local SGD steps from theta_start over the device's shard and
// returns the model update delta = theta_final - theta_start.  The update is
// accumulated directly (theta_start is never mutated), so summing the
// returned per-step gradients scaled by -eta reproduces it bit-exactly.
// If step_grads is non-null it receives the tau raw minibatch gradients.
std::vector<double> local_sgd(const LearnerModel& model,
                              const std::vector<double>& theta_start,
                              const Dataset& data,
                              const std::vector<std::size_t>& shard,
                              const SgdSchedule& schedule, SeededRng& rng,
                              std::vector<std::vector<double>>* step_grads =
                                  nullptr);

}  // namespace feelsim
