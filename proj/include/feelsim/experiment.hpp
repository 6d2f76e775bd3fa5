// Copyright 2026 the feelsim authors
// SPDX-License-Identifier: Apache-2.0
//
// Full simulation loop: downlink model dissemination, local SGD on every
// device, uplink aggregation, global update, one trace row per round.

#pragma once

#include <vector>

#include "feelsim/config.hpp"
#include "feelsim/dataset.hpp"
#include "feelsim/trace.hpp"

namespace feelsim {

struct PreparedData {
  Dataset train;
  Dataset test;
  Partition parts;              // per-device sample indices into train
  std::vector<double> weights;  // per-device data shares, sum to 1
};

// Builds (or loads) the dataset, splits it, and partitions the training set
// across cfg.M devices. Throws std::invalid_argument on impossible setups.
PreparedData prepare_data(const SimConfig& cfg);

struct RunResult {
  std::vector<TraceRow> trace;    // cfg.T rows
  std::vector<double> theta;      // final global model
  std::vector<double> theta_hat;  // final shared estimate (digital downlink)
};

// Runs cfg.T rounds. parallel=false routes every kernel through its serial
// reference implementation; results are bit-identical either way, which the
// test suite checks.
RunResult run_experiment(const SimConfig& cfg, bool parallel = true);

}  // namespace feelsim
