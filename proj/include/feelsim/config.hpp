// Copyright 2026 the feelsim authors
// SPDX-License-Identifier: Apache-2.0
//
// Flat key = value experiment configuration: one file describes one run.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace feelsim {

enum class DownlinkMode { kDigital, kAnalog, kErrorFree };
enum class UplinkMode { kAnalog, kErrorFree };
enum class PartitionMode { kIid, kNonIid };

struct SimConfig {
  DownlinkMode downlink = DownlinkMode::kDigital;
  UplinkMode uplink = UplinkMode::kAnalog;
  std::uint32_t M = 40;          // devices
  std::uint64_t T = 100;         // global rounds
  std::uint32_t tau = 1;         // local SGD steps per round
  std::uint32_t batch_size = 0;  // 0 = full shard every step
  double eta0 = 0.1;             // eta(t) = eta0 / (1 + eta_decay * t)
  double eta_decay = 0.0;
  double P_dl = 10.0;
  double P_ul = 10.0;
  double sigma_dl = 1.0;
  double sigma_ul = 1.0;
  double lambda_thr = 1e-4;  // uplink truncation threshold
  std::uint32_t s = 0;       // sparsity level, digital downlink only
  std::size_t n_dl = 0;      // subchannels per downlink slot; 0 = all symbols
  std::size_t n_ul = 0;      // subchannels per uplink slot; 0 = all symbols
  PartitionMode partition = PartitionMode::kIid;
  std::string model = "least_squares";  // or "softmax"
  std::string dataset_path;             // empty = synthetic blobs
  std::size_t dataset_samples = 2000;
  std::size_t dataset_features = 10;
  std::uint32_t dataset_classes = 10;
  double test_fraction = 0.2;
  std::uint64_t seed = 1;
  // Optional analytic-bound parameters; when present, validation warns if the
  // step size violates the bound's precondition.
  std::optional<double> mu;
  std::optional<double> L;
  std::optional<double> G2;
  std::optional<double> Gamma;
  std::optional<double> Z2;
  std::optional<double> init_gap;

  bool has_bound_params() const;
  // Parameter dimension implied by model + synthetic dataset shape.
  std::size_t model_dim() const;
};

struct Diagnostics {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;

  bool ok() const { return errors.empty(); }
};

// Parses config text ('#' comments, blank lines allowed). Syntax problems,
// unknown keys, duplicate keys, and unparsable values are appended to diag
// with name:line positions; parsing continues past errors.
SimConfig parse_config_text(const std::string& text, const std::string& name,
                            Diagnostics& diag);

// parse_config_text over a file; unreadable files become a diagnostic.
SimConfig load_config(const std::string& path, Diagnostics& diag);

// Applies one "key=value" command-line override.
void apply_override(SimConfig& cfg, const std::string& kv, Diagnostics& diag);

// Cross-field semantic checks (positivity, divisibility, mode requirements)
// plus advisory warnings. Appends to diag without throwing.
void validate_config(const SimConfig& cfg, Diagnostics& diag);

const char* to_string(DownlinkMode m);
const char* to_string(UplinkMode m);
const char* to_string(PartitionMode m);

}  // namespace feelsim
