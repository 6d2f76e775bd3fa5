// Copyright 2026 the feelsim authors
// SPDX-License-Identifier: Apache-2.0
//
// Per-round CSV trace of a simulation run.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace feelsim {

// One row per global round. Unset fields mean "not applicable this round"
// (wrong mode, or a round with no downlink payload) and are written as the
// sentinel "-"; set fields must be finite.
struct TraceRow {
  std::uint64_t t = 0;
  double train_loss = 0.0;
  std::optional<double> test_metric;
  std::optional<double> capacity_bits;
  std::optional<std::uint32_t> q;
  std::optional<double> bit_cost;
  std::optional<double> mean_est_mse;
  std::optional<double> active_fraction;
  std::optional<double> gamma_bar;
};

inline constexpr const char* kTraceHeader =
    "t,train_loss,test_metric,capacity_bits,q,bit_cost,mean_est_mse,"
    "active_fraction,gamma_bar";

// Shortest round-trippable decimal form of a double.
std::string format_double(double v);

std::string format_trace_row(const TraceRow& row);

// Writes header + rows. Rejects non-finite values (sentinels must be
// explicit, never NaN/Inf text). The file appears atomically: the data goes
// to a sibling temp file first and is renamed over the target.
void write_trace_csv(const std::vector<TraceRow>& rows,
                     const std::filesystem::path& path);

// Same atomicity for arbitrary pre-rendered text (bound-sweep CSVs).
void write_text_atomic(const std::string& text,
                       const std::filesystem::path& path);

}  // namespace feelsim
