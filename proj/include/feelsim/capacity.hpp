// Copyright 2026 the feelsim authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

namespace feelsim {

// Per-device squared channel magnitudes plus the per-device power budget.
struct GainProfile {
  std::vector<std::vector<double>> gains;  // [device][subchannel], >= 0
  double power;                            // > 0, spent fully per device

  GainProfile(std::vector<std::vector<double>> gains, double power);
};

struct WaterfillResult {
  // Per-subchannel power; empty when every gain is zero (the distinguished
  // zero-capacity case).
  std::vector<double> allocation;
  double rate = 0.0;  // bits per realization
};

// Exact water-filling over one device's parallel subchannels: allocation
// P_i = max(0, nu - 1/g_i) with the water level nu found by a sorted
// breakpoint scan, rate = sum log2(1 + P_i g_i).
WaterfillResult waterfill(const std::vector<double>& gains, double power);

// Common rate achievable to every device: the per-device power variables are
// disjoint, so the max-min objective decouples into min over devices of each
// device's water-filled maximum.
double common_rate(const GainProfile& profile);

namespace serial {
double common_rate(const GainProfile& profile);
}  // namespace serial

}  // namespace feelsim
