// Copyright 2026 the feelsim authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "feelsim/channel.hpp"

namespace feelsim {

struct UplinkConfig {
  double power;      // per-device transmit budget, spent fully when active
  double threshold;  // minimum |h| for a subchannel to carry payload
  std::size_t n_ul;  // subchannels per time slot (slot count is implied)

  UplinkConfig(double power, double threshold, std::size_t n_ul);
};

struct DevicePrecode {
  ComplexVec x;        // transmit symbols, zero on gated subchannels
  double gamma = 0.0;  // common scale; 0 when the device stays silent
};

struct UplinkRoundResult {
  std::vector<double> delta_hat;           // decoded update, length d
  std::vector<double> gammas;              // per device
  double gamma_bar = 0.0;                  // mean over all M devices
  std::vector<std::uint32_t> active_counts;  // per packed entry
};

// Threshold-gated channel inversion for one device: packed symbol k carries
// (delta[k], delta[k+d2]) scaled by gamma/h_k when |h_k| >= threshold and is
// muted otherwise. gamma spends the whole power budget over the round's
// surviving entries, so splitting the round into time slots is pure
// reindexing of the same symbols. A device with no surviving payload
// transmits nothing and reports gamma = 0.
DevicePrecode device_precode(const std::vector<double>& delta,
                             const ComplexVec& h_ul, const UplinkConfig& cfg);

// Inverts the superposition: entry k decodes to Re/Im of y_k divided by
// (gamma_bar * |active set|), zero where no device passed the gate.
// gamma_bar averages over all M devices, silent ones included.
std::vector<double> ps_decode(const ComplexVec& y,
                              const std::vector<double>& gammas,
                              const std::vector<std::uint32_t>& active_counts,
                              std::size_t d);

// Full round over the fading MAC: precode every device (in parallel),
// superpose with the given noise, decode. Active sets are defined by the
// gains alone. z carries one entry per packed symbol.
UplinkRoundResult aggregate_round(const std::vector<std::vector<double>>& deltas,
                                  const std::vector<ComplexVec>& h_uls,
                                  const ComplexVec& z,
                                  const UplinkConfig& cfg);

namespace serial {
UplinkRoundResult aggregate_round(const std::vector<std::vector<double>>& deltas,
                                  const std::vector<ComplexVec>& h_uls,
                                  const ComplexVec& z,
                                  const UplinkConfig& cfg);
}  // namespace serial

// Channel-free aggregation for convergence-theory runs: the weighted average
// sum_m weights[m] * deltas[m]. Weights are the devices' data shares.
std::vector<double> aggregate_errorfree(
    const std::vector<std::vector<double>>& deltas,
    const std::vector<double>& weights);

}  // namespace feelsim
