// Copyright 2026 the feelsim authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "feelsim/capacity.hpp"
#include "feelsim/channel.hpp"
#include "feelsim/compression.hpp"
#include "feelsim/rng.hpp"

namespace feelsim {

// Norm floor used when scaling an (almost) all-zero model for analog
// transmission; keeps the power scale finite without changing any
// non-degenerate round.
inline constexpr double kAnalogNormFloor = 1e-12;

// Server-side state for the digital scheme. theta_hat tracks the estimate
// every device holds; the two views must stay bit-identical, which the
// simulator checks each round. At round 0 the devices are assumed to know
// theta exactly (shared initialization), so theta_hat starts equal to theta
// and the first broadcast happens in round 1.
struct PsState {
  std::vector<double> theta;
  std::vector<double> theta_hat;
  std::int64_t round = 0;
};

struct DeviceEstimate {
  std::vector<double> theta_hat_m;
  double mse = 0.0;  // squared distance to the true model, diagnostic
};

struct DigitalRoundOutcome {
  double capacity_bits = 0.0;
  std::optional<std::uint32_t> q;  // absent: budget below the minimum payload
  double bits_used = 0.0;          // valid only when q is present
  CompressedUpdate update;         // valid only when q is present
  // Length-d vector every receiver adds to its estimate; all zeros when the
  // round is infeasible (the estimate freezes).
  std::vector<double> decoded;
};

// One digital broadcast: compresses theta - theta_hat against the capacity
// of the given realization, updates ps.theta_hat in place, and returns what
// every device decodes. quant_rng must be the round's quantizer stream.
DigitalRoundOutcome digital_broadcast(PsState& ps, const GainProfile& profile,
                                      std::uint32_t s, SeededRng& quant_rng);

// Same, against an already-computed bit budget (callers that pick the
// capacity kernel themselves).
DigitalRoundOutcome digital_broadcast(PsState& ps, double capacity_bits,
                                      std::uint32_t s, SeededRng& quant_rng);

// One analog broadcast: packs theta into complex symbols, scales each slot
// of n_dl subchannels to spend the full power budget, and returns each
// device's descaled estimate theta + scaled-noise. h and z carry one entry
// per packed symbol (ceil(d/2) of them); gains repeat across a round's slots
// only through the caller's draws, noise is consumed slot by slot.
std::vector<DeviceEstimate> analog_broadcast(
    const std::vector<double>& theta, double power, std::size_t n_dl,
    const std::vector<ComplexVec>& h_per_device,
    const std::vector<ComplexVec>& z_per_device);

namespace serial {
std::vector<DeviceEstimate> analog_broadcast(
    const std::vector<double>& theta, double power, std::size_t n_dl,
    const std::vector<ComplexVec>& h_per_device,
    const std::vector<ComplexVec>& z_per_device);
}  // namespace serial

// Transmit energy of each slot of the analog broadcast; equals power exactly
// for every slot with a nonzero payload chunk.
std::vector<double> analog_slot_powers(const std::vector<double>& theta,
                                       double power, std::size_t n_dl);

// First half of a (zero-padded) even-length vector becomes real parts,
// second half imaginary parts; merge is the exact inverse.
ComplexVec split_real_imag(const std::vector<double>& v);
std::vector<double> merge_real_imag(const ComplexVec& c);

}  // namespace feelsim
