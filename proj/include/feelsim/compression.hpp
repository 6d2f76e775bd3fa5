// Copyright 2026 the feelsim authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "feelsim/rng.hpp"

namespace feelsim {

// Largest representable level count. Keeps every level exact in both a
// 32-bit field and a double, and keeps the bit-cost formula monotone; the
// quantization error at this q is already ~1e-9 relative, far below any
// tolerance in use.
inline constexpr std::uint32_t kMaxQuantLevels = 0x7fffffffu;

// Payload of one compressed broadcast: which entries survive, their signs,
// and their stochastic quantization against the [x_min, x_max] range of the
// surviving magnitudes.
struct CompressedUpdate {
  std::uint32_t d = 0;
  std::uint32_t q = 0;
  double x_min = 0.0;
  double x_max = 0.0;
  std::vector<std::uint32_t> support;  // strictly increasing indices into [d]
  std::vector<std::uint8_t> signs;     // 1 = negative
  std::vector<std::uint32_t> levels;   // each in [0, q]

  // Throws std::invalid_argument if any structural invariant is violated.
  void validate() const;
};

// Indices of the s largest-magnitude entries (ties broken toward the lower
// index), sorted ascending, plus the original values at those indices.
std::pair<std::vector<std::uint32_t>, std::vector<double>> sparsify(
    const std::vector<double>& x, std::uint32_t s);

// Stochastic rounding of x in [0,1] onto the grid {0, 1/q, ..., 1}: returns
// level l with probability 1-(xq-l) and l+1 with probability xq-l, where
// l = floor(xq) clamped to q-1 so x = 1 maps deterministically to q.
std::uint32_t phi_level(double x, std::uint32_t q, SeededRng& rng);

// phi_level's grid value l'/q.
double phi(double x, std::uint32_t q, SeededRng& rng);

// Quantizes the sparsified values (support is supplied separately); values
// arrive in support order. A degenerate range x_max == x_min maps every
// normalized argument to 0, so entries reconstruct to sign * x_min exactly.
CompressedUpdate quantize(const std::vector<std::uint32_t>& support,
                          const std::vector<double>& values, std::uint32_t d,
                          std::uint32_t q, SeededRng& rng);

// Length-d vector: zero off support, sign * (x_min + (x_max-x_min) * l/q) on
// support.
std::vector<double> decompress(const CompressedUpdate& c);

// Exact real-valued payload size in bits:
// 64 + s*(1 + log2(q+1)) + log2(d choose s), the last term via log-gamma.
double bit_cost(std::uint32_t d, std::uint32_t s, std::uint32_t q);

// Largest q >= 1 with bit_cost(d, s, q) <= capacity_bits (capped at
// kMaxQuantLevels); nullopt when even q = 1 does not fit. capacity_bits must
// be finite.
std::optional<std::uint32_t> max_q_for_budget(std::uint32_t d, std::uint32_t s,
                                              double capacity_bits);

// Little-endian debug framing: d, s, q as u32; x_min, x_max as f64; support
// as u32 each; signs packed one bit per entry; levels packed at
// ceil(log2(q+1)) bits each, LSB-first within bytes.
std::vector<std::uint8_t> serialize(const CompressedUpdate& c);
CompressedUpdate deserialize(const std::vector<std::uint8_t>& bytes);

}  // namespace feelsim
