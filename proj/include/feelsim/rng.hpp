// Copyright 2026 the feelsim authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

namespace feelsim {

// Every consumer of randomness owns a stream keyed by (seed, purpose, round,
// device). Streams never overlap, so per-device work can run in any order or
// in parallel without changing a single draw.
enum class StreamPurpose : std::uint64_t {
  kDownlinkFading = 1,
  kDownlinkNoise = 2,
  kUplinkFading = 3,
  kUplinkNoise = 4,
  kQuantizer = 5,
  kBatchSampling = 6,
  kPartition = 7,
  kDataGen = 8,
};

// Deterministic generator with explicitly coded sampling. Distribution
// sampling deliberately avoids <random>'s distribution classes, whose output
// sequences are implementation-defined; mt19937_64 itself is fully specified,
// so identical keys give identical draws on every platform.
class SeededRng {
 public:
  SeededRng(std::uint64_t seed, StreamPurpose purpose, std::uint64_t round = 0,
            std::uint64_t device = 0);

  std::uint64_t next_u64();

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform01();

  // Standard normal via Box-Muller (pairs are cached).
  double gaussian();

  // Unbiased uniform integer in [0, n); n must be >= 1.
  std::uint64_t uniform_below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace feelsim
