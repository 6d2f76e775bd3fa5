// Copyright 2026 the feelsim authors
// SPDX-License-Identifier: Apache-2.0

#include "feelsim/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace feelsim {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// splitmix64 finalizer; good avalanche, so distinct key tuples land in
// unrelated engine seeds.
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

SeededRng::SeededRng(std::uint64_t seed, StreamPurpose purpose,
                     std::uint64_t round, std::uint64_t device) {
  std::uint64_t k = mix64(seed + 0x9e3779b97f4a7c15ULL);
  k = mix64(k ^ (static_cast<std::uint64_t>(purpose) * 0x9e3779b97f4a7c15ULL));
  k = mix64(k ^ (round * 0xbf58476d1ce4e5b9ULL));
  k = mix64(k ^ (device * 0x94d049bb133111ebULL));
  engine_.seed(k);
}

std::uint64_t SeededRng::next_u64() { return engine_(); }

double SeededRng::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SeededRng::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = kTwoPi * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

std::uint64_t SeededRng::uniform_below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_below: n must be >= 1");
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t rem = (max % n + 1) % n;  // 2^64 mod n
  std::uint64_t r = next_u64();
  if (rem != 0) {
    // Reject the top partial block so every residue is equally likely.
    while (r >= max - rem + 1) r = next_u64();
  }
  return r % n;
}

}  // namespace feelsim
