// Copyright 2026 the feelsim authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#include "feelsim/rng.hpp"

namespace feelsim {

// Split-storage complex vector: one OFDM symbol worth of gains, noise, or
// transmit symbols.
struct ComplexVec {
  std::vector<double> re;
  std::vector<double> im;

  ComplexVec() = default;
  explicit ComplexVec(std::size_t n) : re(n, 0.0), im(n, 0.0) {}

  std::size_t size() const { return re.size(); }
};

struct ChannelParams {
  double sigma_dl;
  double sigma_ul;
  std::size_t n_dl;
  std::size_t n_ul;

  // Throws std::invalid_argument on non-positive variances or zero
  // subchannel counts.
  ChannelParams(double sigma_dl, double sigma_ul, std::size_t n_dl,
                std::size_t n_ul);
};

// len iid draws from a circularly symmetric complex Gaussian with total
// variance sigma (sigma/2 per real component).
ComplexVec draw_fading(double sigma, std::size_t len, SeededRng& rng);

// Unit-variance complex Gaussian noise (the model's normalization).
ComplexVec draw_noise(std::size_t len, SeededRng& rng);

// y_i = h_i * x_i + z_i.
ComplexVec apply_broadcast(const ComplexVec& x, const ComplexVec& h,
                           const ComplexVec& z);

// Multiple-access superposition: y_i = sum_m h_{m,i} * x_{m,i} + z_i.
// Parallelized over entries; each entry accumulates devices in index order,
// so results are bit-identical at any thread count.
ComplexVec apply_mac(const std::vector<ComplexVec>& xs,
                     const std::vector<ComplexVec>& hs, const ComplexVec& z);

namespace serial {
// Reference implementation with the same per-entry accumulation order.
ComplexVec apply_mac(const std::vector<ComplexVec>& xs,
                     const std::vector<ComplexVec>& hs, const ComplexVec& z);
}  // namespace serial

}  // namespace feelsim
