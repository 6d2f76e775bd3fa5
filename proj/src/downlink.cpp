// Copyright 2026 the feelsim authors
// SPDX-License-Identifier: Apache-2.0

#include "feelsim/downlink.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace feelsim {

namespace {

// Packed symbol k of a d-length model vector: (v[k], v[k + d2]) with a zero
// pad when d is odd.
inline double packed_at(const std::vector<double>& v, std::size_t i) {
  return i < v.size() ? v[i] : 0.0;
}

struct SlotScales {
  std::vector<double> alpha;       // per slot
  std::vector<std::size_t> start;  // slot k covers [start[k], start[k+1])
};

SlotScales compute_slot_scales(const std::vector<double>& theta, double power,
                               std::size_t n_dl, std::size_t d2) {
  if (!(power > 0.0) || !std::isfinite(power))
    throw std::invalid_argument("analog_broadcast: power must be > 0");
  if (n_dl == 0)
    throw std::invalid_argument("analog_broadcast: n_dl must be >= 1");
  SlotScales s;
  for (std::size_t begin = 0; begin < d2; begin += n_dl) {
    const std::size_t end = std::min(d2, begin + n_dl);
    double norm2 = 0.0;
    for (std::size_t k = begin; k < end; ++k) {
      const double re = packed_at(theta, k);
      const double im = packed_at(theta, k + d2);
      norm2 += re * re + im * im;
    }
    s.alpha.push_back(std::sqrt(power / std::max(norm2, kAnalogNormFloor)));
    s.start.push_back(begin);
  }
  s.start.push_back(d2);
  return s;
}

void device_estimate(const std::vector<double>& theta, const SlotScales& s,
                     std::size_t d2, const ComplexVec& h, const ComplexVec& z,
                     DeviceEstimate& out) {
  const std::size_t d = theta.size();
  if (h.size() != d2 || z.size() != d2)
    throw std::invalid_argument(
        "analog_broadcast: per-device h/z must have ceil(d/2) entries");
  out.theta_hat_m = theta;
  // Descaling by 1/(alpha h) cancels the known channel exactly, so the
  // estimate is theta plus scaled noise; computing it in that form keeps the
  // noiseless path exact.
  double mse = 0.0;
  for (std::size_t slot = 0; slot + 1 < s.start.size(); ++slot) {
    const double alpha = s.alpha[slot];
    for (std::size_t k = s.start[slot]; k < s.start[slot + 1]; ++k) {
      const std::complex<double> w =
          std::complex<double>(z.re[k], z.im[k]) /
          (alpha * std::complex<double>(h.re[k], h.im[k]));
      out.theta_hat_m[k] += w.real();
      mse += w.real() * w.real();
      if (k + d2 < d) {
        out.theta_hat_m[k + d2] += w.imag();
        mse += w.imag() * w.imag();
      }
    }
  }
  out.mse = mse;
}

}  // namespace

DigitalRoundOutcome digital_broadcast(PsState& ps, const GainProfile& profile,
                                      std::uint32_t s, SeededRng& quant_rng) {
  return digital_broadcast(ps, common_rate(profile), s, quant_rng);
}

DigitalRoundOutcome digital_broadcast(PsState& ps, double capacity_bits,
                                      std::uint32_t s, SeededRng& quant_rng) {
  const std::size_t d = ps.theta.size();
  if (ps.theta_hat.size() != d)
    throw std::invalid_argument("digital_broadcast: state length mismatch");
  if (s == 0 || s > d)
    throw std::invalid_argument("digital_broadcast: need 1 <= s <= d");
  DigitalRoundOutcome out;
  out.capacity_bits = capacity_bits;
  out.decoded.assign(d, 0.0);
  out.q = max_q_for_budget(static_cast<std::uint32_t>(d), s,
                           out.capacity_bits);
  if (!out.q) return out;  // estimate freezes this round
  std::vector<double> delta(d);
  for (std::size_t i = 0; i < d; ++i) delta[i] = ps.theta[i] - ps.theta_hat[i];
  auto [support, values] = sparsify(delta, s);
  out.update = quantize(support, values, static_cast<std::uint32_t>(d), *out.q,
                        quant_rng);
  out.bits_used = bit_cost(static_cast<std::uint32_t>(d), s, *out.q);
  out.decoded = decompress(out.update);
  for (std::size_t i = 0; i < d; ++i) ps.theta_hat[i] += out.decoded[i];
  return out;
}

namespace {

std::vector<DeviceEstimate> analog_broadcast_common(
    const std::vector<double>& theta, double power, std::size_t n_dl,
    const std::vector<ComplexVec>& h_per_device,
    const std::vector<ComplexVec>& z_per_device, bool parallel) {
  if (theta.empty())
    throw std::invalid_argument("analog_broadcast: empty model");
  if (h_per_device.empty() || h_per_device.size() != z_per_device.size())
    throw std::invalid_argument("analog_broadcast: need matching h/z, M >= 1");
  const std::size_t d2 = (theta.size() + 1) / 2;
  // Validate outside the parallel region: an exception may not cross it.
  for (std::size_t m = 0; m < h_per_device.size(); ++m)
    if (h_per_device[m].size() != d2 || z_per_device[m].size() != d2)
      throw std::invalid_argument(
          "analog_broadcast: per-device h/z must have ceil(d/2) entries");
  const SlotScales scales = compute_slot_scales(theta, power, n_dl, d2);
  std::vector<DeviceEstimate> out(h_per_device.size());
  const std::int64_t m_count = static_cast<std::int64_t>(h_per_device.size());
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t m = 0; m < m_count; ++m)
      device_estimate(theta, scales, d2, h_per_device[m], z_per_device[m],
                      out[m]);
  } else {
    for (std::int64_t m = 0; m < m_count; ++m)
      device_estimate(theta, scales, d2, h_per_device[m], z_per_device[m],
                      out[m]);
  }
  return out;
}

}  // namespace

std::vector<DeviceEstimate> analog_broadcast(
    const std::vector<double>& theta, double power, std::size_t n_dl,
    const std::vector<ComplexVec>& h_per_device,
    const std::vector<ComplexVec>& z_per_device) {
  return analog_broadcast_common(theta, power, n_dl, h_per_device,
                                 z_per_device, true);
}

namespace serial {
std::vector<DeviceEstimate> analog_broadcast(
    const std::vector<double>& theta, double power, std::size_t n_dl,
    const std::vector<ComplexVec>& h_per_device,
    const std::vector<ComplexVec>& z_per_device) {
  return analog_broadcast_common(theta, power, n_dl, h_per_device,
                                 z_per_device, false);
}
}  // namespace serial

std::vector<double> analog_slot_powers(const std::vector<double>& theta,
                                       double power, std::size_t n_dl) {
  if (theta.empty())
    throw std::invalid_argument("analog_slot_powers: empty model");
  const std::size_t d2 = (theta.size() + 1) / 2;
  const SlotScales s = compute_slot_scales(theta, power, n_dl, d2);
  std::vector<double> energies;
  for (std::size_t slot = 0; slot + 1 < s.start.size(); ++slot) {
    double norm2 = 0.0;
    for (std::size_t k = s.start[slot]; k < s.start[slot + 1]; ++k) {
      const double re = s.alpha[slot] * packed_at(theta, k);
      const double im = s.alpha[slot] * packed_at(theta, k + d2);
      norm2 += re * re + im * im;
    }
    energies.push_back(norm2);
  }
  return energies;
}

ComplexVec split_real_imag(const std::vector<double>& v) {
  if (v.size() % 2 != 0)
    throw std::invalid_argument("split_real_imag: length must be even");
  const std::size_t half = v.size() / 2;
  ComplexVec c(half);
  for (std::size_t i = 0; i < half; ++i) {
    c.re[i] = v[i];
    c.im[i] = v[half + i];
  }
  return c;
}

std::vector<double> merge_real_imag(const ComplexVec& c) {
  if (c.re.size() != c.im.size())
    throw std::invalid_argument("merge_real_imag: re/im length mismatch");
  std::vector<double> v(2 * c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    v[i] = c.re[i];
    v[c.size() + i] = c.im[i];
  }
  return v;
}

}  // namespace feelsim
