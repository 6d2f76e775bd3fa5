// Copyright 2026 the feelsim authors
// SPDX-License-Identifier: Apache-2.0

#include "feelsim/uplink.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace feelsim {

namespace {

inline double packed_at(const std::vector<double>& v, std::size_t i) {
  return i < v.size() ? v[i] : 0.0;
}

}  // namespace

UplinkConfig::UplinkConfig(double power_in, double threshold_in,
                           std::size_t n_ul_in)
    : power(power_in), threshold(threshold_in), n_ul(n_ul_in) {
  if (!(power > 0.0) || !std::isfinite(power))
    throw std::invalid_argument("UplinkConfig: power must be finite, > 0");
  if (!(threshold >= 0.0) || !std::isfinite(threshold))
    throw std::invalid_argument("UplinkConfig: threshold must be finite, >= 0");
  if (n_ul == 0)
    throw std::invalid_argument("UplinkConfig: n_ul must be >= 1");
}

DevicePrecode device_precode(const std::vector<double>& delta,
                             const ComplexVec& h_ul, const UplinkConfig& cfg) {
  if (delta.empty()) throw std::invalid_argument("device_precode: empty delta");
  const std::size_t d2 = (delta.size() + 1) / 2;
  if (h_ul.size() != d2)
    throw std::invalid_argument(
        "device_precode: h must have ceil(d/2) entries");
  DevicePrecode out;
  out.x = ComplexVec(d2);
  double inv_energy = 0.0;  // sum over passing entries of |packed/h|^2
  for (std::size_t k = 0; k < d2; ++k) {
    const double mag2 = h_ul.re[k] * h_ul.re[k] + h_ul.im[k] * h_ul.im[k];
    if (std::sqrt(mag2) < cfg.threshold) continue;
    const double re = packed_at(delta, k);
    const double im = packed_at(delta, k + d2);
    inv_energy += (re * re + im * im) / mag2;
  }
  if (inv_energy <= 0.0) return out;  // fully gated or zero payload: silent
  out.gamma = std::sqrt(cfg.power / inv_energy);
  for (std::size_t k = 0; k < d2; ++k) {
    const double mag2 = h_ul.re[k] * h_ul.re[k] + h_ul.im[k] * h_ul.im[k];
    if (std::sqrt(mag2) < cfg.threshold) continue;
    const std::complex<double> sym(packed_at(delta, k),
                                   packed_at(delta, k + d2));
    const std::complex<double> tx =
        out.gamma * sym / std::complex<double>(h_ul.re[k], h_ul.im[k]);
    out.x.re[k] = tx.real();
    out.x.im[k] = tx.imag();
  }
  return out;
}

std::vector<double> ps_decode(const ComplexVec& y,
                              const std::vector<double>& gammas,
                              const std::vector<std::uint32_t>& active_counts,
                              std::size_t d) {
  const std::size_t d2 = (d + 1) / 2;
  if (y.size() != d2 || active_counts.size() != d2)
    throw std::invalid_argument("ps_decode: length mismatch");
  if (gammas.empty()) throw std::invalid_argument("ps_decode: no devices");
  double gamma_bar = 0.0;
  for (double g : gammas) gamma_bar += g;
  gamma_bar /= static_cast<double>(gammas.size());
  std::vector<double> out(d, 0.0);
  if (gamma_bar == 0.0) return out;  // every device silent this round
  for (std::size_t k = 0; k < d2; ++k) {
    if (active_counts[k] == 0) continue;
    const double denom = gamma_bar * static_cast<double>(active_counts[k]);
    out[k] = y.re[k] / denom;
    if (k + d2 < d) out[k + d2] = y.im[k] / denom;
  }
  return out;
}

namespace {

UplinkRoundResult aggregate_common(
    const std::vector<std::vector<double>>& deltas,
    const std::vector<ComplexVec>& h_uls, const ComplexVec& z,
    const UplinkConfig& cfg, bool parallel) {
  if (deltas.empty() || deltas.size() != h_uls.size())
    throw std::invalid_argument("aggregate_round: need matching inputs, M >= 1");
  const std::size_t d = deltas[0].size();
  const std::size_t d2 = (d + 1) / 2;
  for (const auto& dm : deltas)
    if (dm.size() != d)
      throw std::invalid_argument("aggregate_round: delta length mismatch");
  for (const auto& h : h_uls)
    if (h.size() != d2)
      throw std::invalid_argument("aggregate_round: h length mismatch");
  if (z.size() != d2)
    throw std::invalid_argument("aggregate_round: z length mismatch");

  const std::size_t m_count = deltas.size();
  std::vector<DevicePrecode> pre(m_count);
  const std::int64_t mi = static_cast<std::int64_t>(m_count);
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t m = 0; m < mi; ++m)
      pre[m] = device_precode(deltas[m], h_uls[m], cfg);
  } else {
    for (std::int64_t m = 0; m < mi; ++m)
      pre[m] = device_precode(deltas[m], h_uls[m], cfg);
  }

  UplinkRoundResult res;
  res.gammas.resize(m_count);
  for (std::size_t m = 0; m < m_count; ++m) res.gammas[m] = pre[m].gamma;
  res.gamma_bar = 0.0;
  for (double g : res.gammas) res.gamma_bar += g;
  res.gamma_bar /= static_cast<double>(m_count);

  res.active_counts.assign(d2, 0);
  for (std::size_t m = 0; m < m_count; ++m)
    for (std::size_t k = 0; k < d2; ++k) {
      const double mag2 = h_uls[m].re[k] * h_uls[m].re[k] +
                          h_uls[m].im[k] * h_uls[m].im[k];
      if (std::sqrt(mag2) >= cfg.threshold) ++res.active_counts[k];
    }

  std::vector<ComplexVec> xs(m_count);
  for (std::size_t m = 0; m < m_count; ++m) xs[m] = std::move(pre[m].x);
  const ComplexVec y = parallel ? apply_mac(xs, h_uls, z)
                                : serial::apply_mac(xs, h_uls, z);
  res.delta_hat = ps_decode(y, res.gammas, res.active_counts, d);
  return res;
}

}  // namespace

UplinkRoundResult aggregate_round(const std::vector<std::vector<double>>& deltas,
                                  const std::vector<ComplexVec>& h_uls,
                                  const ComplexVec& z,
                                  const UplinkConfig& cfg) {
  return aggregate_common(deltas, h_uls, z, cfg, true);
}

namespace serial {
UplinkRoundResult aggregate_round(const std::vector<std::vector<double>>& deltas,
                                  const std::vector<ComplexVec>& h_uls,
                                  const ComplexVec& z,
                                  const UplinkConfig& cfg) {
  return aggregate_common(deltas, h_uls, z, cfg, false);
}
}  // namespace serial

std::vector<double> aggregate_errorfree(
    const std::vector<std::vector<double>>& deltas,
    const std::vector<double>& weights) {
  if (deltas.empty() || deltas.size() != weights.size())
    throw std::invalid_argument(
        "aggregate_errorfree: need matching deltas/weights, M >= 1");
  std::vector<double> out(deltas[0].size(), 0.0);
  for (std::size_t m = 0; m < deltas.size(); ++m) {
    if (deltas[m].size() != out.size())
      throw std::invalid_argument("aggregate_errorfree: length mismatch");
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] += weights[m] * deltas[m][i];
  }
  return out;
}

}  // namespace feelsim
