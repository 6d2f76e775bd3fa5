// Copyright 2026 the feelsim authors
// SPDX-License-Identifier: Apache-2.0

#include "feelsim/bound.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace feelsim {

void BoundParams::validate() const {
  if (!(mu > 0.0)) throw std::invalid_argument("bound: mu must be > 0");
  if (!(L > 0.0)) throw std::invalid_argument("bound: L must be > 0");
  if (tau == 0) throw std::invalid_argument("bound: tau must be >= 1");
  if (!(G2 >= 0.0)) throw std::invalid_argument("bound: G2 must be >= 0");
  if (!(Gamma >= 0.0)) throw std::invalid_argument("bound: Gamma must be >= 0");
  if (!(Z2 >= 0.0)) throw std::invalid_argument("bound: Z2 must be >= 0");
  if (M == 0) throw std::invalid_argument("bound: M must be >= 1");
  if (!(sigma_dl > 0.0))
    throw std::invalid_argument("bound: sigma_dl must be > 0");
  if (!(P_dl > 0.0)) throw std::invalid_argument("bound: P_dl must be > 0");
  if (!(init_gap >= 0.0))
    throw std::invalid_argument("bound: init_gap must be >= 0");
  if (eta_schedule.base && !(*eta_schedule.base > 0.0))
    throw std::invalid_argument("bound: eta base must be > 0");
  if (!(eta_schedule.decay >= 0.0))
    throw std::invalid_argument("bound: eta decay must be >= 0");
}

double BoundParams::eta_cap() const {
  return std::min(mu / (mu + 1.0), 1.0 / (mu * static_cast<double>(tau)));
}

double BoundParams::eta(std::uint64_t t) const {
  const double base = eta_schedule.base ? *eta_schedule.base : eta_cap();
  return base / (1.0 + eta_schedule.decay * static_cast<double>(t));
}

namespace {

double checked_eta(const BoundParams& p, std::uint64_t i) {
  const double e = p.eta(i);
  if (!(e > 0.0) || e > p.eta_cap())
    throw std::domain_error(
        "bound: eta(t) outside (0, min{mu/(mu+1), 1/(mu*tau)}]");
  return e;
}

}  // namespace

double coeff_A(const BoundParams& p, std::uint64_t i) {
  p.validate();
  const double eta = checked_eta(p, i);
  const double tau = static_cast<double>(p.tau);
  const double a =
      1.0 - p.mu * eta * (tau - eta * (tau - 1.0 + 1.0 / p.mu));
  if (!(a > 0.0 && a <= 1.0))
    throw std::logic_error("bound: contraction factor escaped (0, 1]");
  return a;
}

double coeff_B(const BoundParams& p, std::uint64_t i) {
  p.validate();
  const double eta = checked_eta(p, i);
  const double tau = static_cast<double>(p.tau);
  const double noise =
      p.Z2 / (static_cast<double>(p.M) * p.sigma_dl * p.P_dl);
  const double drift = (1.0 + p.mu * (1.0 - eta)) * eta * eta * p.G2 * tau *
                       (tau - 1.0) * (2.0 * tau - 1.0) / 6.0;
  const double variance =
      (tau - 1.0 + eta * eta * (tau * tau + tau - 1.0)) * p.G2;
  const double hetero = 2.0 * eta * (tau - 1.0) * p.Gamma;
  return noise + drift + variance + hetero;
}

std::vector<double> bound_trajectory(const BoundParams& p, std::uint64_t T) {
  p.validate();
  if (T == 0) throw std::invalid_argument("bound: T must be >= 1");
  std::vector<double> out;
  out.reserve(T);
  double u = p.init_gap;
  for (std::uint64_t t = 0; t < T; ++t) {
    u = coeff_A(p, t) * u + coeff_B(p, t);
    if (!std::isfinite(u))
      throw std::overflow_error("bound: trajectory overflowed at t=" +
                                std::to_string(t + 1));
    out.push_back(u);
  }
  return out;
}

std::vector<double> loss_bound(const BoundParams& p, std::uint64_t T) {
  std::vector<double> out = bound_trajectory(p, T);
  const double half_l = 0.5 * p.L;
  for (double& v : out) v *= half_l;
  return out;
}

double stationary_floor(const BoundParams& p) {
  p.validate();
  return p.Z2 / (static_cast<double>(p.M) * p.sigma_dl * p.P_dl) +
         (static_cast<double>(p.tau) - 1.0) * p.G2;
}

namespace {

std::uint32_t as_positive_int(double v, const char* what) {
  if (!(v >= 1.0) || v != std::floor(v) || v > 4294967295.0)
    throw std::invalid_argument(std::string("bound sweep: ") + what +
                                " values must be positive integers");
  return static_cast<std::uint32_t>(v);
}

void apply_sweep_value(BoundParams& p, const std::string& vary, double v) {
  if (vary == "tau") {
    p.tau = as_positive_int(v, "tau");
  } else if (vary == "Pdl") {
    p.P_dl = v;
  } else if (vary == "M") {
    p.M = as_positive_int(v, "M");
  } else if (vary == "G2") {
    p.G2 = v;
  } else if (vary == "Gamma") {
    p.Gamma = v;
  } else if (vary == "Z2") {
    p.Z2 = v;
  } else {
    throw std::invalid_argument("bound sweep: unknown parameter '" + vary +
                                "'");
  }
}

}  // namespace

std::vector<std::vector<BoundRow>> sweep(const BoundParams& tmpl,
                                         const std::string& vary,
                                         const std::vector<double>& values,
                                         std::uint64_t T) {
  std::vector<std::vector<BoundRow>> table;
  table.reserve(values.size());
  for (double v : values) {
    BoundParams p = tmpl;
    apply_sweep_value(p, vary, v);
    const std::vector<double> traj = loss_bound(p, T);
    std::vector<BoundRow> rows;
    rows.reserve(traj.size());
    for (std::uint64_t t = 0; t < traj.size(); ++t)
      rows.push_back(BoundRow{t + 1, p.tau, p.P_dl, traj[t]});
    table.push_back(std::move(rows));
  }
  return table;
}

}  // namespace feelsim
