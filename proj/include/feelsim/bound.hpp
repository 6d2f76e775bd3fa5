// Copyright 2026 the feelsim authors
// SPDX-License-Identifier: Apache-2.0
//
// Analytic upper bound on the expected optimality gap of federated SGD with
// a noisy analog downlink and error-free uplink, evaluated as a one-round
// forward recursion u(t+1) = A(t) u(t) + B(t).

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace feelsim {

// Step-size schedule eta(t) = base / (1 + decay * t).  When base is unset it
// resolves to the largest admissible value min{mu/(mu+1), 1/(mu*tau)}, so it
// stays valid when tau is swept.
struct EtaSchedule {
  std::optional<double> base;
  double decay = 0.0;
};

struct BoundParams {
  double mu = 0.2;        // strong-convexity modulus, > 0
  double L = 10.0;        // smoothness constant, > 0
  std::uint32_t tau = 1;  // local SGD steps per round, >= 1
  double G2 = 0.0;        // second-moment bound on stochastic gradients
  double Gamma = 0.0;     // data-heterogeneity gap, >= 0
  double Z2 = 0.0;        // downlink model-norm proxy, >= 0
  std::uint32_t M = 1;    // number of devices, >= 1
  double sigma_dl = 1.0;  // downlink fading variance, > 0
  double P_dl = 1.0;      // downlink power budget, > 0
  double init_gap = 0.0;  // ||theta(0) - theta*||^2, >= 0
  EtaSchedule eta_schedule;

  void validate() const;   // throws std::invalid_argument on bad fields
  double eta_cap() const;  // min{mu/(mu+1), 1/(mu*tau)}
  double eta(std::uint64_t t) const;
};

// Contraction factor of the recursion at round i.  Rejects step sizes outside
// (0, eta_cap()] and checks the resulting value lies in (0, 1].
double coeff_A(const BoundParams& p, std::uint64_t i);

// Additive error at round i: downlink noise term plus local-drift terms.
double coeff_B(const BoundParams& p, std::uint64_t i);

// Bound on E||theta(t) - theta*||^2 for t = 1..T via the forward recursion
// with u(0) = init_gap.  Rejects T = 0 and numeric overflow.
std::vector<double> bound_trajectory(const BoundParams& p, std::uint64_t T);

// (L/2) * bound_trajectory: upper bound on the expected optimality gap.
std::vector<double> loss_bound(const BoundParams& p, std::uint64_t T);

// Limit of coeff_B as the step size decays to zero:
// Z2/(M*sigma_dl*P_dl) + (tau-1)*G2.
double stationary_floor(const BoundParams& p);

struct BoundRow {
  std::uint64_t t;
  std::uint32_t tau;
  double P_dl;
  double bound;
};

// Evaluates loss_bound once per value of the varied parameter; one inner
// vector per value, rows t = 1..T.  vary is one of "tau", "Pdl", "M", "G2",
// "Gamma", "Z2"; unknown names are rejected.
std::vector<std::vector<BoundRow>> sweep(const BoundParams& tmpl,
                                         const std::string& vary,
                                         const std::vector<double>& values,
                                         std::uint64_t T);

}  // namespace feelsim
