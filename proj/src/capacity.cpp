// Copyright 2026 the feelsim authors
// SPDX-License-Identifier: Apache-2.0

#include "feelsim/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace feelsim {

GainProfile::GainProfile(std::vector<std::vector<double>> gains_in,
                         double power_in)
    : gains(std::move(gains_in)), power(power_in) {
  if (gains.empty())
    throw std::invalid_argument("GainProfile: need at least one device");
  for (const auto& g : gains) {
    if (g.empty())
      throw std::invalid_argument("GainProfile: need at least one subchannel");
    if (g.size() != gains.front().size())
      throw std::invalid_argument(
          "GainProfile: devices must share the subchannel count");
    for (double v : g)
      if (!(v >= 0.0) || !std::isfinite(v))
        throw std::invalid_argument("GainProfile: gains must be finite, >= 0");
  }
  if (!(power > 0.0) || !std::isfinite(power))
    throw std::invalid_argument("GainProfile: power must be finite, > 0");
}

WaterfillResult waterfill(const std::vector<double>& gains, double power) {
  if (gains.empty())
    throw std::invalid_argument("waterfill: need at least one subchannel");
  if (!(power > 0.0) || !std::isfinite(power))
    throw std::invalid_argument("waterfill: power must be finite, > 0");
  std::vector<std::size_t> order;
  order.reserve(gains.size());
  for (std::size_t i = 0; i < gains.size(); ++i) {
    if (!(gains[i] >= 0.0) || !std::isfinite(gains[i]))
      throw std::invalid_argument("waterfill: gains must be finite, >= 0");
    if (gains[i] > 0.0) order.push_back(i);
  }
  if (order.empty()) return {};  // all-zero gains: zero capacity
  std::sort(order.begin(), order.end(), [&gains](std::size_t a, std::size_t b) {
    if (gains[a] != gains[b]) return gains[a] > gains[b];
    return a < b;
  });
  // The optimal active set is a prefix of the gain-sorted channels: grow it
  // while the implied water level stays above the next channel's 1/g.
  std::size_t active = 1;
  double inv_sum = 1.0 / gains[order[0]];
  for (std::size_t k = 1; k < order.size(); ++k) {
    const double inv_next = 1.0 / gains[order[k]];
    const double nu = (power + inv_sum + inv_next) / static_cast<double>(k + 1);
    if (nu <= inv_next) break;
    inv_sum += inv_next;
    active = k + 1;
  }
  const double nu = (power + inv_sum) / static_cast<double>(active);
  WaterfillResult res;
  res.allocation.assign(gains.size(), 0.0);
  for (std::size_t k = 0; k < active; ++k) {
    const std::size_t i = order[k];
    res.allocation[i] = nu - 1.0 / gains[i];
  }
  double rate = 0.0;
  for (std::size_t i = 0; i < gains.size(); ++i)
    if (res.allocation[i] > 0.0)
      rate += std::log2(1.0 + res.allocation[i] * gains[i]);
  res.rate = rate;
  return res;
}

double common_rate(const GainProfile& profile) {
  const std::size_t m_count = profile.gains.size();
  std::vector<double> rates(m_count, 0.0);
  const std::int64_t mi = static_cast<std::int64_t>(m_count);
#pragma omp parallel for schedule(static)
  for (std::int64_t m = 0; m < mi; ++m)
    rates[m] = waterfill(profile.gains[m], profile.power).rate;
  double min_rate = rates[0];
  for (double r : rates) min_rate = std::min(min_rate, r);
  return min_rate;
}

namespace serial {
double common_rate(const GainProfile& profile) {
  double min_rate = waterfill(profile.gains[0], profile.power).rate;
  for (std::size_t m = 1; m < profile.gains.size(); ++m)
    min_rate = std::min(min_rate,
                        waterfill(profile.gains[m], profile.power).rate);
  return min_rate;
}
}  // namespace serial

}  // namespace feelsim
