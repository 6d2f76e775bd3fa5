// Copyright 2026 the feelsim authors
// SPDX-License-Identifier: Apache-2.0

#include "feelsim/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace feelsim {

namespace {

void check_same_size(const ComplexVec& a, const char* what) {
  if (a.re.size() != a.im.size())
    throw std::invalid_argument(std::string(what) +
                                ": re/im length mismatch");
}

// One device's contribution to one entry, kept in a helper so the broadcast
// and MAC paths compile to the same arithmetic.
inline void cmul_add(double hr, double hi, double xr, double xi, double& ar,
                     double& ai) {
  ar += hr * xr - hi * xi;
  ai += hr * xi + hi * xr;
}

}  // namespace

ChannelParams::ChannelParams(double sigma_dl, double sigma_ul,
                             std::size_t n_dl, std::size_t n_ul)
    : sigma_dl(sigma_dl), sigma_ul(sigma_ul), n_dl(n_dl), n_ul(n_ul) {
  if (!(sigma_dl > 0.0) || !std::isfinite(sigma_dl))
    throw std::invalid_argument("ChannelParams: sigma_dl must be > 0");
  if (!(sigma_ul > 0.0) || !std::isfinite(sigma_ul))
    throw std::invalid_argument("ChannelParams: sigma_ul must be > 0");
  if (n_dl == 0 || n_ul == 0)
    throw std::invalid_argument("ChannelParams: subchannel counts must be >= 1");
}

ComplexVec draw_fading(double sigma, std::size_t len, SeededRng& rng) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw std::invalid_argument("draw_fading: sigma must be > 0 and finite");
  if (len == 0) throw std::invalid_argument("draw_fading: len must be >= 1");
  const double scale = std::sqrt(sigma / 2.0);
  ComplexVec out(len);
  for (std::size_t i = 0; i < len; ++i) {
    out.re[i] = scale * rng.gaussian();
    out.im[i] = scale * rng.gaussian();
  }
  return out;
}

ComplexVec draw_noise(std::size_t len, SeededRng& rng) {
  return draw_fading(1.0, len, rng);
}

ComplexVec apply_broadcast(const ComplexVec& x, const ComplexVec& h,
                           const ComplexVec& z) {
  check_same_size(x, "apply_broadcast x");
  check_same_size(h, "apply_broadcast h");
  check_same_size(z, "apply_broadcast z");
  const std::size_t n = x.size();
  if (h.size() != n || z.size() != n)
    throw std::invalid_argument("apply_broadcast: length mismatch");
  ComplexVec y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double ar = 0.0, ai = 0.0;
    cmul_add(h.re[i], h.im[i], x.re[i], x.im[i], ar, ai);
    y.re[i] = ar + z.re[i];
    y.im[i] = ai + z.im[i];
  }
  return y;
}

namespace {

void check_mac_args(const std::vector<ComplexVec>& xs,
                    const std::vector<ComplexVec>& hs, const ComplexVec& z) {
  if (xs.empty() || xs.size() != hs.size())
    throw std::invalid_argument("apply_mac: need matching xs/hs, M >= 1");
  check_same_size(z, "apply_mac z");
  const std::size_t n = z.size();
  for (std::size_t m = 0; m < xs.size(); ++m) {
    check_same_size(xs[m], "apply_mac x");
    check_same_size(hs[m], "apply_mac h");
    if (xs[m].size() != n || hs[m].size() != n)
      throw std::invalid_argument("apply_mac: length mismatch");
  }
}

}  // namespace

ComplexVec apply_mac(const std::vector<ComplexVec>& xs,
                     const std::vector<ComplexVec>& hs, const ComplexVec& z) {
  check_mac_args(xs, hs, z);
  const std::size_t m_count = xs.size();
  ComplexVec y(z.size());
  const std::int64_t ni = static_cast<std::int64_t>(z.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < ni; ++i) {
    double ar = 0.0, ai = 0.0;
    for (std::size_t m = 0; m < m_count; ++m)
      cmul_add(hs[m].re[i], hs[m].im[i], xs[m].re[i], xs[m].im[i], ar, ai);
    y.re[i] = ar + z.re[i];
    y.im[i] = ai + z.im[i];
  }
  return y;
}

namespace serial {
ComplexVec apply_mac(const std::vector<ComplexVec>& xs,
                     const std::vector<ComplexVec>& hs, const ComplexVec& z) {
  check_mac_args(xs, hs, z);
  const std::size_t m_count = xs.size();
  ComplexVec y(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    double ar = 0.0, ai = 0.0;
    for (std::size_t m = 0; m < m_count; ++m)
      cmul_add(hs[m].re[i], hs[m].im[i], xs[m].re[i], xs[m].im[i], ar, ai);
    y.re[i] = ar + z.re[i];
    y.im[i] = ai + z.im[i];
  }
  return y;
}
}  // namespace serial

}  // namespace feelsim
