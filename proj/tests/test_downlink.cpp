// Copyright 2026 the feelsim authors
// SPDX-License-Identifier: Apache-2.0

#include "feelsim/downlink.hpp"

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "feelsim/capacity.hpp"
#include "feelsim/channel.hpp"
#include "feelsim/compression.hpp"
#include "feelsim/rng.hpp"

using namespace feelsim;

namespace {

std::vector<double> random_vec(SeededRng& rng, std::size_t n,
                               double scale = 1.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = scale * (2.0 * rng.uniform01() - 1.0);
  return v;
}

// Unit-modulus fading with a random phase: keeps 1/|h| bounded so noise
// statistics in Monte Carlo tests have finite, known variance.
ComplexVec random_phase_fading(SeededRng& rng, std::size_t n) {
  ComplexVec h(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double phi = 2.0 * 3.14159265358979323846 * rng.uniform01();
    h.re[i] = std::cos(phi);
    h.im[i] = std::sin(phi);
  }
  return h;
}

ComplexVec zero_vec(std::size_t n) { return ComplexVec(n); }

}  // namespace

TEST_CASE("digital broadcast with no drift sends an all-zero update") {
  PsState ps;
  ps.theta = {0.4, -1.5, 2.0, 0.0, 3.25};
  ps.theta_hat = ps.theta;
  const std::vector<double> before = ps.theta_hat;
  SeededRng rng(11, StreamPurpose::kQuantizer, 1);
  const DigitalRoundOutcome out = digital_broadcast(ps, 1.0e6, 3, rng);
  REQUIRE(out.q.has_value());
  for (std::uint32_t lvl : out.update.levels) CHECK(lvl == 0);
  for (double v : out.decoded) CHECK(v == 0.0);
  CHECK(ps.theta_hat == before);
}

TEST_CASE("digital broadcast freezes the estimate when even q=1 does not fit") {
  PsState ps;
  ps.theta = {1.0, 2.0, 3.0, 4.0};
  ps.theta_hat = {0.0, 0.0, 0.0, 0.0};
  SeededRng rng(12, StreamPurpose::kQuantizer, 1);
  // bit_cost always starts at 64 bits of header, so 50 bits can never fit.
  const DigitalRoundOutcome out = digital_broadcast(ps, 50.0, 2, rng);
  CHECK_FALSE(out.q.has_value());
  CHECK(out.capacity_bits == 50.0);
  for (double v : out.decoded) CHECK(v == 0.0);
  CHECK(ps.theta_hat == std::vector<double>{0.0, 0.0, 0.0, 0.0});
}

TEST_CASE("digital broadcast error is bounded per entry by the grid spacing") {
  const std::uint32_t d = 16;
  SeededRng init(13, StreamPurpose::kDataGen);
  PsState ps;
  ps.theta = random_vec(init, d, 5.0);
  ps.theta_hat = random_vec(init, d, 5.0);
  // A budget of exactly bit_cost(d, d, 8) pins q = 8 (boundary feasibility).
  const double budget = bit_cost(d, d, 8);
  SeededRng rng(13, StreamPurpose::kQuantizer, 1);
  const DigitalRoundOutcome out = digital_broadcast(ps, budget, d, rng);
  REQUIRE(out.q.has_value());
  CHECK(*out.q == 8);
  const double spacing = (out.update.x_max - out.update.x_min) / 8.0;
  for (std::uint32_t i = 0; i < d; ++i)
    CHECK(std::abs(ps.theta_hat[i] - ps.theta[i]) <= spacing + 1e-15);
}

TEST_CASE("digital broadcast leaves off-support entries of the estimate untouched") {
  const std::uint32_t d = 12;
  SeededRng init(14, StreamPurpose::kDataGen);
  PsState ps;
  ps.theta = random_vec(init, d, 2.0);
  ps.theta_hat = random_vec(init, d, 2.0);
  const std::vector<double> before = ps.theta_hat;
  SeededRng rng(14, StreamPurpose::kQuantizer, 1);
  const DigitalRoundOutcome out = digital_broadcast(ps, 1.0e4, 4, rng);
  REQUIRE(out.q.has_value());
  REQUIRE(out.update.support.size() == 4);
  std::vector<bool> on_support(d, false);
  for (std::uint32_t idx : out.update.support) on_support[idx] = true;
  for (std::uint32_t i = 0; i < d; ++i)
    if (!on_support[i]) {
      CHECK(out.decoded[i] == 0.0);
      CHECK(ps.theta_hat[i] == before[i]);
    }
}

TEST_CASE("server mirror stays bit-identical to a receiver replica across rounds") {
  const std::uint32_t d = 20;
  SeededRng drift_rng(15, StreamPurpose::kDataGen);
  PsState ps;
  ps.theta = random_vec(drift_rng, d, 1.0);
  ps.theta_hat = ps.theta;  // shared initialization
  std::vector<double> replica = ps.theta_hat;
  for (int t = 1; t <= 40; ++t) {
    // The model moves between broadcasts; some rounds are infeasible.
    const std::vector<double> step = random_vec(drift_rng, d, 0.3);
    for (std::uint32_t i = 0; i < d; ++i) ps.theta[i] += step[i];
    const double capacity = (t % 5 == 0) ? 10.0 : 80.0 + 40.0 * (t % 3);
    SeededRng rng(15, StreamPurpose::kQuantizer, static_cast<std::uint64_t>(t));
    const DigitalRoundOutcome out = digital_broadcast(ps, capacity, 5, rng);
    for (std::uint32_t i = 0; i < d; ++i) replica[i] += out.decoded[i];
    REQUIRE(replica == ps.theta_hat);
    if (t % 5 == 0) CHECK_FALSE(out.q.has_value());
  }
}

TEST_CASE("gain-profile overload matches the explicit-capacity overload bitwise") {
  const std::uint32_t d = 10;
  SeededRng init(16, StreamPurpose::kDataGen);
  for (int rep = 0; rep < 10; ++rep) {
    PsState a;
    a.theta = random_vec(init, d, 3.0);
    a.theta_hat = random_vec(init, d, 3.0);
    PsState b = a;
    std::vector<std::vector<double>> gains(3);
    for (auto& g : gains) {
      g = random_vec(init, 6, 1.0);
      for (double& v : g) v = std::abs(v) * 200.0;  // budget comfortably above 64 bits
    }
    const GainProfile profile(gains, 4.0);
    SeededRng rng_a(16, StreamPurpose::kQuantizer, static_cast<std::uint64_t>(rep));
    SeededRng rng_b(16, StreamPurpose::kQuantizer, static_cast<std::uint64_t>(rep));
    const DigitalRoundOutcome oa = digital_broadcast(a, profile, 3, rng_a);
    const DigitalRoundOutcome ob =
        digital_broadcast(b, common_rate(profile), 3, rng_b);
    CHECK(oa.capacity_bits == ob.capacity_bits);
    CHECK(oa.q == ob.q);
    CHECK(oa.bits_used == ob.bits_used);
    CHECK(oa.decoded == ob.decoded);
    CHECK(a.theta_hat == b.theta_hat);
  }
}

TEST_CASE("digital broadcast rejects bad arguments") {
  PsState ps;
  ps.theta = {1.0, 2.0};
  ps.theta_hat = {1.0};
  SeededRng rng(17, StreamPurpose::kQuantizer);
  CHECK_THROWS_AS(digital_broadcast(ps, 100.0, 1, rng), std::invalid_argument);
  ps.theta_hat = {1.0, 2.0};
  CHECK_THROWS_AS(digital_broadcast(ps, 100.0, 0, rng), std::invalid_argument);
  CHECK_THROWS_AS(digital_broadcast(ps, 100.0, 3, rng), std::invalid_argument);
}

TEST_CASE("noiseless analog broadcast reproduces the model exactly") {
  SeededRng init(21, StreamPurpose::kDataGen);
  for (std::size_t d : {2u, 7u, 16u}) {
    const std::vector<double> theta = random_vec(init, d, 4.0);
    const std::size_t d2 = (d + 1) / 2;
    std::vector<ComplexVec> h, z;
    for (int m = 0; m < 3; ++m) {
      SeededRng fr(21, StreamPurpose::kDownlinkFading, 1,
                   static_cast<std::uint64_t>(m));
      h.push_back(draw_fading(1.3, d2, fr));
      z.push_back(zero_vec(d2));
    }
    const auto ests = analog_broadcast(theta, 10.0, d2, h, z);
    REQUIRE(ests.size() == 3);
    for (const auto& e : ests) {
      CHECK(e.theta_hat_m == theta);  // channel inversion cancels h exactly
      CHECK(e.mse == 0.0);
    }
  }
}

TEST_CASE("packing puts the first half in real parts and the second in imaginary") {
  const ComplexVec c = split_real_imag({1.0, 2.0, 3.0, 4.0});
  REQUIRE(c.size() == 2);
  CHECK(c.re[0] == 1.0);
  CHECK(c.re[1] == 2.0);
  CHECK(c.im[0] == 3.0);
  CHECK(c.im[1] == 4.0);

  const ComplexVec pair = split_real_imag({-0.5, 7.25});
  REQUIRE(pair.size() == 1);
  CHECK(pair.re[0] == -0.5);
  CHECK(pair.im[0] == 7.25);

  const ComplexVec zeros = split_real_imag(std::vector<double>(6, 0.0));
  for (std::size_t i = 0; i < zeros.size(); ++i) {
    CHECK(zeros.re[i] == 0.0);
    CHECK(zeros.im[i] == 0.0);
  }
}

TEST_CASE("merge is the exact inverse of split") {
  SeededRng rng(22, StreamPurpose::kDataGen);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t half = 1 + rng.uniform_below(32);
    const std::vector<double> v = random_vec(rng, 2 * half, 10.0);
    CHECK(merge_real_imag(split_real_imag(v)) == v);
  }
  CHECK_THROWS_AS(split_real_imag({1.0, 2.0, 3.0}), std::invalid_argument);
  ComplexVec bad;
  bad.re = {1.0, 2.0};
  bad.im = {1.0};
  CHECK_THROWS_AS(merge_real_imag(bad), std::invalid_argument);
}

TEST_CASE("every slot with a nonzero payload chunk spends the full power budget") {
  SeededRng rng(23, StreamPurpose::kDataGen);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t d = 2 + rng.uniform_below(20);
    const std::size_t d2 = (d + 1) / 2;
    const std::size_t n_dl = 1 + rng.uniform_below(d2);
    const double power = 0.5 + 10.0 * rng.uniform01();
    const std::vector<double> theta = random_vec(rng, d, 3.0);
    const auto energies = analog_slot_powers(theta, power, n_dl);
    CHECK(energies.size() == (d2 + n_dl - 1) / n_dl);
    for (double e : energies)
      CHECK(e == doctest::Approx(power).epsilon(1e-12));
  }
}

TEST_CASE("an all-zero payload chunk transmits nothing") {
  // d=4, n_dl=1: packed entry 0 carries (1, 0), packed entry 1 carries (0, 0).
  const std::vector<double> theta = {1.0, 0.0, 0.0, 0.0};
  const auto energies = analog_slot_powers(theta, 5.0, 1);
  REQUIRE(energies.size() == 2);
  CHECK(energies[0] == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(energies[1] == 0.0);
}

TEST_CASE("doubling power exactly halves the estimate error with shared draws") {
  SeededRng rng(24, StreamPurpose::kDataGen);
  const std::size_t d = 18;
  const std::size_t d2 = (d + 1) / 2;
  const std::vector<double> theta = random_vec(rng, d, 2.0);
  SeededRng fr(24, StreamPurpose::kDownlinkFading, 1);
  SeededRng nr(24, StreamPurpose::kDownlinkNoise, 1);
  const std::vector<ComplexVec> h = {draw_fading(1.0, d2, fr)};
  const std::vector<ComplexVec> z = {draw_noise(d2, nr)};
  for (std::size_t n_dl : {d2, std::size_t{3}}) {
    const auto lo = analog_broadcast(theta, 2.0, n_dl, h, z);
    const auto hi = analog_broadcast(theta, 8.0, n_dl, h, z);
    REQUIRE(lo[0].mse > 0.0);
    // alpha scales with sqrt(P), the additive error with 1/alpha.
    CHECK(lo[0].mse / hi[0].mse == doctest::Approx(4.0).epsilon(1e-12));
  }
}

TEST_CASE("analog estimates are unbiased: Monte Carlo mean within 3 sigma") {
  const std::size_t d = 8;
  const std::size_t d2 = 4;
  const double power = 4.0;
  SeededRng setup(25, StreamPurpose::kDataGen);
  const std::vector<double> theta = random_vec(setup, d, 1.5);
  double norm2 = 0.0;
  for (double v : theta) norm2 += v * v;
  const std::vector<ComplexVec> h = {random_phase_fading(setup, d2)};
  const int trials = 20000;
  std::vector<double> mean(d, 0.0);
  for (int t = 0; t < trials; ++t) {
    SeededRng nr(25, StreamPurpose::kDownlinkNoise,
                 static_cast<std::uint64_t>(t));
    const std::vector<ComplexVec> z = {draw_noise(d2, nr)};
    const auto est = analog_broadcast(theta, power, d2, h, z);
    for (std::size_t i = 0; i < d; ++i) mean[i] += est[0].theta_hat_m[i];
  }
  // With |h| = 1 each estimate entry is theta_i + N(0, 1/(2 alpha^2)),
  // alpha^2 = P / ||theta||^2.
  const double sigma_mean = std::sqrt(norm2 / (2.0 * power * trials));
  for (std::size_t i = 0; i < d; ++i) {
    mean[i] /= trials;
    CHECK(std::abs(mean[i] - theta[i]) <= 3.0 * sigma_mean);
  }
}

TEST_CASE("noise across devices is uncorrelated") {
  const std::size_t d = 8192;
  const std::size_t d2 = d / 2;
  SeededRng setup(26, StreamPurpose::kDataGen);
  const std::vector<double> theta = random_vec(setup, d, 1.0);
  std::vector<ComplexVec> h, z;
  for (int m = 0; m < 3; ++m) {
    SeededRng fr(26, StreamPurpose::kDownlinkFading, 1,
                 static_cast<std::uint64_t>(m));
    SeededRng nr(26, StreamPurpose::kDownlinkNoise, 1,
                 static_cast<std::uint64_t>(m));
    h.push_back(random_phase_fading(fr, d2));
    z.push_back(draw_noise(d2, nr));
  }
  const auto ests = analog_broadcast(theta, 1.0, d2, h, z);
  std::vector<std::vector<double>> resid(3, std::vector<double>(d));
  for (int m = 0; m < 3; ++m)
    for (std::size_t i = 0; i < d; ++i)
      resid[m][i] = ests[m].theta_hat_m[i] - theta[i];
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b) {
      double saa = 0.0, sbb = 0.0, sab = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        saa += resid[a][i] * resid[a][i];
        sbb += resid[b][i] * resid[b][i];
        sab += resid[a][i] * resid[b][i];
      }
      const double corr = sab / std::sqrt(saa * sbb);
      CHECK(std::abs(corr) < 0.06);  // ~5 sigma for d samples
    }
}

TEST_CASE("odd-length models zero-pad the last symbol's imaginary part") {
  const std::vector<double> theta = {1.0, -2.0, 0.5};  // d2 = 2
  SeededRng fr(27, StreamPurpose::kDownlinkFading, 1);
  SeededRng nr(27, StreamPurpose::kDownlinkNoise, 1);
  const ComplexVec h = draw_fading(1.0, 2, fr);
  const ComplexVec z = draw_noise(2, nr);
  const auto ests = analog_broadcast(theta, 3.0, 2, {h}, {z});
  REQUIRE(ests[0].theta_hat_m.size() == 3);

  // Recompute by hand: w_k = z_k / (alpha h_k), alpha over the padded chunk.
  const double norm2 = 1.0 + 4.0 + 0.25;
  const double alpha = std::sqrt(3.0 / norm2);
  double expect_mse = 0.0;
  std::vector<double> expect = theta;
  for (std::size_t k = 0; k < 2; ++k) {
    const std::complex<double> w =
        std::complex<double>(z.re[k], z.im[k]) /
        (alpha * std::complex<double>(h.re[k], h.im[k]));
    expect[k] += w.real();
    expect_mse += w.real() * w.real();
    if (k + 2 < 3) {
      expect[k + 2] += w.imag();
      expect_mse += w.imag() * w.imag();
    }
  }
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(ests[0].theta_hat_m[i] == doctest::Approx(expect[i]).epsilon(1e-15));
  CHECK(ests[0].mse == doctest::Approx(expect_mse).epsilon(1e-15));
  // The pad carries no payload, so the dropped imaginary part of symbol 1
  // never contaminates the estimate; only 3 noise components contribute.
}

TEST_CASE("all-zero model broadcasts against the norm floor without blowing up") {
  const std::vector<double> theta(6, 0.0);
  SeededRng fr(28, StreamPurpose::kDownlinkFading, 1);
  SeededRng nr(28, StreamPurpose::kDownlinkNoise, 1);
  const ComplexVec h = draw_fading(1.0, 3, fr);
  const ComplexVec z = draw_noise(3, nr);
  const auto ests = analog_broadcast(theta, 1.0, 3, {h}, {z});
  for (double v : ests[0].theta_hat_m) {
    CHECK(std::isfinite(v));
    // alpha = sqrt(P / 1e-12) is huge, so the descaled noise is ~1e-6.
    CHECK(std::abs(v) < 1e-3);
  }
  const auto energies = analog_slot_powers(theta, 1.0, 3);
  CHECK(energies == std::vector<double>{0.0});
}

TEST_CASE("analog broadcast rejects malformed inputs") {
  const std::vector<double> theta = {1.0, 2.0};
  const ComplexVec h1(1), z1(1), h2(2), z2(2);
  CHECK_THROWS_AS(analog_broadcast({}, 1.0, 1, {h1}, {z1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(analog_broadcast(theta, 0.0, 1, {h1}, {z1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(analog_broadcast(theta, -2.0, 1, {h1}, {z1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(analog_broadcast(theta, 1.0, 0, {h1}, {z1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(analog_broadcast(theta, 1.0, 1, {}, {}),
                  std::invalid_argument);
  CHECK_THROWS_AS(analog_broadcast(theta, 1.0, 1, {h1, h1}, {z1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(analog_broadcast(theta, 1.0, 1, {h2}, {z1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(analog_broadcast(theta, 1.0, 1, {h1}, {z2}),
                  std::invalid_argument);
}

TEST_CASE("serial analog broadcast matches the parallel kernel bitwise") {
  SeededRng rng(29, StreamPurpose::kDataGen);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t d = 2 + rng.uniform_below(33);
    const std::size_t d2 = (d + 1) / 2;
    const std::size_t n_dl = 1 + rng.uniform_below(d2);
    const std::size_t m_count = 1 + rng.uniform_below(6);
    const std::vector<double> theta = random_vec(rng, d, 2.0);
    std::vector<ComplexVec> h, z;
    for (std::size_t m = 0; m < m_count; ++m) {
      SeededRng fr(29, StreamPurpose::kDownlinkFading,
                   static_cast<std::uint64_t>(rep), m);
      SeededRng nr(29, StreamPurpose::kDownlinkNoise,
                   static_cast<std::uint64_t>(rep), m);
      h.push_back(draw_fading(1.7, d2, fr));
      z.push_back(draw_noise(d2, nr));
    }
    const auto par = analog_broadcast(theta, 3.0, n_dl, h, z);
    const auto ser = serial::analog_broadcast(theta, 3.0, n_dl, h, z);
    REQUIRE(par.size() == ser.size());
    for (std::size_t m = 0; m < m_count; ++m) {
      CHECK(par[m].theta_hat_m == ser[m].theta_hat_m);
      CHECK(par[m].mse == ser[m].mse);
    }
  }
}
