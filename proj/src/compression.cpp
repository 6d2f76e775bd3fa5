// Copyright 2026 the feelsim authors
// SPDX-License-Identifier: Apache-2.0

#include "feelsim/compression.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <stdexcept>

namespace feelsim {

namespace {

double log2_choose(std::uint32_t d, std::uint32_t s) {
  if (s == 0 || s == d) return 0.0;
  const double ln2 = 0.69314718055994530941723212145818;
  return (std::lgamma(static_cast<double>(d) + 1.0) -
          std::lgamma(static_cast<double>(s) + 1.0) -
          std::lgamma(static_cast<double>(d - s) + 1.0)) /
         ln2;
}

std::uint32_t level_width_bits(std::uint32_t q) {
  std::uint32_t w = 0;
  std::uint64_t cap = 1;  // number of codewords representable in w bits
  while (cap < static_cast<std::uint64_t>(q) + 1) {
    ++w;
    cap <<= 1;
  }
  return w;  // ceil(log2(q+1)); 0 when q == 0 never occurs (q >= 1)
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back((v >> (8 * i)) & 0xffu);
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
  std::uint64_t bits;
  static_assert(sizeof(bits) == sizeof(v));
  std::memcpy(&bits, &v, sizeof(bits));
  for (int i = 0; i < 8; ++i) out.push_back((bits >> (8 * i)) & 0xffu);
}

class ByteReader {
 public:
  explicit ByteReader(const std::vector<std::uint8_t>& b) : b_(b) {}

  std::uint32_t u32() {
    require(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(b_[pos_++]) << (8 * i);
    return v;
  }

  double f64() {
    require(8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i)
      bits |= static_cast<std::uint64_t>(b_[pos_++]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
  }

  std::uint8_t byte() {
    require(1);
    return b_[pos_++];
  }

  bool done() const { return pos_ == b_.size(); }

 private:
  void require(std::size_t n) {
    if (pos_ + n > b_.size())
      throw std::invalid_argument("deserialize: truncated payload");
  }

  const std::vector<std::uint8_t>& b_;
  std::size_t pos_ = 0;
};

}  // namespace

void CompressedUpdate::validate() const {
  const std::size_t s = support.size();
  if (d == 0) throw std::invalid_argument("CompressedUpdate: d must be >= 1");
  if (q == 0) throw std::invalid_argument("CompressedUpdate: q must be >= 1");
  if (s == 0 || s > d)
    throw std::invalid_argument("CompressedUpdate: need 1 <= s <= d");
  if (signs.size() != s || levels.size() != s)
    throw std::invalid_argument("CompressedUpdate: field length mismatch");
  if (!(x_min >= 0.0) || !(x_max >= x_min) || !std::isfinite(x_max))
    throw std::invalid_argument("CompressedUpdate: need 0 <= x_min <= x_max");
  for (std::size_t i = 0; i < s; ++i) {
    if (support[i] >= d)
      throw std::invalid_argument("CompressedUpdate: support index >= d");
    if (i > 0 && support[i] <= support[i - 1])
      throw std::invalid_argument(
          "CompressedUpdate: support must be strictly increasing");
    if (levels[i] > q)
      throw std::invalid_argument("CompressedUpdate: level > q");
    if (signs[i] > 1)
      throw std::invalid_argument("CompressedUpdate: sign must be 0 or 1");
  }
}

std::pair<std::vector<std::uint32_t>, std::vector<double>> sparsify(
    const std::vector<double>& x, std::uint32_t s) {
  const std::size_t d = x.size();
  if (s == 0 || s > d)
    throw std::invalid_argument("sparsify: need 1 <= s <= d");
  std::vector<std::uint32_t> idx(d);
  std::iota(idx.begin(), idx.end(), 0u);
  // Larger magnitude first; equal magnitudes keep the lower index, for
  // platform-independent tie-breaking.
  const auto by_magnitude = [&x](std::uint32_t a, std::uint32_t b) {
    const double ma = std::fabs(x[a]), mb = std::fabs(x[b]);
    if (ma != mb) return ma > mb;
    return a < b;
  };
  std::nth_element(idx.begin(), idx.begin() + (s - 1), idx.end(),
                   by_magnitude);
  idx.resize(s);
  std::sort(idx.begin(), idx.end());
  std::vector<double> values(s);
  for (std::size_t i = 0; i < s; ++i) values[i] = x[idx[i]];
  return {std::move(idx), std::move(values)};
}

std::uint32_t phi_level(double x, std::uint32_t q, SeededRng& rng) {
  if (q == 0) throw std::invalid_argument("phi: q must be >= 1");
  if (!(x >= 0.0 && x <= 1.0))
    throw std::invalid_argument("phi: x must lie in [0, 1]");
  double l = std::floor(x * static_cast<double>(q));
  if (l > static_cast<double>(q) - 1.0) l = static_cast<double>(q) - 1.0;
  const double frac = x * static_cast<double>(q) - l;
  const std::uint32_t base = static_cast<std::uint32_t>(l);
  return (rng.uniform01() < frac) ? base + 1 : base;
}

double phi(double x, std::uint32_t q, SeededRng& rng) {
  return static_cast<double>(phi_level(x, q, rng)) / static_cast<double>(q);
}

CompressedUpdate quantize(const std::vector<std::uint32_t>& support,
                          const std::vector<double>& values, std::uint32_t d,
                          std::uint32_t q, SeededRng& rng) {
  if (values.empty())
    throw std::invalid_argument("quantize: empty input");
  if (support.size() != values.size())
    throw std::invalid_argument("quantize: support/values length mismatch");
  if (q == 0) throw std::invalid_argument("quantize: q must be >= 1");
  CompressedUpdate c;
  c.d = d;
  c.q = q;
  c.support = support;
  double lo = std::fabs(values[0]), hi = std::fabs(values[0]);
  for (double v : values) {
    const double a = std::fabs(v);
    lo = std::min(lo, a);
    hi = std::max(hi, a);
  }
  c.x_min = lo;
  c.x_max = hi;
  const double range = hi - lo;
  c.signs.resize(values.size());
  c.levels.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    c.signs[i] = values[i] < 0.0 ? 1 : 0;
    const double a = std::fabs(values[i]);
    double norm = range > 0.0 ? (a - lo) / range : 0.0;
    norm = std::min(1.0, std::max(0.0, norm));
    c.levels[i] = phi_level(norm, q, rng);
  }
  c.validate();
  return c;
}

std::vector<double> decompress(const CompressedUpdate& c) {
  c.validate();
  std::vector<double> out(c.d, 0.0);
  const double range = c.x_max - c.x_min;
  for (std::size_t i = 0; i < c.support.size(); ++i) {
    const double ratio =
        static_cast<double>(c.levels[i]) / static_cast<double>(c.q);
    const double mag = c.x_min + range * ratio;
    out[c.support[i]] = c.signs[i] ? -mag : mag;
  }
  return out;
}

double bit_cost(std::uint32_t d, std::uint32_t s, std::uint32_t q) {
  if (s == 0 || s > d)
    throw std::invalid_argument("bit_cost: need 1 <= s <= d");
  if (q == 0) throw std::invalid_argument("bit_cost: q must be >= 1");
  return 64.0 +
         static_cast<double>(s) *
             (1.0 + std::log2(static_cast<double>(q) + 1.0)) +
         log2_choose(d, s);
}

std::optional<std::uint32_t> max_q_for_budget(std::uint32_t d, std::uint32_t s,
                                              double capacity_bits) {
  if (!std::isfinite(capacity_bits))
    throw std::invalid_argument("max_q_for_budget: capacity must be finite");
  if (capacity_bits < 0.0)
    throw std::invalid_argument("max_q_for_budget: capacity must be >= 0");
  if (bit_cost(d, s, 1) > capacity_bits) return std::nullopt;
  // Invert the monotone cost analytically, then correct for rounding with a
  // local scan so the <= comparison is decided by bit_cost itself.
  const double base = 64.0 + static_cast<double>(s) + log2_choose(d, s);
  const double log_budget = (capacity_bits - base) / static_cast<double>(s);
  double guess = std::exp2(std::min(log_budget, 32.0)) - 1.0;
  std::uint32_t q = static_cast<std::uint32_t>(std::min(
      guess, static_cast<double>(kMaxQuantLevels)));
  if (q == 0) q = 1;
  while (q > 1 && bit_cost(d, s, q) > capacity_bits) --q;
  while (q < kMaxQuantLevels && bit_cost(d, s, q + 1) <= capacity_bits) ++q;
  if (bit_cost(d, s, q) > capacity_bits) return std::nullopt;
  return q;
}

std::vector<std::uint8_t> serialize(const CompressedUpdate& c) {
  c.validate();
  std::vector<std::uint8_t> out;
  const std::uint32_t s = static_cast<std::uint32_t>(c.support.size());
  put_u32(out, c.d);
  put_u32(out, s);
  put_u32(out, c.q);
  put_f64(out, c.x_min);
  put_f64(out, c.x_max);
  for (std::uint32_t idx : c.support) put_u32(out, idx);
  std::uint8_t acc = 0;
  int filled = 0;
  for (std::uint32_t i = 0; i < s; ++i) {
    acc |= static_cast<std::uint8_t>((c.signs[i] & 1u) << filled);
    if (++filled == 8) {
      out.push_back(acc);
      acc = 0;
      filled = 0;
    }
  }
  if (filled > 0) out.push_back(acc);
  const std::uint32_t w = level_width_bits(c.q);
  std::uint64_t bitbuf = 0;
  int bits = 0;
  for (std::uint32_t i = 0; i < s; ++i) {
    bitbuf |= static_cast<std::uint64_t>(c.levels[i]) << bits;
    bits += static_cast<int>(w);
    while (bits >= 8) {
      out.push_back(static_cast<std::uint8_t>(bitbuf & 0xffu));
      bitbuf >>= 8;
      bits -= 8;
    }
  }
  if (bits > 0) out.push_back(static_cast<std::uint8_t>(bitbuf & 0xffu));
  return out;
}

CompressedUpdate deserialize(const std::vector<std::uint8_t>& bytes) {
  ByteReader r(bytes);
  CompressedUpdate c;
  c.d = r.u32();
  const std::uint32_t s = r.u32();
  c.q = r.u32();
  if (c.q == 0 || c.q > kMaxQuantLevels)
    throw std::invalid_argument("deserialize: bad level count");
  if (s == 0 || s > c.d)
    throw std::invalid_argument("deserialize: bad support size");
  c.x_min = r.f64();
  c.x_max = r.f64();
  c.support.resize(s);
  for (std::uint32_t i = 0; i < s; ++i) c.support[i] = r.u32();
  c.signs.resize(s);
  for (std::uint32_t i = 0; i < s; i += 8) {
    const std::uint8_t b = r.byte();
    for (std::uint32_t j = 0; j < 8 && i + j < s; ++j)
      c.signs[i + j] = (b >> j) & 1u;
  }
  const std::uint32_t w = level_width_bits(c.q);
  c.levels.resize(s);
  std::uint64_t bitbuf = 0;
  int bits = 0;
  for (std::uint32_t i = 0; i < s; ++i) {
    while (bits < static_cast<int>(w)) {
      bitbuf |= static_cast<std::uint64_t>(r.byte()) << bits;
      bits += 8;
    }
    c.levels[i] = static_cast<std::uint32_t>(bitbuf & ((1ull << w) - 1));
    bitbuf >>= w;
    bits -= static_cast<int>(w);
  }
  if (!r.done())
    throw std::invalid_argument("deserialize: trailing bytes");
  c.validate();
  return c;
}

}  // namespace feelsim
