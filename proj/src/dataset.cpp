// Copyright 2026 the feelsim authors
// SPDX-License-Identifier: Apache-2.0

#include "feelsim/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

namespace feelsim {

namespace {

constexpr char kMagic[4] = {'F', 'E', 'D', 'S'};
constexpr std::uint32_t kFormatVersion = 1;

void check_nonempty(const Dataset& data, const char* what) {
  if (data.samples.empty())
    throw std::invalid_argument(std::string(what) + ": empty dataset");
  if (data.num_classes == 0)
    throw std::invalid_argument(std::string(what) + ": num_classes == 0");
  const std::size_t dim = data.samples[0].x.size();
  for (const auto& s : data.samples) {
    if (s.x.size() != dim)
      throw std::invalid_argument(std::string(what) +
                                  ": inconsistent feature dimension");
    if (s.y >= data.num_classes)
      throw std::invalid_argument(std::string(what) + ": label out of range");
  }
}

void shuffle_indices(std::vector<std::size_t>& idx, SeededRng& rng) {
  for (std::size_t i = idx.size(); i > 1; --i)
    std::swap(idx[i - 1], idx[rng.uniform_below(i)]);
}

void write_u32(std::ofstream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  out.write(b, 4);
}

std::uint32_t read_u32(std::ifstream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw std::runtime_error("dataset file: truncated");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

}  // namespace

Partition partition_iid(const Dataset& data, std::size_t m_count,
                        SeededRng& rng) {
  check_nonempty(data, "partition_iid");
  if (m_count == 0 || m_count > data.size())
    throw std::invalid_argument(
        "partition_iid: need 1 <= M <= sample count");
  std::vector<std::size_t> idx(data.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  shuffle_indices(idx, rng);
  Partition parts(m_count);
  const std::size_t base = data.size() / m_count;
  const std::size_t extra = data.size() % m_count;
  std::size_t pos = 0;
  for (std::size_t m = 0; m < m_count; ++m) {
    const std::size_t take = base + (m < extra ? 1 : 0);
    parts[m].assign(idx.begin() + pos, idx.begin() + pos + take);
    pos += take;
  }
  return parts;
}

Partition partition_noniid(const Dataset& data, std::size_t m_count,
                           SeededRng& rng) {
  check_nonempty(data, "partition_noniid");
  if (m_count == 0)
    throw std::invalid_argument("partition_noniid: need M >= 1");
  const std::size_t classes = data.num_classes;
  if (classes < 2)
    throw std::invalid_argument(
        "partition_noniid: need at least two classes");
  if (classes == 10 && m_count % 5 != 0)
    throw std::invalid_argument(
        "partition_noniid: with 10 classes, M must be divisible by 5 (two "
        "equal shards per device)");
  if ((2 * m_count) % classes != 0)
    throw std::invalid_argument(
        "partition_noniid: 2*M must be divisible by the class count");
  const std::size_t shards_per_class = 2 * m_count / classes;
  std::vector<std::vector<std::size_t>> by_class(classes);
  for (std::size_t i = 0; i < data.size(); ++i)
    by_class[data.samples[i].y].push_back(i);
  for (std::size_t c = 0; c < classes; ++c) {
    if (by_class[c].empty() || by_class[c].size() % shards_per_class != 0)
      throw std::invalid_argument(
          "partition_noniid: class " + std::to_string(c) +
          " count must be a positive multiple of " +
          std::to_string(shards_per_class) + " shards");
    shuffle_indices(by_class[c], rng);
  }
  // One shard is a contiguous cut of the class's shuffled indices.
  struct ShardPool {
    std::size_t cls;
    std::size_t remaining;
  };
  std::vector<ShardPool> pool(classes);
  for (std::size_t c = 0; c < classes; ++c)
    pool[c] = {c, shards_per_class};
  std::vector<std::size_t> next_cut(classes, 0);
  auto take_shard = [&](std::size_t c) {
    const std::size_t shard_size = by_class[c].size() / shards_per_class;
    const std::size_t begin = next_cut[c];
    next_cut[c] += shard_size;
    return std::pair<std::size_t, std::size_t>(begin, begin + shard_size);
  };
  // Pair shards greedily from the two classes with most shards left; the
  // largest pool never exceeds half the remainder, so two distinct classes
  // always exist until the pool is empty.
  Partition parts(m_count);
  for (std::size_t m = 0; m < m_count; ++m) {
    std::sort(pool.begin(), pool.end(), [](const ShardPool& a,
                                           const ShardPool& b) {
      if (a.remaining != b.remaining) return a.remaining > b.remaining;
      return a.cls < b.cls;
    });
    if (pool.size() < 2 || pool[1].remaining == 0)
      throw std::logic_error("partition_noniid: shard pairing exhausted");
    for (int pick = 0; pick < 2; ++pick) {
      auto [begin, end] = take_shard(pool[pick].cls);
      for (std::size_t i = begin; i < end; ++i)
        parts[m].push_back(by_class[pool[pick].cls][i]);
      --pool[pick].remaining;
    }
    std::erase_if(pool, [](const ShardPool& p) { return p.remaining == 0; });
  }
  return parts;
}

Dataset make_synthetic(std::size_t samples, std::size_t features,
                       std::uint32_t classes, std::uint64_t seed) {
  if (samples == 0 || features == 0 || classes == 0)
    throw std::invalid_argument("make_synthetic: all counts must be >= 1");
  SeededRng rng(seed, StreamPurpose::kDataGen);
  std::vector<std::vector<double>> centers(classes);
  for (auto& c : centers) {
    c.resize(features);
    for (double& v : c) v = 2.0 * rng.gaussian();
  }
  Dataset data;
  data.num_classes = classes;
  data.samples.resize(samples);
  for (std::size_t n = 0; n < samples; ++n) {
    const std::uint32_t y = static_cast<std::uint32_t>(n % classes);
    data.samples[n].y = y;
    data.samples[n].x.resize(features);
    for (std::size_t j = 0; j < features; ++j)
      data.samples[n].x[j] = centers[y][j] + rng.gaussian();
  }
  return data;
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& data,
                                             double test_fraction) {
  check_nonempty(data, "split_train_test");
  if (!(test_fraction >= 0.0 && test_fraction < 1.0))
    throw std::invalid_argument(
        "split_train_test: test_fraction must lie in [0, 1)");
  std::vector<std::vector<std::size_t>> by_class(data.num_classes);
  for (std::size_t i = 0; i < data.size(); ++i)
    by_class[data.samples[i].y].push_back(i);
  std::vector<bool> is_test(data.size(), false);
  for (const auto& cls : by_class) {
    const std::size_t take = static_cast<std::size_t>(
        std::llround(test_fraction * static_cast<double>(cls.size())));
    for (std::size_t k = cls.size() - take; k < cls.size(); ++k)
      is_test[cls[k]] = true;
  }
  Dataset train, test;
  train.num_classes = test.num_classes = data.num_classes;
  for (std::size_t i = 0; i < data.size(); ++i)
    (is_test[i] ? test : train).samples.push_back(data.samples[i]);
  if (train.samples.empty())
    throw std::invalid_argument("split_train_test: empty training split");
  return {std::move(train), std::move(test)};
}

void save_dataset(const Dataset& data, const std::filesystem::path& path) {
  check_nonempty(data, "save_dataset");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("save_dataset: cannot open " +
                                     path.string());
  out.write(kMagic, 4);
  write_u32(out, kFormatVersion);
  write_u32(out, static_cast<std::uint32_t>(data.size()));
  write_u32(out, static_cast<std::uint32_t>(data.feature_dim()));
  write_u32(out, data.num_classes);
  for (const auto& s : data.samples) {
    for (double v : s.x) {
      const float f = static_cast<float>(v);
      std::uint32_t bits;
      std::memcpy(&bits, &f, sizeof(bits));
      write_u32(out, bits);
    }
    write_u32(out, s.y);
  }
  if (!out) throw std::runtime_error("save_dataset: write failed");
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_dataset: cannot open " +
                                    path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("load_dataset: bad magic");
  const std::uint32_t version = read_u32(in);
  if (version != kFormatVersion)
    throw std::runtime_error("load_dataset: unsupported version " +
                             std::to_string(version));
  const std::uint32_t count = read_u32(in);
  const std::uint32_t dim = read_u32(in);
  Dataset data;
  data.num_classes = read_u32(in);
  if (count == 0 || dim == 0 || data.num_classes == 0)
    throw std::runtime_error("load_dataset: empty header fields");
  data.samples.resize(count);
  for (auto& s : data.samples) {
    s.x.resize(dim);
    for (auto& v : s.x) {
      const std::uint32_t bits = read_u32(in);
      float f;
      std::memcpy(&f, &bits, sizeof(f));
      v = static_cast<double>(f);
    }
    s.y = read_u32(in);
    if (s.y >= data.num_classes)
      throw std::runtime_error("load_dataset: label out of range");
  }
  return data;
}

}  // namespace feelsim
