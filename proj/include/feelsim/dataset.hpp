// Copyright 2026 the feelsim authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "feelsim/rng.hpp"

namespace feelsim {

struct Sample {
  std::vector<double> x;
  std::uint32_t y = 0;
};

struct Dataset {
  std::vector<Sample> samples;
  std::uint32_t num_classes = 0;

  std::size_t size() const { return samples.size(); }
  std::size_t feature_dim() const {
    return samples.empty() ? 0 : samples[0].x.size();
  }
};

using Partition = std::vector<std::vector<std::size_t>>;

// Random disjoint near-equal split; device sizes differ by at most one.
Partition partition_iid(const Dataset& data, std::size_t m_count,
                        SeededRng& rng);

// Label-shard split: every class is cut into 2*M/num_classes equal shards
// and every device receives two shards of different classes, so each device
// sees exactly two labels. Throws on any divisibility violation; with ten
// classes the constraint is the familiar "M divisible by 5" rule.
Partition partition_noniid(const Dataset& data, std::size_t m_count,
                           SeededRng& rng);

// Gaussian class blobs: `samples` points round-robin over `classes` labels,
// each centered on a seeded per-class center with unit noise.
Dataset make_synthetic(std::size_t samples, std::size_t features,
                       std::uint32_t classes, std::uint64_t seed);

// Deterministic stratified split: within each class, the last
// round(count * test_fraction) samples (in dataset order) form the test set.
std::pair<Dataset, Dataset> split_train_test(const Dataset& data,
                                             double test_fraction);

// Binary container: magic "FEDS", then version, sample count, feature dim,
// class count as little-endian u32, then per sample feature_dim f32 values
// and one u32 label.
void save_dataset(const Dataset& data, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

}  // namespace feelsim
