// Copyright 2026 the feelsim authors
// SPDX-License-Identifier: Apache-2.0

#include "feelsim/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace feelsim {

namespace {

void check_eval_args(std::size_t dim, const std::vector<double>& theta,
                     const std::vector<std::size_t>& idx,
                     const Dataset& data) {
  if (theta.size() != dim)
    throw std::invalid_argument("model: theta dimension mismatch");
  if (idx.empty()) throw std::invalid_argument("model: empty index set");
  for (std::size_t i : idx)
    if (i >= data.size())
      throw std::invalid_argument("model: sample index out of range");
}

class LeastSquaresModel final : public LearnerModel {
 public:
  explicit LeastSquaresModel(std::size_t feature_dim) : dim_(feature_dim) {
    if (dim_ == 0)
      throw std::invalid_argument("least_squares: feature_dim must be >= 1");
  }

  std::size_t dim() const override { return dim_; }

  double loss(const std::vector<double>& theta, const Dataset& data,
              const std::vector<std::size_t>& idx) const override {
    check_eval_args(dim_, theta, idx, data);
    double total = 0.0;
    for (std::size_t i : idx) {
      const double r = residual(theta, data.samples[i]);
      total += 0.5 * r * r;
    }
    return total / static_cast<double>(idx.size());
  }

  void grad(const std::vector<double>& theta, const Dataset& data,
            const std::vector<std::size_t>& idx,
            std::vector<double>& out) const override {
    check_eval_args(dim_, theta, idx, data);
    out.assign(dim_, 0.0);
    for (std::size_t i : idx) {
      const Sample& s = data.samples[i];
      const double r = residual(theta, s);
      for (std::size_t j = 0; j < dim_; ++j) out[j] += r * s.x[j];
    }
    const double inv = 1.0 / static_cast<double>(idx.size());
    for (double& v : out) v *= inv;
  }

  double test_metric(const std::vector<double>& theta,
                     const Dataset& test) const override {
    std::vector<std::size_t> all(test.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return loss(theta, test, all);
  }

 private:
  double residual(const std::vector<double>& theta, const Sample& s) const {
    if (s.x.size() != dim_)
      throw std::invalid_argument("least_squares: feature dim mismatch");
    double dot = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) dot += s.x[j] * theta[j];
    return dot - static_cast<double>(s.y);
  }

  std::size_t dim_;
};

class SoftmaxModel final : public LearnerModel {
 public:
  SoftmaxModel(std::size_t feature_dim, std::uint32_t classes)
      : features_(feature_dim), classes_(classes) {
    if (features_ == 0 || classes_ < 2)
      throw std::invalid_argument(
          "softmax: need feature_dim >= 1 and classes >= 2");
  }

  std::size_t dim() const override { return classes_ * (features_ + 1); }

  double loss(const std::vector<double>& theta, const Dataset& data,
              const std::vector<std::size_t>& idx) const override {
    check_eval_args(dim(), theta, idx, data);
    std::vector<double> logits(classes_);
    double total = 0.0;
    for (std::size_t i : idx) {
      const Sample& s = data.samples[i];
      fill_logits(theta, s, logits);
      total += log_sum_exp(logits) - logits[s.y];
    }
    return total / static_cast<double>(idx.size());
  }

  void grad(const std::vector<double>& theta, const Dataset& data,
            const std::vector<std::size_t>& idx,
            std::vector<double>& out) const override {
    check_eval_args(dim(), theta, idx, data);
    out.assign(dim(), 0.0);
    std::vector<double> logits(classes_);
    for (std::size_t i : idx) {
      const Sample& s = data.samples[i];
      fill_logits(theta, s, logits);
      const double lse = log_sum_exp(logits);
      for (std::uint32_t c = 0; c < classes_; ++c) {
        const double p = std::exp(logits[c] - lse);
        const double coeff = p - (c == s.y ? 1.0 : 0.0);
        double* row = out.data() + c * (features_ + 1);
        for (std::size_t j = 0; j < features_; ++j) row[j] += coeff * s.x[j];
        row[features_] += coeff;  // bias
      }
    }
    const double inv = 1.0 / static_cast<double>(idx.size());
    for (double& v : out) v *= inv;
  }

  double test_metric(const std::vector<double>& theta,
                     const Dataset& test) const override {
    if (test.samples.empty()) return 0.0;
    std::vector<double> logits(classes_);
    std::size_t hits = 0;
    for (const Sample& s : test.samples) {
      fill_logits(theta, s, logits);
      const std::size_t argmax =
          std::max_element(logits.begin(), logits.end()) - logits.begin();
      if (argmax == s.y) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(test.size());
  }

 private:
  void fill_logits(const std::vector<double>& theta, const Sample& s,
                   std::vector<double>& logits) const {
    if (s.x.size() != features_)
      throw std::invalid_argument("softmax: feature dim mismatch");
    for (std::uint32_t c = 0; c < classes_; ++c) {
      const double* row = theta.data() + c * (features_ + 1);
      double dot = row[features_];
      for (std::size_t j = 0; j < features_; ++j) dot += row[j] * s.x[j];
      logits[c] = dot;
    }
  }

  static double log_sum_exp(const std::vector<double>& v) {
    const double hi = *std::max_element(v.begin(), v.end());
    double sum = 0.0;
    for (double x : v) sum += std::exp(x - hi);
    return hi + std::log(sum);
  }

  std::size_t features_;
  std::uint32_t classes_;
};

}  // namespace

std::unique_ptr<LearnerModel> make_least_squares(std::size_t feature_dim) {
  return std::make_unique<LeastSquaresModel>(feature_dim);
}

std::unique_ptr<LearnerModel> make_softmax(std::size_t feature_dim,
                                           std::uint32_t classes) {
  return std::make_unique<SoftmaxModel>(feature_dim, classes);
}

std::unique_ptr<LearnerModel> make_model(const std::string& name,
                                         std::size_t feature_dim,
                                         std::uint32_t classes) {
  if (name == "least_squares") return make_least_squares(feature_dim);
  if (name == "softmax") return make_softmax(feature_dim, classes);
  throw std::invalid_argument("unknown model: " + name);
}

}  // namespace feelsim
