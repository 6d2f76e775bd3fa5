// Copyright 2026 the feelsim authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "feelsim/dataset.hpp"

namespace feelsim {

// A differentiable objective over a parameter vector, evaluated on an index
// subset of a dataset. Loss and gradient average over the given indices.
class LearnerModel {
 public:
  virtual ~LearnerModel() = default;

  virtual std::size_t dim() const = 0;

  virtual double loss(const std::vector<double>& theta, const Dataset& data,
                      const std::vector<std::size_t>& idx) const = 0;

  virtual void grad(const std::vector<double>& theta, const Dataset& data,
                    const std::vector<std::size_t>& idx,
                    std::vector<double>& out) const = 0;

  // Held-out evaluation: top-1 accuracy for classifiers, objective value for
  // regression losses (direction differs; callers know which they asked for).
  virtual double test_metric(const std::vector<double>& theta,
                             const Dataset& test) const = 0;
};

// Linear least squares on (features -> label value): f = (x'theta - y)^2 / 2.
// Strongly convex and smooth whenever the feature second-moment matrix is
// positive definite, which makes it the theory-matched choice.
std::unique_ptr<LearnerModel> make_least_squares(std::size_t feature_dim);

// Multinomial logistic regression with bias: dim = classes * (features + 1).
std::unique_ptr<LearnerModel> make_softmax(std::size_t feature_dim,
                                           std::uint32_t classes);

// name is "least_squares" or "softmax".
std::unique_ptr<LearnerModel> make_model(const std::string& name,
                                         std::size_t feature_dim,
                                         std::uint32_t classes);

}  // namespace feelsim
