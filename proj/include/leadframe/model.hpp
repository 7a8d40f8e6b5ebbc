#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "leadframe/refframe.hpp"

namespace leadframe {

struct TrainConfig {
  std::int64_t epochs = 1000;
  double learning_rate = 0.1;
  double l2_penalty = 0.01;
  std::uint64_t seed = 42;

  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

struct FeatureScaling {
  double mean = 0.0;
  double stddev = 1.0;

  bool operator==(const FeatureScaling&) const = default;
};

/// Logistic regression over standardized features:
///   p(x) = sigmoid(intercept + sum_k weights[k] * (x[k] - mean[k]) / stddev[k])
struct LogisticModel {
  std::vector<std::string> feature_names;
  std::vector<double> weights;
  double intercept = 0.0;
  std::vector<FeatureScaling> scaling;
  TrainConfig config;

  std::size_t dimension() const noexcept { return weights.size(); }
  std::vector<double> scaled(std::span<const double> raw) const;

  bool operator==(const LogisticModel&) const = default;
};

/// Per-feature mean and population standard deviation; constant columns
/// get a deviation of 1.
std::vector<FeatureScaling> fit_scaling(const TrainingSet& data);

/// Full-batch gradient descent from zero weights on the mean negative
/// log-likelihood plus (l2_penalty / 2) * |weights|^2.
LogisticModel train_logistic(const TrainingSet& data, const TrainConfig& config);

/// Per-epoch loss is appended to `loss_trace` (the loss before each update,
/// then the final loss) when non-null.
LogisticModel train_logistic(const TrainingSet& data, const TrainConfig& config,
                             std::vector<double>* loss_trace);

double predict_proba(const LogisticModel& model, std::span<const double> raw);
double predict_proba(const LogisticModel& model, const FeatureVector& x);

struct LossAndGradient {
  double loss = 0.0;
  std::vector<double> gradient;  // (intercept, weights...)
};

LossAndGradient loss_and_gradient(const LogisticModel& model, const TrainingSet& data);

std::string model_to_json(const LogisticModel& model);
LogisticModel model_from_json(const std::string& text);

double sigmoid(double z);

}  // namespace leadframe
