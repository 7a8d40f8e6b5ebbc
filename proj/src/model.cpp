#include "leadframe/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "leadframe/errors.hpp"

namespace leadframe {

void TrainConfig::validate() const {
  if (epochs < 0) throw Error(ErrorKind::InvalidConfig, "epochs must be non-negative");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw Error(ErrorKind::InvalidConfig, "learning_rate must be a positive finite number");
  }
  if (!(l2_penalty >= 0.0) || !std::isfinite(l2_penalty)) {
    throw Error(ErrorKind::InvalidConfig, "l2_penalty must be a non-negative finite number");
  }
}

namespace {

double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

void check_rows(const TrainingSet& data, std::size_t dim) {
  for (const auto& r : data.rows) {
    if (r.features.values.size() != dim) {
      throw Error(ErrorKind::DimensionMismatch,
                  "row '" + r.features.entity_id + "' has " +
                      std::to_string(r.features.values.size()) + " features, expected " +
                      std::to_string(dim));
    }
  }
}

struct Design {
  std::vector<std::vector<double>> x;  // scaled rows
  std::vector<double> y;
};

Design scaled_design(const LogisticModel& model, const TrainingSet& data) {
  Design d;
  d.x.reserve(data.rows.size());
  d.y.reserve(data.rows.size());
  for (const auto& r : data.rows) {
    d.x.push_back(model.scaled(r.features.values));
    d.y.push_back(static_cast<double>(r.label));
  }
  return d;
}

LossAndGradient evaluate_objective(const LogisticModel& model, const Design& d) {
  const std::size_t m = model.dimension();
  LossAndGradient out;
  out.gradient.assign(m + 1, 0.0);
  const double n = static_cast<double>(d.x.size());
  if (d.x.empty()) return out;

  for (std::size_t i = 0; i < d.x.size(); ++i) {
    double z = model.intercept;
    for (std::size_t k = 0; k < m; ++k) z += model.weights[k] * d.x[i][k];
    out.loss += d.y[i] == 1.0 ? softplus(-z) : softplus(z);
    const double residual = logistic(z) - d.y[i];
    out.gradient[0] += residual;
    for (std::size_t k = 0; k < m; ++k) out.gradient[k + 1] += residual * d.x[i][k];
  }
  out.loss /= n;
  for (auto& g : out.gradient) g /= n;

  const double lambda = model.config.l2_penalty;
  for (std::size_t k = 0; k < m; ++k) {
    out.loss += 0.5 * lambda * model.weights[k] * model.weights[k];
    out.gradient[k + 1] += lambda * model.weights[k];
  }
  return out;
}

}  // namespace

double sigmoid(double z) {
  constexpr double lo = std::numeric_limits<double>::denorm_min();
  const double hi = std::nextafter(1.0, 0.0);
  return std::clamp(logistic(z), lo, hi);
}

std::vector<double> LogisticModel::scaled(std::span<const double> raw) const {
  if (raw.size() != dimension() || scaling.size() != dimension()) {
    throw Error(ErrorKind::DimensionMismatch, "feature vector has " + std::to_string(raw.size()) +
                                                  " values, model expects " +
                                                  std::to_string(dimension()));
  }
  std::vector<double> out(raw.size());
  for (std::size_t k = 0; k < raw.size(); ++k) {
    out[k] = (raw[k] - scaling[k].mean) / scaling[k].stddev;
  }
  return out;
}

std::vector<FeatureScaling> fit_scaling(const TrainingSet& data) {
  const std::size_t m = data.plan.specs.size();
  check_rows(data, m);
  std::vector<FeatureScaling> out(m);
  if (data.rows.empty()) return out;
  const double n = static_cast<double>(data.rows.size());
  for (std::size_t k = 0; k < m; ++k) {
    double mean = 0.0;
    for (const auto& r : data.rows) mean += r.features.values[k];
    mean /= n;
    double var = 0.0;
    for (const auto& r : data.rows) {
      const double d = r.features.values[k] - mean;
      var += d * d;
    }
    const double sd = std::sqrt(var / n);
    out[k] = {mean, sd > 0.0 ? sd : 1.0};
  }
  return out;
}

LogisticModel train_logistic(const TrainingSet& data, const TrainConfig& config) {
  return train_logistic(data, config, nullptr);
}

LogisticModel train_logistic(const TrainingSet& data, const TrainConfig& config,
                             std::vector<double>* loss_trace) {
  config.validate();
  const std::size_t m = data.plan.specs.size();
  if (m == 0) throw Error(ErrorKind::DimensionMismatch, "training set has no features");
  check_rows(data, m);
  const std::size_t pos = data.positives();
  if (pos == 0 || pos == data.rows.size()) {
    throw Error(ErrorKind::DegenerateLabels,
                "training data needs both labels (" + std::to_string(pos) + " of " +
                    std::to_string(data.rows.size()) + " rows are positive)");
  }

  LogisticModel model;
  model.feature_names = data.plan.output_names();
  model.weights.assign(m, 0.0);
  model.scaling = fit_scaling(data);
  model.config = config;

  const Design design = scaled_design(model, data);
  for (std::int64_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto lg = evaluate_objective(model, design);
    if (loss_trace) loss_trace->push_back(lg.loss);
    model.intercept -= config.learning_rate * lg.gradient[0];
    for (std::size_t k = 0; k < m; ++k) model.weights[k] -= config.learning_rate * lg.gradient[k + 1];
  }
  if (loss_trace) loss_trace->push_back(evaluate_objective(model, design).loss);
  return model;
}

double predict_proba(const LogisticModel& model, std::span<const double> raw) {
  const auto x = model.scaled(raw);
  double z = model.intercept;
  for (std::size_t k = 0; k < x.size(); ++k) z += model.weights[k] * x[k];
  return sigmoid(z);
}

double predict_proba(const LogisticModel& model, const FeatureVector& x) {
  return predict_proba(model, std::span<const double>(x.values));
}

LossAndGradient loss_and_gradient(const LogisticModel& model, const TrainingSet& data) {
  if (model.feature_names.size() != model.dimension() ||
      model.scaling.size() != model.dimension()) {
    throw Error(ErrorKind::DimensionMismatch, "model fields have inconsistent lengths");
  }
  check_rows(data, model.dimension());
  return evaluate_objective(model, scaled_design(model, data));
}

std::string model_to_json(const LogisticModel& model) {
  nlohmann::ordered_json j;
  j["feature_names"] = model.feature_names;
  j["weights"] = model.weights;
  j["intercept"] = model.intercept;
  std::vector<double> means;
  std::vector<double> stds;
  for (const auto& s : model.scaling) {
    means.push_back(s.mean);
    stds.push_back(s.stddev);
  }
  j["scaling"] = {{"means", means}, {"stds", stds}};
  j["train_config"] = {{"epochs", model.config.epochs},
                       {"learning_rate", model.config.learning_rate},
                       {"l2_penalty", model.config.l2_penalty},
                       {"seed", model.config.seed}};
  return j.dump(2) + "\n";
}

LogisticModel model_from_json(const std::string& text) {
  LogisticModel model;
  try {
    const auto j = nlohmann::json::parse(text);
    model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    model.weights = j.at("weights").get<std::vector<double>>();
    model.intercept = j.at("intercept").get<double>();
    const auto means = j.at("scaling").at("means").get<std::vector<double>>();
    const auto stds = j.at("scaling").at("stds").get<std::vector<double>>();
    if (means.size() != stds.size()) {
      throw Error(ErrorKind::DimensionMismatch, "scaling means and stds differ in length");
    }
    for (std::size_t k = 0; k < means.size(); ++k) model.scaling.push_back({means[k], stds[k]});
    if (j.contains("train_config")) {
      const auto& c = j["train_config"];
      model.config.epochs = c.value("epochs", model.config.epochs);
      model.config.learning_rate = c.value("learning_rate", model.config.learning_rate);
      model.config.l2_penalty = c.value("l2_penalty", model.config.l2_penalty);
      model.config.seed = c.value("seed", model.config.seed);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::BadValue, std::string("malformed model JSON: ") + e.what());
  }
  if (model.weights.size() != model.feature_names.size() ||
      model.scaling.size() != model.feature_names.size()) {
    throw Error(ErrorKind::DimensionMismatch, "model JSON fields have inconsistent lengths");
  }
  for (const auto& s : model.scaling) {
    if (!(s.stddev > 0.0)) throw Error(ErrorKind::BadValue, "model JSON has a non-positive stddev");
  }
  return model;
}

}  // namespace leadframe
