#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "leadframe/model.hpp"
#include "leadframe/refframe.hpp"

namespace leadframe {

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + fp + tn + fn; }
  bool operator==(const Confusion&) const = default;
};

struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double auc = 0.5;
  Confusion confusion;
  double threshold = 0.5;
  bool auc_defined = true;  // false when one class is absent (auc reported as 0.5)

  bool operator==(const Metrics&) const = default;
};

/// Rank-statistic AUC: fraction of positive/negative pairs ordered correctly,
/// ties counted 0.5. Returns nullopt when either class is absent.
std::optional<double> rank_auc(std::span<const double> scores, std::span<const int> labels);

/// Rows scoring >= threshold are predicted positive.
Metrics compute_metrics(std::span<const double> scores, std::span<const int> labels,
                        double threshold);

Metrics evaluate(const LogisticModel& model, const TrainingSet& test, double threshold);

struct EntitySplit {
  std::vector<EntityTimeline> train;
  std::vector<EntityTimeline> test;
};

/// Seeded shuffle of entity ids, floor(n * test_fraction) clamped to
/// [1, n - 1] entities go to the test side.
EntitySplit split_entities(std::span<const EntityTimeline> timelines, double test_fraction,
                           std::uint64_t seed);

struct TradeoffPoint {
  std::int64_t lead_time = 0;
  std::optional<Metrics> metrics;  // absent when the model could not be trained
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::vector<std::string> flags;
};

struct TradeoffCurve {
  std::vector<TradeoffPoint> points;
};

struct SweepConfig {
  std::vector<std::int64_t> lead_times;
  TrainConfig train;
  double test_fraction = 0.3;
  double threshold = 0.5;
  std::uint64_t seed = 42;
  EmptyWindowPolicy policy = EmptyWindowPolicy::Drop;
};

/// Splits once, then builds, trains and evaluates at each lead time on the
/// same split. Points are in ascending lead time order.
TradeoffCurve lead_time_sweep(std::span<const EntityTimeline> timelines,
                              const CompiledPlan& plan, const SweepConfig& config);

void write_curve_csv(std::ostream& out, const TradeoffCurve& curve);

}  // namespace leadframe
