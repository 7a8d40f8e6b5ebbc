#include "leadframe/eval.hpp"

#include <algorithm>
#include <numeric>

#include "leadframe/csv.hpp"
#include "leadframe/errors.hpp"
#include "leadframe/synth.hpp"

namespace leadframe {

std::optional<double> rank_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorKind::DimensionMismatch, "scores and labels differ in length");
  }
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Mann-Whitney U from mid-ranks (1-based).
  double positive_rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double mid_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) {
        positive_rank_sum += mid_rank;
        ++positives;
      }
    }
    i = j;
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) return std::nullopt;
  const double np = static_cast<double>(positives);
  const double u = positive_rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * static_cast<double>(negatives));
}

Metrics compute_metrics(std::span<const double> scores, std::span<const int> labels,
                        double threshold) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorKind::DimensionMismatch, "scores and labels differ in length");
  }
  Metrics m;
  m.threshold = threshold;
  auto& c = m.confusion;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    const bool actual = labels[i] == 1;
    if (predicted && actual) ++c.tp;
    else if (predicted) ++c.fp;
    else if (actual) ++c.fn;
    else ++c.tn;
  }
  auto ratio = [](std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  m.accuracy = ratio(c.tp + c.tn, c.total());
  m.precision = ratio(c.tp, c.tp + c.fp);
  m.recall = ratio(c.tp, c.tp + c.fn);
  const auto auc = rank_auc(scores, labels);
  m.auc_defined = auc.has_value();
  m.auc = auc.value_or(0.5);
  return m;
}

Metrics evaluate(const LogisticModel& model, const TrainingSet& test, double threshold) {
  std::vector<double> scores;
  std::vector<int> labels;
  scores.reserve(test.rows.size());
  labels.reserve(test.rows.size());
  for (const auto& r : test.rows) {
    scores.push_back(predict_proba(model, r.features));
    labels.push_back(r.label);
  }
  return compute_metrics(scores, labels, threshold);
}

EntitySplit split_entities(std::span<const EntityTimeline> timelines, double test_fraction,
                           std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorKind::InvalidConfig, "test fraction must lie strictly between 0 and 1");
  }
  const std::size_t n = timelines.size();
  if (n < 2) {
    throw Error(ErrorKind::TooFewEntities,
                "need at least 2 entities to split, got " + std::to_string(n));
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return timelines[a].entity_id < timelines[b].entity_id;
  });
  SplitMix64 rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    std::swap(order[i], order[rng.below(i + 1)]);
  }

  auto n_test = static_cast<std::size_t>(static_cast<double>(n) * test_fraction);
  n_test = std::clamp<std::size_t>(n_test, 1, n - 1);

  std::vector<std::size_t> test_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
  std::vector<std::size_t> train_idx(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
  std::sort(test_idx.begin(), test_idx.end());
  std::sort(train_idx.begin(), train_idx.end());

  EntitySplit split;
  for (auto i : train_idx) split.train.push_back(timelines[i]);
  for (auto i : test_idx) split.test.push_back(timelines[i]);
  auto by_id = [](const EntityTimeline& a, const EntityTimeline& b) {
    return a.entity_id < b.entity_id;
  };
  std::sort(split.train.begin(), split.train.end(), by_id);
  std::sort(split.test.begin(), split.test.end(), by_id);
  return split;
}

TradeoffCurve lead_time_sweep(std::span<const EntityTimeline> timelines,
                              const CompiledPlan& plan, const SweepConfig& config) {
  if (config.lead_times.empty()) {
    throw Error(ErrorKind::InvalidConfig, "sweep needs at least one lead time");
  }
  for (auto t : config.lead_times) {
    if (t < 0) throw Error(ErrorKind::InvalidConfig, "lead times must be non-negative");
  }
  config.train.validate();
  std::vector<std::int64_t> lead_times = config.lead_times;
  std::sort(lead_times.begin(), lead_times.end());
  lead_times.erase(std::unique(lead_times.begin(), lead_times.end()), lead_times.end());

  const EntitySplit split = split_entities(timelines, config.test_fraction, config.seed);

  TradeoffCurve curve;
  for (auto t : lead_times) {
    const ReferenceFrameConfig frame{t, config.policy};
    const TrainingSet train = build_training_set(split.train, frame, plan);
    const TrainingSet test = build_training_set(split.test, frame, plan);

    TradeoffPoint point;
    point.lead_time = t;
    point.train_size = train.rows.size();
    point.test_size = test.rows.size();

    const std::size_t pos = train.positives();
    if (pos == 0 || pos == train.rows.size()) {
      if (train.report.events == 0 && !train.report.dropped_entities.empty()) {
        point.flags.push_back("no_events_retained");
      }
      point.flags.push_back("degenerate_train");
    } else if (test.rows.empty()) {
      point.flags.push_back("empty_test");
    } else {
      const LogisticModel model = train_logistic(train, config.train);
      point.metrics = evaluate(model, test, config.threshold);
      if (!point.metrics->auc_defined) point.flags.push_back("single_class_test");
    }
    curve.points.push_back(std::move(point));
  }
  return curve;
}

void write_curve_csv(std::ostream& out, const TradeoffCurve& curve) {
  csv::write_row(out, {"lead_time", "accuracy", "precision", "recall", "auc", "train_size",
                       "test_size", "flags"});
  for (const auto& p : curve.points) {
    csv::Row row{std::to_string(p.lead_time)};
    if (p.metrics) {
      for (double v : {p.metrics->accuracy, p.metrics->precision, p.metrics->recall,
                       p.metrics->auc}) {
        row.push_back(csv::format_number(v));
      }
    } else {
      row.insert(row.end(), 4, "");
    }
    row.push_back(std::to_string(p.train_size));
    row.push_back(std::to_string(p.test_size));
    std::string flags;
    for (const auto& f : p.flags) {
      if (!flags.empty()) flags += '|';
      flags += f;
    }
    row.push_back(flags);
    csv::write_row(out, row);
  }
}

}  // namespace leadframe
