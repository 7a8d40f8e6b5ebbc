#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "leadframe/panel.hpp"

namespace leadframe {

enum class EmptyWindowPolicy { Drop, EmitZeros };

struct ReferenceFrameConfig {
  std::int64_t lead_time = 1;  // periods between the reference frame and the event
  EmptyWindowPolicy empty_window_policy = EmptyWindowPolicy::Drop;
};

enum class AggregateKind { Sum, CountNonzero, Max, Last, RatioOfSums };

struct FeatureSpec {
  std::string output_name;
  AggregateKind kind = AggregateKind::Sum;
  std::string column;
  std::string denominator;  // RatioOfSums only
};

struct AggregationPlan {
  std::vector<FeatureSpec> specs;

  std::vector<std::string> output_names() const;
};

/// A plan bound to a schema's feature column positions.
class CompiledPlan {
public:
  /// Throws UnknownColumn for a column absent from the schema and
  /// InvalidConfig for an empty plan or repeated output names.
  CompiledPlan(const AggregationPlan& plan, const PanelSchema& schema);

  const AggregationPlan& plan() const noexcept { return plan_; }
  std::size_t size() const noexcept { return plan_.specs.size(); }

  struct Binding {
    AggregateKind kind;
    std::size_t column;
    std::size_t denominator;
  };
  const std::vector<Binding>& bindings() const noexcept { return bindings_; }

private:
  AggregationPlan plan_;
  std::vector<Binding> bindings_;
};

struct FeatureVector {
  std::string entity_id;
  std::vector<double> values;

  bool operator==(const FeatureVector&) const = default;
};

/// The kept prefix of a timeline. `records` views into the source timeline,
/// which must outlive this object.
struct TruncatedTimeline {
  std::string entity_id;
  std::span<const PanelRecord> records;
  int label = 0;
  bool dropped = false;  // empty window under EmptyWindowPolicy::Drop
};

/// Period of the first record flagged 1, if any.
std::optional<PeriodIndex> detect_event_time(const EntityTimeline& timeline);

TruncatedTimeline truncate_at_reference(const EntityTimeline& timeline,
                                        const ReferenceFrameConfig& config);

FeatureVector aggregate(const TruncatedTimeline& truncated, const CompiledPlan& plan);

/// Inference path: aggregates the whole observed history.
FeatureVector score_features(const EntityTimeline& timeline, const CompiledPlan& plan);

struct TransformReport {
  std::int64_t lead_time = 0;
  EmptyWindowPolicy policy = EmptyWindowPolicy::Drop;
  std::size_t events = 0;
  std::size_t non_events = 0;
  std::vector<std::string> dropped_entities;

  bool operator==(const TransformReport&) const = default;
};

struct TrainingRow {
  FeatureVector features;
  int label = 0;

  bool operator==(const TrainingRow&) const = default;
};

struct TrainingSet {
  AggregationPlan plan;
  std::vector<TrainingRow> rows;
  TransformReport report;

  std::vector<std::string> feature_names() const { return plan.output_names(); }
  std::size_t positives() const;
};

/// One row per entity in ascending entity id order.
TrainingSet build_training_set(std::span<const EntityTimeline> timelines,
                               const ReferenceFrameConfig& config,
                               const CompiledPlan& plan);

void write_training_csv(std::ostream& out, const TrainingSet& data);

/// Reads the format written by write_training_csv. The plan carries only
/// output names (kind Sum, no columns) since the CSV does not record kinds.
TrainingSet read_training_csv(std::istream& in);

std::string report_to_json(const TransformReport& report);

std::string to_string(AggregateKind kind);
AggregateKind parse_aggregate_kind(const std::string& text);
std::string to_string(EmptyWindowPolicy policy);
EmptyWindowPolicy parse_policy(const std::string& text);

}  // namespace leadframe
