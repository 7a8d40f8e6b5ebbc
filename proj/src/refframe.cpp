#include "leadframe/refframe.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "leadframe/csv.hpp"
#include "leadframe/errors.hpp"

namespace leadframe {

std::vector<std::string> AggregationPlan::output_names() const {
  std::vector<std::string> names;
  names.reserve(specs.size());
  for (const auto& s : specs) names.push_back(s.output_name);
  return names;
}

CompiledPlan::CompiledPlan(const AggregationPlan& plan, const PanelSchema& schema) : plan_(plan) {
  if (plan.specs.empty()) throw Error(ErrorKind::InvalidConfig, "aggregation plan is empty");
  std::set<std::string> names;
  auto resolve = [&](const FeatureSpec& spec, const std::string& column) {
    auto idx = schema.feature_index(column);
    if (!idx) {
      throw Error(ErrorKind::UnknownColumn, "feature '" + spec.output_name +
                                                "' references unknown column '" + column + "'");
    }
    return *idx;
  };
  for (const auto& spec : plan.specs) {
    if (spec.output_name.empty()) {
      throw Error(ErrorKind::InvalidConfig, "feature output name is empty");
    }
    if (!names.insert(spec.output_name).second) {
      throw Error(ErrorKind::InvalidConfig, "duplicate feature name '" + spec.output_name + "'");
    }
    Binding b{spec.kind, resolve(spec, spec.column), 0};
    if (spec.kind == AggregateKind::RatioOfSums) b.denominator = resolve(spec, spec.denominator);
    bindings_.push_back(b);
  }
}

std::optional<PeriodIndex> detect_event_time(const EntityTimeline& timeline) {
  for (const auto& r : timeline.records) {
    if (r.event_flag == 1) return r.period;
  }
  return std::nullopt;
}

TruncatedTimeline truncate_at_reference(const EntityTimeline& timeline,
                                        const ReferenceFrameConfig& config) {
  if (config.lead_time < 0) {
    throw Error(ErrorKind::InvalidConfig, "lead time must be non-negative");
  }
  TruncatedTimeline out;
  out.entity_id = timeline.entity_id;
  const std::span<const PanelRecord> all(timeline.records);

  const auto event = detect_event_time(timeline);
  if (!event) {
    out.records = all;
    out.label = 0;
    return out;
  }

  // Records are ascending, so the window is a prefix. cutoff <= T also
  // excludes everything after the event.
  const std::int64_t cutoff = event->ordinal - config.lead_time;
  auto end = std::find_if(all.begin(), all.end(),
                          [cutoff](const PanelRecord& r) { return r.period.ordinal > cutoff; });
  out.records = all.first(static_cast<std::size_t>(end - all.begin()));
  out.label = 1;
  out.dropped = out.records.empty() && config.empty_window_policy == EmptyWindowPolicy::Drop;
  return out;
}

FeatureVector aggregate(const TruncatedTimeline& truncated, const CompiledPlan& plan) {
  FeatureVector fv;
  fv.entity_id = truncated.entity_id;
  fv.values.reserve(plan.size());
  const auto recs = truncated.records;

  for (const auto& b : plan.bindings()) {
    double value = 0.0;
    switch (b.kind) {
      case AggregateKind::Sum:
        for (const auto& r : recs) value += r.features.at(b.column);
        break;
      case AggregateKind::CountNonzero:
        for (const auto& r : recs) value += r.features.at(b.column) != 0.0 ? 1.0 : 0.0;
        break;
      case AggregateKind::Max:
        for (const auto& r : recs) value = std::max(value, r.features.at(b.column));
        break;
      case AggregateKind::Last:
        if (!recs.empty()) value = recs.back().features.at(b.column);
        break;
      case AggregateKind::RatioOfSums: {
        double num = 0.0;
        double den = 0.0;
        for (const auto& r : recs) {
          num += r.features.at(b.column);
          den += r.features.at(b.denominator);
        }
        value = den == 0.0 ? 0.0 : num / den;
        break;
      }
    }
    fv.values.push_back(value);
  }
  return fv;
}

FeatureVector score_features(const EntityTimeline& timeline, const CompiledPlan& plan) {
  TruncatedTimeline whole{timeline.entity_id, timeline.records, 0, false};
  return aggregate(whole, plan);
}

std::size_t TrainingSet::positives() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const TrainingRow& r) { return r.label == 1; }));
}

TrainingSet build_training_set(std::span<const EntityTimeline> timelines,
                               const ReferenceFrameConfig& config, const CompiledPlan& plan) {
  TrainingSet set;
  set.plan = plan.plan();
  set.report.lead_time = config.lead_time;
  set.report.policy = config.empty_window_policy;

  std::vector<const EntityTimeline*> order;
  order.reserve(timelines.size());
  for (const auto& t : timelines) order.push_back(&t);
  std::sort(order.begin(), order.end(), [](const EntityTimeline* a, const EntityTimeline* b) {
    return a->entity_id < b->entity_id;
  });

  for (const EntityTimeline* t : order) {
    const auto truncated = truncate_at_reference(*t, config);
    if (truncated.dropped) {
      set.report.dropped_entities.push_back(t->entity_id);
      continue;
    }
    (truncated.label == 1 ? set.report.events : set.report.non_events) += 1;
    set.rows.push_back({aggregate(truncated, plan), truncated.label});
  }
  return set;
}

void write_training_csv(std::ostream& out, const TrainingSet& data) {
  csv::Row row{"entity_id"};
  for (const auto& name : data.plan.output_names()) row.push_back(name);
  row.push_back("label");
  csv::write_row(out, row);
  for (const auto& r : data.rows) {
    row.clear();
    row.push_back(r.features.entity_id);
    for (double v : r.features.values) row.push_back(csv::format_number(v));
    row.push_back(r.label ? "1" : "0");
    csv::write_row(out, row);
  }
}

TrainingSet read_training_csv(std::istream& in) {
  csv::Reader reader(in);
  auto header = reader.next();
  if (!header) throw Error(ErrorKind::EmptyInput, "training CSV has no header row");
  if (header->size() < 3 || header->front() != "entity_id" || header->back() != "label") {
    throw Error(ErrorKind::MissingColumn,
                "training CSV header must be entity_id, <features...>, label");
  }
  TrainingSet set;
  for (std::size_t i = 1; i + 1 < header->size(); ++i) {
    set.plan.specs.push_back({(*header)[i], AggregateKind::Sum, (*header)[i], {}});
  }
  while (auto row = reader.next()) {
    const std::string where = "line " + std::to_string(reader.line());
    if (row->size() != header->size()) {
      throw Error(ErrorKind::BadValue, where + ": wrong number of fields");
    }
    TrainingRow tr;
    tr.features.entity_id = row->front();
    for (std::size_t i = 1; i + 1 < row->size(); ++i) {
      auto v = csv::parse_number((*row)[i]);
      if (!v || !std::isfinite(*v)) {
        throw Error(ErrorKind::BadValue, where + ": '" + (*row)[i] + "' is not a finite number");
      }
      tr.features.values.push_back(*v);
    }
    const auto& label = row->back();
    if (label != "0" && label != "1") {
      throw Error(ErrorKind::BadValue, where + ": label '" + label + "' is not 0 or 1");
    }
    tr.label = label == "1" ? 1 : 0;
    (tr.label ? set.report.events : set.report.non_events) += 1;
    set.rows.push_back(std::move(tr));
  }
  if (set.rows.empty()) throw Error(ErrorKind::EmptyInput, "training CSV has no data rows");
  return set;
}

std::string report_to_json(const TransformReport& report) {
  nlohmann::ordered_json j;
  j["lead_time"] = report.lead_time;
  j["empty_window_policy"] = to_string(report.policy);
  j["events"] = report.events;
  j["non_events"] = report.non_events;
  j["dropped"] = report.dropped_entities.size();
  j["dropped_entities"] = report.dropped_entities;
  return j.dump(2) + "\n";
}

std::string to_string(AggregateKind kind) {
  switch (kind) {
    case AggregateKind::Sum: return "sum";
    case AggregateKind::CountNonzero: return "count_nonzero";
    case AggregateKind::Max: return "max";
    case AggregateKind::Last: return "last";
    case AggregateKind::RatioOfSums: return "ratio_of_sums";
  }
  return "unknown";
}

AggregateKind parse_aggregate_kind(const std::string& text) {
  for (auto k : {AggregateKind::Sum, AggregateKind::CountNonzero, AggregateKind::Max,
                 AggregateKind::Last, AggregateKind::RatioOfSums}) {
    if (to_string(k) == text) return k;
  }
  throw Error(ErrorKind::InvalidConfig, "unknown aggregate kind '" + text + "'");
}

std::string to_string(EmptyWindowPolicy policy) {
  return policy == EmptyWindowPolicy::Drop ? "drop" : "zeros";
}

EmptyWindowPolicy parse_policy(const std::string& text) {
  if (text == "drop") return EmptyWindowPolicy::Drop;
  if (text == "zeros") return EmptyWindowPolicy::EmitZeros;
  throw Error(ErrorKind::InvalidConfig, "unknown empty-window policy '" + text + "'");
}

}  // namespace leadframe
