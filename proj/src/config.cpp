#include "leadframe/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "leadframe/errors.hpp"

namespace leadframe {

using nlohmann::json;
using nlohmann::ordered_json;

void RunConfig::validate() const {
  schema.validate();
  CompiledPlan compiled(plan, schema);
  if (reference_frame.lead_time < 0) {
    throw Error(ErrorKind::InvalidConfig, "reference_frame.lead_time must be non-negative");
  }
  train.validate();
  if (!(eval.test_fraction > 0.0 && eval.test_fraction < 1.0)) {
    throw Error(ErrorKind::InvalidConfig, "eval.test_fraction must lie strictly between 0 and 1");
  }
  if (eval.lead_times.empty()) throw Error(ErrorKind::InvalidConfig, "eval.lead_times is empty");
  for (auto t : eval.lead_times) {
    if (t < 0) throw Error(ErrorKind::InvalidConfig, "eval.lead_times must be non-negative");
  }
  synth.validate();
}

RunConfig default_run_config() {
  RunConfig c;
  c.schema = default_schema();
  c.plan.specs = {
      {"outbound_calls_total", AggregateKind::Sum, "outbound_calls", {}},
      {"complaints_total", AggregateKind::Sum, "complaints", {}},
      {"service_interruptions_total", AggregateKind::Sum, "service_interruptions", {}},
      {"avg_fault_resolution_time", AggregateKind::RatioOfSums, "fault_resolution_time",
       "service_interruptions"},
      {"promotions_offered_total", AggregateKind::Sum, "promotions_offered", {}},
  };
  return c;
}

namespace {

template <typename T>
void read_field(const json& obj, const char* key, T& target) {
  if (obj.contains(key)) target = obj.at(key).get<T>();
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  RunConfig c = default_run_config();
  try {
    const json j = json::parse(json_text);
    if (!j.is_object()) throw Error(ErrorKind::InvalidConfig, "config must be a JSON object");

    if (j.contains("schema")) {
      const auto& s = j["schema"];
      read_field(s, "entity_column", c.schema.entity_column);
      read_field(s, "period_column", c.schema.period_column);
      read_field(s, "event_column", c.schema.event_column);
      read_field(s, "feature_columns", c.schema.feature_columns);
    }
    if (j.contains("plan")) {
      c.plan.specs.clear();
      for (const auto& item : j["plan"]) {
        FeatureSpec spec;
        spec.output_name = item.at("name").get<std::string>();
        spec.kind = parse_aggregate_kind(item.at("kind").get<std::string>());
        spec.column = item.at("column").get<std::string>();
        if (spec.kind == AggregateKind::RatioOfSums) {
          spec.denominator = item.at("denominator").get<std::string>();
        }
        c.plan.specs.push_back(std::move(spec));
      }
    }
    if (j.contains("reference_frame")) {
      const auto& r = j["reference_frame"];
      read_field(r, "lead_time", c.reference_frame.lead_time);
      if (r.contains("empty_window_policy")) {
        c.reference_frame.empty_window_policy =
            parse_policy(r["empty_window_policy"].get<std::string>());
      }
    }
    if (j.contains("train")) {
      const auto& t = j["train"];
      read_field(t, "epochs", c.train.epochs);
      read_field(t, "learning_rate", c.train.learning_rate);
      read_field(t, "l2_penalty", c.train.l2_penalty);
      read_field(t, "seed", c.train.seed);
    }
    if (j.contains("eval")) {
      const auto& e = j["eval"];
      read_field(e, "test_fraction", c.eval.test_fraction);
      read_field(e, "threshold", c.eval.threshold);
      read_field(e, "lead_times", c.eval.lead_times);
    }
    if (j.contains("synth")) {
      const auto& s = j["synth"];
      read_field(s, "n_entities", c.synth.n_entities);
      read_field(s, "n_periods", c.synth.n_periods);
      read_field(s, "event_rate", c.synth.event_rate);
      read_field(s, "ramp_length", c.synth.ramp_length);
      read_field(s, "signal_strength", c.synth.signal_strength);
      read_field(s, "noise_rate", c.synth.noise_rate);
      read_field(s, "seed", c.synth.seed);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidConfig, std::string("malformed config: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

std::string run_config_to_json(const RunConfig& c, int indent) {
  ordered_json j;
  j["schema"] = {{"entity_column", c.schema.entity_column},
                 {"period_column", c.schema.period_column},
                 {"event_column", c.schema.event_column},
                 {"feature_columns", c.schema.feature_columns}};
  ordered_json plan = ordered_json::array();
  for (const auto& s : c.plan.specs) {
    ordered_json item = {{"name", s.output_name}, {"kind", to_string(s.kind)}, {"column", s.column}};
    if (s.kind == AggregateKind::RatioOfSums) item["denominator"] = s.denominator;
    plan.push_back(item);
  }
  j["plan"] = plan;
  j["reference_frame"] = {{"lead_time", c.reference_frame.lead_time},
                          {"empty_window_policy", to_string(c.reference_frame.empty_window_policy)}};
  j["train"] = {{"epochs", c.train.epochs},
                {"learning_rate", c.train.learning_rate},
                {"l2_penalty", c.train.l2_penalty},
                {"seed", c.train.seed}};
  j["eval"] = {{"test_fraction", c.eval.test_fraction},
               {"threshold", c.eval.threshold},
               {"lead_times", c.eval.lead_times}};
  j["synth"] = {{"n_entities", c.synth.n_entities},
                {"n_periods", c.synth.n_periods},
                {"event_rate", c.synth.event_rate},
                {"ramp_length", c.synth.ramp_length},
                {"signal_strength", c.synth.signal_strength},
                {"noise_rate", c.synth.noise_rate},
                {"seed", c.synth.seed}};
  return j.dump(indent);
}

}  // namespace leadframe
