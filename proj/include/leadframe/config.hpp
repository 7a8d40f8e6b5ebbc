#pragma once

#include <string>

#include "leadframe/eval.hpp"
#include "leadframe/model.hpp"
#include "leadframe/panel.hpp"
#include "leadframe/refframe.hpp"
#include "leadframe/synth.hpp"

namespace leadframe {

struct EvalSettings {
  double test_fraction = 0.3;
  double threshold = 0.5;
  std::vector<std::int64_t> lead_times{0, 1, 2, 3};
};

/// Everything a batch run needs. Serialized as one JSON document with
/// sections schema / plan / reference_frame / train / eval / synth; any
/// missing section falls back to default_run_config().
struct RunConfig {
  PanelSchema schema;
  AggregationPlan plan;
  ReferenceFrameConfig reference_frame;
  TrainConfig train;
  EvalSettings eval;
  SynthConfig synth;

  /// Checks every section and that plan columns exist in the schema.
  void validate() const;
};

/// The customer schema with the five-column experience plan: four Sum
/// totals plus total resolution time per service interruption.
RunConfig default_run_config();

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);
std::string run_config_to_json(const RunConfig& config, int indent = 2);

}  // namespace leadframe
