#include "leadframe/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "leadframe/config.hpp"
#include "leadframe/csv.hpp"
#include "leadframe/errors.hpp"

namespace leadframe {

namespace {

enum class LogLevel { Quiet = 0, Error, Warn, Info, Debug };

LogLevel log_level_from_env() {
  const char* raw = std::getenv("LEADFRAME_LOG");
  if (!raw) return LogLevel::Info;
  const std::string v = raw;
  if (v == "quiet" || v == "off") return LogLevel::Quiet;
  if (v == "error") return LogLevel::Error;
  if (v == "warn") return LogLevel::Warn;
  if (v == "debug") return LogLevel::Debug;
  return LogLevel::Info;
}

class Logger {
public:
  explicit Logger(std::ostream& sink) : sink_(sink), level_(log_level_from_env()) {}

  void log(LogLevel level, const std::string& message) const {
    if (level > level_ || level == LogLevel::Quiet) return;
    static constexpr const char* names[] = {"", "error", "warn", "info", "debug"};
    sink_ << "[leadframe " << names[static_cast<int>(level)] << "] " << message << '\n';
  }

private:
  std::ostream& sink_;
  LogLevel level_;
};

void write_file(const std::string& path, const std::string& content) {
  const auto parent = std::filesystem::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "failed writing '" + path + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string report_path_for(const std::string& output) {
  std::filesystem::path p(output);
  p.replace_extension(".report.json");
  return p.string();
}

std::vector<std::int64_t> parse_lead_times(const std::string& text) {
  std::vector<std::int64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto v = csv::parse_number(item);
    if (!v || *v < 0 || *v != static_cast<double>(static_cast<std::int64_t>(*v))) {
      throw Error(ErrorKind::InvalidConfig, "bad lead time '" + item + "' in --lead-times");
    }
    out.push_back(static_cast<std::int64_t>(*v));
  }
  if (out.empty()) throw Error(ErrorKind::InvalidConfig, "--lead-times is empty");
  return out;
}

/// Flag values shared across subcommands; each subcommand registers the
/// subset it accepts.
struct Options {
  std::string input;
  std::string output;
  std::string config;
  std::string model;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> lead_time;
  std::optional<std::string> lead_times;
  std::optional<std::string> policy;
  std::optional<double> threshold;
  std::optional<std::int64_t> entities;
  std::optional<std::int64_t> periods;
  std::optional<double> event_rate;
  std::optional<std::int64_t> ramp_length;
  std::optional<double> signal;
  std::optional<double> noise;
};

RunConfig resolve_config(const Options& o) {
  RunConfig c = o.config.empty() ? default_run_config() : load_run_config(o.config);
  if (o.seed) {
    c.train.seed = *o.seed;
    c.synth.seed = *o.seed;
  }
  if (o.lead_time) c.reference_frame.lead_time = *o.lead_time;
  if (o.lead_times) c.eval.lead_times = parse_lead_times(*o.lead_times);
  if (o.policy) c.reference_frame.empty_window_policy = parse_policy(*o.policy);
  if (o.threshold) c.eval.threshold = *o.threshold;
  if (o.entities) c.synth.n_entities = *o.entities;
  if (o.periods) c.synth.n_periods = *o.periods;
  if (o.event_rate) c.synth.event_rate = *o.event_rate;
  if (o.ramp_length) c.synth.ramp_length = *o.ramp_length;
  if (o.signal) c.synth.signal_strength = *o.signal;
  if (o.noise) c.synth.noise_rate = *o.noise;
  c.validate();
  return c;
}

int cmd_validate(const Options& o, std::ostream& out, const Logger& log) {
  const RunConfig c = resolve_config(o);
  log.log(LogLevel::Info, "resolved config: " + run_config_to_json(c, -1));
  const PanelDataset dataset = read_panel_file(o.input, c.schema);

  std::vector<EntityTimeline> timelines;
  try {
    timelines = build_timelines(dataset);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::DuplicateObservation) throw;
    nlohmann::ordered_json j{{"status", "invalid"},
                             {"error", std::string(to_string(e.kind()))},
                             {"message", e.what()}};
    out << j.dump() << '\n';
    return kExitDomain;
  }

  std::size_t warnings = 0;
  for (const auto& t : timelines) {
    const ValidationReport report = validate_timeline(t);
    const auto event = detect_event_time(t);
    nlohmann::ordered_json j;
    j["entity"] = t.entity_id;
    j["records"] = t.records.size();
    j["event_period"] = event ? nlohmann::ordered_json(event->label) : nlohmann::ordered_json(nullptr);
    j["findings"] = nlohmann::ordered_json::array();
    for (const auto& f : report.findings) {
      if (f.severity == Severity::Warning) ++warnings;
      j["findings"].push_back(
          {{"severity", to_string(f.severity)}, {"kind", to_string(f.kind)}, {"message", f.message}});
    }
    out << j.dump() << '\n';
  }
  nlohmann::ordered_json summary{{"status", "ok"},
                                 {"entities", timelines.size()},
                                 {"records", dataset.records.size()},
                                 {"warnings", warnings}};
  out << summary.dump() << '\n';
  return kExitOk;
}

int cmd_transform(const Options& o, const Logger& log) {
  const RunConfig c = resolve_config(o);
  log.log(LogLevel::Info, "resolved config: " + run_config_to_json(c, -1));
  const PanelDataset dataset = read_panel_file(o.input, c.schema);
  const auto timelines = build_timelines(dataset);
  const CompiledPlan plan(c.plan, c.schema);
  const TrainingSet set = build_training_set(timelines, c.reference_frame, plan);

  std::ostringstream csv_out;
  write_training_csv(csv_out, set);
  write_file(o.output, csv_out.str());
  const std::string report_path = report_path_for(o.output);
  write_file(report_path, report_to_json(set.report));
  log.log(LogLevel::Info, "wrote " + std::to_string(set.rows.size()) + " rows to " + o.output +
                              " and report to " + report_path);
  return kExitOk;
}

int cmd_train(const Options& o, const Logger& log) {
  const RunConfig c = resolve_config(o);
  log.log(LogLevel::Info, "resolved config: " + run_config_to_json(c, -1));
  std::ifstream in(o.input, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + o.input + "'");
  const TrainingSet set = read_training_csv(in);
  std::vector<double> trace;
  const LogisticModel model = train_logistic(set, c.train, &trace);
  write_file(o.output, model_to_json(model));
  log.log(LogLevel::Info, "trained on " + std::to_string(set.rows.size()) + " rows, final loss " +
                              csv::format_number(trace.back()));
  return kExitOk;
}

int cmd_score(const Options& o, const Logger& log) {
  const RunConfig c = resolve_config(o);
  log.log(LogLevel::Info, "resolved config: " + run_config_to_json(c, -1));
  const LogisticModel model = model_from_json(read_file(o.model));
  if (model.feature_names != c.plan.output_names()) {
    throw Error(ErrorKind::DimensionMismatch,
                "model features do not match the configured aggregation plan");
  }
  const PanelDataset dataset = read_panel_file(o.input, c.schema);
  const auto timelines = build_timelines(dataset);
  const CompiledPlan plan(c.plan, c.schema);

  std::ostringstream s;
  csv::write_row(s, {"entity_id", "probability"});
  for (const auto& t : timelines) {
    const double p = predict_proba(model, score_features(t, plan));
    csv::write_row(s, {t.entity_id, csv::format_number(p)});
  }
  write_file(o.output, s.str());
  log.log(LogLevel::Info, "scored " + std::to_string(timelines.size()) + " entities");
  return kExitOk;
}

int cmd_sweep(const Options& o, const Logger& log) {
  const RunConfig c = resolve_config(o);
  log.log(LogLevel::Info, "resolved config: " + run_config_to_json(c, -1));
  const PanelDataset dataset = read_panel_file(o.input, c.schema);
  const auto timelines = build_timelines(dataset);
  const CompiledPlan plan(c.plan, c.schema);

  SweepConfig sweep;
  sweep.lead_times = c.eval.lead_times;
  sweep.train = c.train;
  sweep.test_fraction = c.eval.test_fraction;
  sweep.threshold = c.eval.threshold;
  sweep.seed = c.train.seed;
  sweep.policy = c.reference_frame.empty_window_policy;
  const TradeoffCurve curve = lead_time_sweep(timelines, plan, sweep);

  std::ostringstream s;
  write_curve_csv(s, curve);
  write_file(o.output, s.str());
  log.log(LogLevel::Info, "wrote " + std::to_string(curve.points.size()) + " curve points");
  return kExitOk;
}

int cmd_synth(const Options& o, const Logger& log) {
  const RunConfig c = resolve_config(o);
  log.log(LogLevel::Info, "resolved config: " + run_config_to_json(c, -1));
  const PanelDataset dataset = generate_panel(c.synth);
  std::ostringstream s;
  write_panel_csv(s, dataset);
  write_file(o.output, s.str());
  log.log(LogLevel::Info, "generated " + std::to_string(dataset.records.size()) + " records");
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lead-time reference-frame transform, training and evaluation for panel data",
               "leadframe"};
  app.require_subcommand(1);
  Options o;

  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "Run configuration JSON");
  };
  auto* validate = app.add_subcommand("validate", "Parse a panel CSV and report per-entity findings");
  validate->add_option("--input", o.input, "Panel CSV")->required();
  add_config(validate);

  auto* transform = app.add_subcommand("transform", "Build the lead-time shifted training set");
  transform->add_option("--input", o.input, "Panel CSV")->required();
  transform->add_option("--output", o.output, "Training-set CSV")->required();
  transform->add_option("--lead-time", o.lead_time, "Lead time in periods");
  transform->add_option("--policy", o.policy, "Empty-window policy: drop or zeros");
  add_config(transform);

  auto* train = app.add_subcommand("train", "Fit a logistic model on a training-set CSV");
  train->add_option("--input", o.input, "Training-set CSV")->required();
  train->add_option("--output", o.output, "Model JSON")->required();
  train->add_option("--seed", o.seed, "Seed");
  add_config(train);

  auto* score = app.add_subcommand("score", "Score every entity's full history");
  score->add_option("--model", o.model, "Model JSON")->required();
  score->add_option("--input", o.input, "Panel CSV")->required();
  score->add_option("--output", o.output, "Scores CSV")->required();
  add_config(score);

  auto* sweep = app.add_subcommand("sweep", "Measure accuracy across lead times");
  sweep->add_option("--input", o.input, "Panel CSV")->required();
  sweep->add_option("--output", o.output, "Curve CSV")->required();
  sweep->add_option("--lead-times", o.lead_times, "Comma-separated lead times");
  sweep->add_option("--seed", o.seed, "Split seed");
  sweep->add_option("--policy", o.policy, "Empty-window policy: drop or zeros");
  sweep->add_option("--threshold", o.threshold, "Classification threshold");
  add_config(sweep);

  auto* synth = app.add_subcommand("synth", "Generate a synthetic panel CSV");
  synth->add_option("--output", o.output, "Panel CSV")->required();
  synth->add_option("--seed", o.seed, "Generator seed");
  synth->add_option("--entities", o.entities, "Number of entities");
  synth->add_option("--periods", o.periods, "Number of periods");
  synth->add_option("--event-rate", o.event_rate, "Probability an entity has an event");
  synth->add_option("--ramp-length", o.ramp_length, "Precursor periods before the event");
  synth->add_option("--signal", o.signal, "Mean elevation during the precursor ramp");
  synth->add_option("--noise", o.noise, "Baseline mean feature intensity");
  add_config(synth);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }

  const Logger log(err);
  try {
    if (validate->parsed()) return cmd_validate(o, out, log);
    if (transform->parsed()) return cmd_transform(o, log);
    if (train->parsed()) return cmd_train(o, log);
    if (score->parsed()) return cmd_score(o, log);
    if (sweep->parsed()) return cmd_sweep(o, log);
    if (synth->parsed()) return cmd_synth(o, log);
  } catch (const Error& e) {
    nlohmann::ordered_json j{{"error", std::string(to_string(e.kind()))}, {"message", e.what()}};
    err << j.dump() << '\n';
    return is_input_error(e.kind()) ? kExitInput : kExitDomain;
  }
  return kExitDomain;
}

}  // namespace leadframe
