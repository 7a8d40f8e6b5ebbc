#include "leadframe/panel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <unordered_map>

#include "leadframe/csv.hpp"
#include "leadframe/errors.hpp"

namespace leadframe {

void PanelSchema::validate() const {
  if (feature_columns.empty()) {
    throw Error(ErrorKind::InvalidConfig, "schema declares no feature columns");
  }
  std::set<std::string> seen;
  auto check = [&](const std::string& name, const char* role) {
    if (name.empty()) {
      throw Error(ErrorKind::InvalidConfig, std::string("schema ") + role + " name is empty");
    }
    if (!seen.insert(name).second) {
      throw Error(ErrorKind::InvalidConfig, "schema column '" + name + "' is declared twice");
    }
  };
  check(entity_column, "entity column");
  check(period_column, "period column");
  check(event_column, "event column");
  for (const auto& c : feature_columns) check(c, "feature column");
}

std::optional<std::size_t> PanelSchema::feature_index(const std::string& name) const {
  auto it = std::find(feature_columns.begin(), feature_columns.end(), name);
  if (it == feature_columns.end()) return std::nullopt;
  return static_cast<std::size_t>(it - feature_columns.begin());
}

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::int64_t to_int(std::string_view s) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw Error(ErrorKind::BadValue, "period '" + std::string(s) + "' is out of range");
  }
  return v;
}

}  // namespace

PeriodIndex parse_period(const std::string& label, PeriodFormat* detected) {
  std::string_view s = label;
  if (all_digits(s)) {
    if (detected) *detected = PeriodFormat::Integer;
    return {to_int(s), label};
  }
  if (s.size() == 7 && s[4] == '-' && all_digits(s.substr(0, 4)) && all_digits(s.substr(5, 2))) {
    const std::int64_t year = to_int(s.substr(0, 4));
    const std::int64_t month = to_int(s.substr(5, 2));
    if (month >= 1 && month <= 12) {
      if (detected) *detected = PeriodFormat::YearMonth;
      return {year * 12 + (month - 1), label};
    }
  }
  throw Error(ErrorKind::BadValue,
              "unparseable period '" + label + "' (expected integer or YYYY-MM)");
}

PanelDataset parse_panel_csv(std::istream& source, const PanelSchema& schema) {
  schema.validate();
  csv::Reader reader(source);
  auto header = reader.next();
  if (!header) throw Error(ErrorKind::EmptyInput, "input has no header row");

  auto locate = [&](const std::string& name) {
    auto it = std::find(header->begin(), header->end(), name);
    if (it == header->end()) {
      throw Error(ErrorKind::MissingColumn, "column '" + name + "' not found in header");
    }
    return static_cast<std::size_t>(it - header->begin());
  };
  const std::size_t entity_col = locate(schema.entity_column);
  const std::size_t period_col = locate(schema.period_column);
  const std::size_t event_col = locate(schema.event_column);
  std::vector<std::size_t> feature_cols;
  for (const auto& name : schema.feature_columns) feature_cols.push_back(locate(name));

  PanelDataset dataset;
  dataset.schema = schema;
  std::optional<PeriodFormat> format;

  while (auto row = reader.next()) {
    const std::string where = "line " + std::to_string(reader.line());
    if (row->size() != header->size()) {
      throw Error(ErrorKind::BadValue, where + ": expected " + std::to_string(header->size()) +
                                           " fields, found " + std::to_string(row->size()));
    }
    auto bad = [&](const std::string& column, const std::string& what) {
      return Error(ErrorKind::BadValue, where + ", column '" + column + "': " + what);
    };

    PanelRecord rec;
    rec.entity_id = (*row)[entity_col];
    if (rec.entity_id.empty()) throw bad(schema.entity_column, "empty entity id");

    PeriodFormat row_format{};
    try {
      rec.period = parse_period((*row)[period_col], &row_format);
    } catch (const Error& e) {
      throw bad(schema.period_column, e.what());
    }
    if (!format) format = row_format;
    if (*format != row_format) {
      throw bad(schema.period_column, "period format differs from earlier rows");
    }

    const std::string& flag = (*row)[event_col];
    if (flag == "0") {
      rec.event_flag = 0;
    } else if (flag == "1") {
      rec.event_flag = 1;
    } else {
      throw bad(schema.event_column, "event flag '" + flag + "' is not 0 or 1");
    }

    rec.features.reserve(feature_cols.size());
    for (std::size_t k = 0; k < feature_cols.size(); ++k) {
      const std::string& text = (*row)[feature_cols[k]];
      auto value = csv::parse_number(text);
      if (!value || !std::isfinite(*value)) {
        throw bad(schema.feature_columns[k], "'" + text + "' is not a finite number");
      }
      if (*value < 0.0) throw bad(schema.feature_columns[k], "negative value " + text);
      rec.features.push_back(*value + 0.0);
    }
    dataset.records.push_back(std::move(rec));
  }

  if (dataset.records.empty()) throw Error(ErrorKind::EmptyInput, "input has no data rows");
  return dataset;
}

PanelDataset read_panel_file(const std::string& path, const PanelSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  return parse_panel_csv(in, schema);
}

void write_panel_csv(std::ostream& out, const PanelDataset& dataset) {
  const auto& s = dataset.schema;
  csv::Row header{s.entity_column, s.period_column};
  header.insert(header.end(), s.feature_columns.begin(), s.feature_columns.end());
  header.push_back(s.event_column);
  csv::write_row(out, header);

  std::vector<const PanelRecord*> order;
  order.reserve(dataset.records.size());
  for (const auto& r : dataset.records) order.push_back(&r);
  std::stable_sort(order.begin(), order.end(), [](const PanelRecord* a, const PanelRecord* b) {
    if (a->entity_id != b->entity_id) return a->entity_id < b->entity_id;
    return a->period.ordinal < b->period.ordinal;
  });

  csv::Row row;
  for (const PanelRecord* r : order) {
    row.clear();
    row.push_back(r->entity_id);
    row.push_back(r->period.label);
    for (double v : r->features) row.push_back(csv::format_number(v));
    row.push_back(r->event_flag ? "1" : "0");
    csv::write_row(out, row);
  }
}

std::vector<EntityTimeline> build_timelines(const PanelDataset& dataset) {
  std::map<std::string, std::vector<PanelRecord>> grouped;
  for (const auto& r : dataset.records) grouped[r.entity_id].push_back(r);

  std::vector<EntityTimeline> timelines;
  timelines.reserve(grouped.size());
  for (auto& [id, records] : grouped) {
    std::sort(records.begin(), records.end(),
              [](const PanelRecord& a, const PanelRecord& b) { return a.period < b.period; });
    for (std::size_t i = 1; i < records.size(); ++i) {
      if (records[i].period == records[i - 1].period) {
        throw Error(ErrorKind::DuplicateObservation,
                    "entity '" + id + "' has two observations for period '" +
                        records[i].period.label + "'");
      }
    }
    timelines.push_back({id, std::move(records)});
  }
  return timelines;
}

bool ValidationReport::has(FindingKind kind) const {
  return std::any_of(findings.begin(), findings.end(),
                     [kind](const Finding& f) { return f.kind == kind; });
}

ValidationReport validate_timeline(const EntityTimeline& timeline) {
  ValidationReport report{timeline.entity_id, {}};
  const auto& recs = timeline.records;

  for (std::size_t i = 1; i < recs.size(); ++i) {
    const auto gap = recs[i].period.ordinal - recs[i - 1].period.ordinal;
    if (gap > 1) {
      report.findings.push_back({Severity::Info, FindingKind::PeriodGap,
                                 std::to_string(gap - 1) + " missing period(s) between '" +
                                     recs[i - 1].period.label + "' and '" +
                                     recs[i].period.label + "'"});
    }
  }

  std::size_t flagged = 0;
  std::optional<std::size_t> first_event;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    if (recs[i].event_flag == 1) {
      ++flagged;
      if (!first_event) first_event = i;
    }
  }
  if (flagged > 1) {
    report.findings.push_back({Severity::Warning, FindingKind::MultipleEvents,
                               std::to_string(flagged) +
                                   " records flagged; only the first event is used"});
  }
  if (first_event && *first_event + 1 < recs.size()) {
    report.findings.push_back({Severity::Warning, FindingKind::RecordsAfterEvent,
                               std::to_string(recs.size() - *first_event - 1) +
                                   " record(s) after event period '" +
                                   recs[*first_event].period.label + "' are ignored"});
  }
  return report;
}

std::string to_string(Severity severity) {
  return severity == Severity::Info ? "info" : "warning";
}

std::string to_string(FindingKind kind) {
  switch (kind) {
    case FindingKind::PeriodGap: return "period_gap";
    case FindingKind::MultipleEvents: return "multiple_events";
    case FindingKind::RecordsAfterEvent: return "records_after_event";
  }
  return "unknown";
}

}  // namespace leadframe
