#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace leadframe {

/// Column layout of a panel CSV. Feature values are stored positionally in
/// the order of `feature_columns`.
struct PanelSchema {
  std::string entity_column;
  std::string period_column;
  std::string event_column;
  std::vector<std::string> feature_columns;

  /// Throws InvalidConfig on empty or repeated names or no features.
  void validate() const;

  std::optional<std::size_t> feature_index(const std::string& name) const;
};

enum class PeriodFormat { Integer, YearMonth };

/// A period on the global calendar axis. For "YYYY-MM" labels the ordinal is
/// year * 12 + (month - 1); for integer labels it is the integer itself, so
/// ordinal differences are calendar distances in periods.
struct PeriodIndex {
  std::int64_t ordinal = 0;
  std::string label;

  friend bool operator==(const PeriodIndex& a, const PeriodIndex& b) {
    return a.ordinal == b.ordinal;
  }
  friend auto operator<=>(const PeriodIndex& a, const PeriodIndex& b) {
    return a.ordinal <=> b.ordinal;
  }
};

/// Parses a label as an integer ordinal or ISO year-month. Throws BadValue.
PeriodIndex parse_period(const std::string& label, PeriodFormat* detected = nullptr);

struct PanelRecord {
  std::string entity_id;
  PeriodIndex period;
  std::vector<double> features;  // aligned with PanelSchema::feature_columns
  int event_flag = 0;

  bool operator==(const PanelRecord&) const = default;
};

struct PanelDataset {
  PanelSchema schema;
  std::vector<PanelRecord> records;
};

struct EntityTimeline {
  std::string entity_id;
  std::vector<PanelRecord> records;  // strictly ascending by period
};

PanelDataset parse_panel_csv(std::istream& source, const PanelSchema& schema);
PanelDataset read_panel_file(const std::string& path, const PanelSchema& schema);

/// Canonical CSV: schema column order, rows ordered by entity then period.
void write_panel_csv(std::ostream& out, const PanelDataset& dataset);

/// Groups records per entity, sorted by entity id then period.
/// Throws DuplicateObservation on a repeated (entity, period) pair.
std::vector<EntityTimeline> build_timelines(const PanelDataset& dataset);

enum class Severity { Info, Warning };

enum class FindingKind { PeriodGap, MultipleEvents, RecordsAfterEvent };

struct Finding {
  Severity severity;
  FindingKind kind;
  std::string message;
};

struct ValidationReport {
  std::string entity_id;
  std::vector<Finding> findings;

  bool has(FindingKind kind) const;
};

ValidationReport validate_timeline(const EntityTimeline& timeline);

std::string to_string(Severity severity);
std::string to_string(FindingKind kind);

}  // namespace leadframe
