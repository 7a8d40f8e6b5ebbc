#include "leadframe/csv.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include "leadframe/errors.hpp"

namespace leadframe {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Io: return "Io";
    case ErrorKind::MissingColumn: return "MissingColumn";
    case ErrorKind::BadValue: return "BadValue";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::DuplicateObservation: return "DuplicateObservation";
    case ErrorKind::UnknownColumn: return "UnknownColumn";
    case ErrorKind::DegenerateLabels: return "DegenerateLabels";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::TooFewEntities: return "TooFewEntities";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

bool is_input_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Io:
    case ErrorKind::MissingColumn:
    case ErrorKind::BadValue:
    case ErrorKind::EmptyInput:
      return true;
    default:
      return false;
  }
}

namespace csv {

std::optional<Row> Reader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    if (first_) {
      first_ = false;
      if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    record_line_ = line_;
    Row row;
    std::string field;
    bool quoted = false;
    std::size_t i = 0;
    while (true) {
      if (i == line.size()) {
        if (quoted) {
          // Quoted field spans a newline.
          std::string more;
          if (!std::getline(in_, more)) {
            throw Error(ErrorKind::BadValue,
                        "line " + std::to_string(record_line_) + ": unterminated quoted field");
          }
          ++line_;
          if (!more.empty() && more.back() == '\r') more.pop_back();
          field += '\n';
          line = std::move(more);
          i = 0;
          continue;
        }
        break;
      }
      const char c = line[i];
      if (quoted) {
        if (c == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            field += '"';
            ++i;
          } else {
            quoted = false;
          }
        } else {
          field += c;
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        row.push_back(std::move(field));
        field.clear();
      } else {
        field += c;
      }
      ++i;
    }
    row.push_back(std::move(field));
    return row;
  }
  return std::nullopt;
}

std::string quote_if_needed(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_row(std::ostream& out, const Row& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out << ',';
    out << quote_if_needed(row[i]);
  }
  out << '\n';
}

std::string format_number(double value) {
  if (value == 0.0) return "0";  // folds -0
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw Error(ErrorKind::BadValue, "cannot format number");
  return std::string(buf, end);
}

std::optional<double> parse_number(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

}  // namespace csv
}  // namespace leadframe
