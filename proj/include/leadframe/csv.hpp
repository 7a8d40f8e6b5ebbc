#pragma once

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace leadframe::csv {

using Row = std::vector<std::string>;

/// Streaming RFC 4180 reader. Accepts LF or CRLF line endings and quoted
/// fields (embedded commas, doubled quotes, embedded newlines). A leading
/// UTF-8 byte-order mark on the first line is skipped.
class Reader {
public:
  explicit Reader(std::istream& in) : in_(in) {}

  /// Next record, or nullopt at end of input. Blank lines are skipped.
  std::optional<Row> next();

  /// 1-based physical line number where the last returned record started.
  std::size_t line() const noexcept { return record_line_; }

private:
  std::istream& in_;
  std::size_t line_ = 0;
  std::size_t record_line_ = 0;
  bool first_ = true;
};

std::string quote_if_needed(std::string_view field);

void write_row(std::ostream& out, const Row& row);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_number(double value);

/// Strict full-string decimal parse; nullopt on any trailing garbage.
std::optional<double> parse_number(std::string_view text);

}  // namespace leadframe::csv
