#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace leadframe {

enum class ErrorKind {
  Io,
  MissingColumn,
  BadValue,
  EmptyInput,
  DuplicateObservation,
  UnknownColumn,
  DegenerateLabels,
  DimensionMismatch,
  TooFewEntities,
  InvalidConfig,
};

std::string_view to_string(ErrorKind kind);

// Parse and I/O failures map to exit status 2 in the CLI, everything else to 1.
bool is_input_error(ErrorKind kind);

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

}  // namespace leadframe
