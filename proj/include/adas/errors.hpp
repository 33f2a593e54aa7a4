#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace adas {

enum class DataErrc {
  SchemaError,
  DuplicateKey,
  BadEnumValue,
  FractionOutOfRange,
  NonContiguousYears,
  EmptyCohort,
};

const char* to_string(DataErrc code) noexcept;

/// Raised by catalog and dataset ingestion. `row()` is the 1-based physical
/// line in the source file when the problem is tied to one row.
class DataError : public std::runtime_error {
 public:
  DataError(DataErrc code, const std::string& message,
            std::optional<std::size_t> row = std::nullopt);

  DataErrc code() const noexcept { return code_; }
  std::optional<std::size_t> row() const noexcept { return row_; }

 private:
  DataErrc code_;
  std::optional<std::size_t> row_;
};

}  // namespace adas
