#pragma once

// Minimal reader for the project's comma-separated schemas. Quoting is not
// part of any schema: a '"' anywhere is a SchemaError.

#include <cstddef>
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace adas::csv {

struct Row {
  std::size_t line = 0;  // 1-based physical line number
  std::vector<std::string> fields;
};

struct Table {
  std::vector<std::string> header;
  std::vector<Row> rows;

  /// Index of a header column, or -1.
  int column(std::string_view name) const noexcept;
  /// Index of a header column; throws SchemaError naming `source` if absent.
  std::size_t require_column(std::string_view name, std::string_view source) const;
};

/// Blank lines and lines whose first non-space character is '#' are skipped.
/// Every data row must have exactly as many fields as the header.
Table read(std::istream& in, std::string_view source = "<stream>");
Table read_file(const std::filesystem::path& path);

std::string_view trim(std::string_view s) noexcept;

}  // namespace adas::csv
