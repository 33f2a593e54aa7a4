#include "adas/csv.hpp"

#include <algorithm>
#include <fstream>

#include "adas/errors.hpp"

namespace adas {

const char* to_string(DataErrc code) noexcept {
  switch (code) {
    case DataErrc::SchemaError: return "SchemaError";
    case DataErrc::DuplicateKey: return "DuplicateKey";
    case DataErrc::BadEnumValue: return "BadEnumValue";
    case DataErrc::FractionOutOfRange: return "FractionOutOfRange";
    case DataErrc::NonContiguousYears: return "NonContiguousYears";
    case DataErrc::EmptyCohort: return "EmptyCohort";
  }
  return "unknown";
}

namespace {

std::string with_row(const std::string& message, std::optional<std::size_t> row) {
  return row ? "line " + std::to_string(*row) + ": " + message : message;
}

}  // namespace

DataError::DataError(DataErrc code, const std::string& message, std::optional<std::size_t> row)
    : std::runtime_error(with_row(message, row)), code_(code), row_(row) {}

namespace csv {

std::string_view trim(std::string_view s) noexcept {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

int Table::column(std::string_view name) const noexcept {
  const auto it = std::find(header.begin(), header.end(), name);
  return it == header.end() ? -1 : static_cast<int>(it - header.begin());
}

std::size_t Table::require_column(std::string_view name, std::string_view source) const {
  const int idx = column(name);
  if (idx < 0) {
    throw DataError(DataErrc::SchemaError,
                    std::string(source) + ": missing required column '" + std::string(name) + "'");
  }
  return static_cast<std::size_t>(idx);
}

namespace {

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.emplace_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

Table read(std::istream& in, std::string_view source) {
  Table table;
  bool have_header = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto content = trim(line);
    if (content.empty() || content.front() == '#') continue;
    if (content.find('"') != std::string_view::npos) {
      throw DataError(DataErrc::SchemaError, "quoted fields are not supported", lineno);
    }
    auto fields = split(content);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw DataError(DataErrc::SchemaError,
                      "expected " + std::to_string(table.header.size()) + " fields, got " +
                          std::to_string(fields.size()),
                      lineno);
    }
    table.rows.push_back({lineno, std::move(fields)});
  }
  if (!have_header) {
    throw DataError(DataErrc::SchemaError, std::string(source) + ": missing header row");
  }
  return table;
}

Table read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError(DataErrc::SchemaError, "cannot open " + path.string());
  }
  return read(in, path.string());
}

}  // namespace csv
}  // namespace adas
