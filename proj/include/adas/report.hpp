#pragma once

// Rendering of estimate and forecast reports, and resolution of the data
// directory the CLI reads from.

#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>

#include "adas/estimator.hpp"

namespace adas {

enum class OutputFormat { Table, Csv, Json };

std::optional<OutputFormat> parse_output_format(std::string_view text) noexcept;

/// Table format marks each row's cautions with footnote markers and lists them
/// below the table. CSV and JSON carry identical values.
void render_estimates(std::ostream& out, std::span<const PenetrationEstimate> rows, OutputFormat format);

void render_forecast(std::ostream& out, const ForecastReport& report, OutputFormat format);

/// A user data directory layered over the bundled one: a file present in the
/// user directory wins, otherwise the bundled copy is used.
class DataDirs {
 public:
  explicit DataDirs(std::optional<std::filesystem::path> user = std::nullopt,
                    std::filesystem::path bundled = default_bundled());

  /// Resolved path; throws DataError(SchemaError) naming both directories if
  /// neither has the file.
  std::filesystem::path resolve(std::string_view file) const;
  std::optional<std::filesystem::path> find(std::string_view file) const;

  /// <source>/data/bundled
  static std::filesystem::path default_bundled();

 private:
  std::optional<std::filesystem::path> user_;
  std::filesystem::path bundled_;
};

inline constexpr std::string_view kAdoptionFile = "adoption.csv";
inline constexpr std::string_view kFleetFile = "fleet.csv";
inline constexpr std::string_view kActivationFile = "activation.csv";
inline constexpr std::string_view kCatalogFile = "catalog.csv";
inline constexpr std::string_view kFarsFile = "fars_vehicles.csv";

struct LoadedInputs {
  EstimatorInputs inputs;
  Catalog catalog;
  std::size_t fars_warnings = 0;
};

/// Loads adoption, fleet, activation, catalog and crash-vehicle files. The
/// crash-vehicle file and catalog are optional; the rest are required.
LoadedInputs load_inputs(const DataDirs& dirs, const IngestOptions& options = {});

}  // namespace adas
