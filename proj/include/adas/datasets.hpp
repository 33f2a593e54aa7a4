#pragma once

// Ingestion and validation of the estimator's statistical inputs: new-vehicle
// adoption series, fleet equipped series, activation rates, and crash-vehicle
// (FARS) extracts.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adas/feature_catalog.hpp"
#include "adas/fraction.hpp"

namespace adas {

struct AdoptionPoint {
  Fraction standard;
  Fraction optional;

  Fraction combined() const noexcept { return standard + optional; }
  bool operator==(const AdoptionPoint&) const = default;
};

/// New-vehicle availability by model year.
struct AdoptionSeries {
  FeatureId feature{};
  std::map<int, AdoptionPoint> points;

  const AdoptionPoint* at(int model_year) const noexcept;
  bool operator==(const AdoptionSeries&) const = default;
};

/// Fraction of the registered fleet equipped, by calendar year.
struct FleetSeries {
  FeatureId feature{};
  std::map<int, Fraction> points;

  std::optional<Fraction> at(int calendar_year) const noexcept;
  bool operator==(const FleetSeries&) const = default;
};

using AdoptionSet = std::map<FeatureId, AdoptionSeries>;
using FleetSet = std::map<FeatureId, FleetSeries>;

enum class ActivationSource { Observed, AssumedFromSimilar };

std::string_view to_string(ActivationSource s) noexcept;

struct ActivationEntry {
  Fraction rate;
  ActivationSource source = ActivationSource::Observed;
  std::optional<FeatureId> donor;  // set iff source == AssumedFromSimilar

  bool operator==(const ActivationEntry&) const = default;
};

class ActivationTable {
 public:
  const ActivationEntry* find(FeatureId f) const noexcept;
  void set(FeatureId f, ActivationEntry entry) { entries_[f] = entry; }
  void erase(FeatureId f) { entries_.erase(f); }
  const std::map<FeatureId, ActivationEntry>& entries() const noexcept { return entries_; }
  bool operator==(const ActivationTable&) const = default;

 private:
  std::map<FeatureId, ActivationEntry> entries_;
};

struct IngestOptions {
  /// Reject series with missing interior years (NonContiguousYears). Off by
  /// default because published analog data is often sparse; years are only
  /// ever read exactly, never interpolated.
  bool require_contiguous = false;
};

/// Schema `feature,model_year,std_frac,opt_frac`. Throws DataError
/// (SchemaError, BadEnumValue, DuplicateKey, FractionOutOfRange,
/// NonContiguousYears) naming the offending line.
AdoptionSet ingest_adoption_csv(std::istream& in, const IngestOptions& options = {});
AdoptionSet ingest_adoption_csv(const std::filesystem::path& path, const IngestOptions& options = {});

/// Schema `feature,calendar_year,equipped_frac`.
FleetSet ingest_fleet_csv(std::istream& in, const IngestOptions& options = {});
FleetSet ingest_fleet_csv(const std::filesystem::path& path, const IngestOptions& options = {});

/// Schema `feature,rate,source,donor`; source is observed|assumed_from_similar,
/// donor is required for assumed rows and must be empty otherwise.
ActivationTable ingest_activation_csv(std::istream& in);
ActivationTable ingest_activation_csv(const std::filesystem::path& path);

void write_adoption_csv(std::ostream& out, const AdoptionSet& set);
void write_fleet_csv(std::ostream& out, const FleetSet& set);
void write_activation_csv(std::ostream& out, const ActivationTable& table);

struct FarsVehicleRecord {
  std::string vin;
  int crash_year = 0;
  std::optional<int> model_year;
  FeatureFlags feature_flags;  // empty when the vehicle could not be resolved

  bool operator==(const FarsVehicleRecord&) const = default;
};

/// Make/model/year for a VIN from an external decoder (e.g. vPIC records).
struct VehicleIdentity {
  std::string make;
  std::string model;
  int model_year = 0;
};
using VehicleResolver = std::function<std::optional<VehicleIdentity>(std::string_view vin)>;

struct FarsIngestResult {
  std::vector<FarsVehicleRecord> records;
  std::size_t input_rows = 0;
  std::size_t warning_rows = 0;  // rows kept with a problem
  std::vector<std::string> warnings;
};

/// Schema `vin,crash_year` plus optional `make,model,model_year` overrides.
/// VINs are parsed leniently; row-level problems become warnings and the row
/// is retained. Only a schema problem throws.
FarsIngestResult ingest_fars_csv(std::istream& in, const Catalog& catalog,
                                 const VehicleResolver& resolver = {});
FarsIngestResult ingest_fars_csv(const std::filesystem::path& path, const Catalog& catalog,
                                 const VehicleResolver& resolver = {});

struct AvailabilityCounts {
  std::size_t standard = 0;
  std::size_t optional = 0;
  std::size_t not_available = 0;
  std::size_t unknown = 0;

  /// Denominator: Unknown is excluded.
  std::size_t known() const noexcept { return standard + optional + not_available; }
  bool operator==(const AvailabilityCounts&) const = default;
};

struct FarsFraction {
  AvailabilityCounts counts;

  std::size_t n() const noexcept { return counts.known(); }
  double std_frac() const noexcept;
  double opt_frac() const noexcept;
  /// Both shares rounded half-up to basis points, for lag matching.
  AdoptionPoint as_adoption_point() const;
};

/// Standard/optional shares among crash vehicles of one model year. Throws
/// DataError(EmptyCohort) when no record of that year has a known flag.
FarsFraction fars_availability_fraction(std::span<const FarsVehicleRecord> records, FeatureId feature,
                                        int model_year);

/// One single-point series per feature with a non-empty cohort at model_year.
AdoptionSet fars_adoption_series(std::span<const FarsVehicleRecord> records,
                                 std::span<const FeatureId> features, int model_year);

}  // namespace adas
