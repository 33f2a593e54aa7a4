#pragma once

// Fleet penetration estimation: lag-matching new-vehicle adoption curves
// against analog technologies, transferring the analog's fleet equipped rate
// across the lag, and composing equipped rates with activation rates.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "adas/datasets.hpp"
#include "adas/feature_catalog.hpp"
#include "adas/fraction.hpp"
#include "adas/kernels.hpp"

namespace adas {

enum class EstimationErrc { NoCandidateQualifies, YearNotInSeries, InsufficientData };

const char* to_string(EstimationErrc code) noexcept;

class EstimationError : public std::runtime_error {
 public:
  EstimationError(EstimationErrc code, const std::string& message,
                  std::optional<FeatureId> feature = std::nullopt);

  EstimationErrc code() const noexcept { return code_; }
  std::optional<FeatureId> feature() const noexcept { return feature_; }

 private:
  EstimationErrc code_;
  std::optional<FeatureId> feature_;
};

enum class CautionKind : std::uint8_t {
  AnalogUnderMandate,       // value: analog fleet year read
  LongLag,                  // value: lag in years
  OptionalShareDivergence,  // value: max |optional share difference|, basis points
  SmallOverlap,             // value: overlapping model years
};

struct CautionFlag {
  CautionKind kind;
  std::int64_t value;

  auto operator<=>(const CautionFlag&) const = default;
};

/// e.g. "long_lag(18y)", "analog_under_mandate(2009)".
std::string to_string(const CautionFlag& flag);
std::string_view caution_name(CautionKind kind) noexcept;

struct MatchConfig {
  int max_lag = 25;
  int min_overlap = 1;
  int long_lag_threshold = 8;               // LongLag when lag exceeds this
  std::int64_t optional_divergence_bp = 1500;  // OptionalShareDivergence above this
  int small_overlap_threshold = 3;          // SmallOverlap below this
};

struct LagMatch {
  FeatureId target{};
  FeatureId analog{};
  int lag_years = 0;
  /// Mean squared difference of combined availability, in fraction units.
  double distance = 0.0;
  int overlap_years = 0;
  std::int64_t sum_sq_bp = 0;
  std::vector<CautionFlag> cautions;

  bool has(CautionKind kind) const noexcept;
  bool operator==(const LagMatch&) const = default;
};

/// Aligns target(y) with candidate(y - lag) for every candidate and every lag
/// in [0, max_lag] the filter admits; returns the pair with the smallest mean
/// squared difference of combined availability among those with at least
/// min_overlap overlapping years. Ties go to the smaller lag, then the earlier
/// candidate. Throws EstimationError(NoCandidateQualifies).
LagMatch match_lag(const AdoptionSeries& target, std::span<const AdoptionSeries> candidates,
                   const MatchConfig& config = {}, const kernels::LagFilter& filter = {});

struct Transfer {
  Fraction rate;
  int analog_year = 0;
  std::vector<CautionFlag> cautions;  // the match's cautions plus any mandate flag
};

/// Reads the analog's fleet rate at target_year - lag. Throws
/// EstimationError(YearNotInSeries).
Transfer transfer_fleet_rate(const LagMatch& match, const FleetSeries& analog_fleet, int target_year);

enum class ProvenanceKind : std::uint8_t { DirectFleetSeries, LagTransfer, FarsLagTransfer };

struct Provenance {
  ProvenanceKind kind = ProvenanceKind::DirectFleetSeries;
  std::optional<FeatureId> analog;
  int lag_years = 0;

  bool operator==(const Provenance&) const = default;
};

std::string_view to_string(ProvenanceKind kind) noexcept;
/// e.g. "direct", "lag_transfer(LDW,2)", "fars_lag_transfer(ESC,18)".
std::string to_string(const Provenance& p);

struct EstimatorConfig {
  MatchConfig match;
  /// The crash-data route uses vehicles of model year (target year - offset).
  int fars_model_year_offset = 1;
};

struct EstimatorInputs {
  FleetSet fleet;
  AdoptionSet adoption;
  std::vector<FarsVehicleRecord> fars;
  ActivationTable activation;
};

struct EquippedEstimate {
  Fraction equipped;
  Provenance provenance;
  std::vector<CautionFlag> cautions;
  std::optional<LagMatch> match;
};

/// Resolution order: the feature's own fleet series at `year`; a lag transfer
/// from its adoption series; a lag transfer from crash-vehicle availability.
/// Analog candidates are the other features with both adoption and fleet
/// series, admitted only at lags whose fleet year exists. Throws
/// EstimationError(InsufficientData).
EquippedEstimate estimate_equipped(FeatureId feature, int year, const FleetSet& fleet,
                                   const AdoptionSet& adoption,
                                   std::span<const FarsVehicleRecord> fars,
                                   const EstimatorConfig& config = {});

struct PercentTriple {
  int equipped_pct = 0;
  int activation_pct = 0;
  int activated_of_fleet_pct = 0;

  bool operator==(const PercentTriple&) const = default;
};

/// Both inputs are rounded half-up to integer percent first; the activated
/// share is then round_half_up(equipped_pct * activation_pct / 100).
PercentTriple compose_activated(Fraction equipped, Fraction activation);

struct PenetrationEstimate {
  FeatureId feature{};
  int year = 0;
  int equipped_pct = 0;
  int activation_pct = 0;
  int activated_of_fleet_pct = 0;
  Provenance equipped_provenance;
  ActivationSource activation_source = ActivationSource::Observed;
  std::optional<FeatureId> activation_donor;
  std::vector<CautionFlag> cautions;

  bool operator==(const PenetrationEstimate&) const = default;
};

/// One row per priority feature in report order.
std::vector<PenetrationEstimate> estimate_table(int year, const EstimatorInputs& inputs,
                                                const EstimatorConfig& config = {});

struct ForecastRow {
  FeatureId feature{};
  Fraction predicted;
  Fraction estimated;
  double error_pp = 0.0;  // predicted - estimated, percentage points
};

struct ForecastReport {
  int year = 0;
  std::vector<ForecastRow> rows;
  double mean_absolute_error_pp = 0.0;
};

/// predicted - estimated at `year`, in percentage points.
double forecast_error(const FleetSeries& predicted, const FleetSeries& estimated, int year);
/// Every feature in either set must be present in both and contain `year`.
ForecastReport forecast_error(const FleetSet& predicted, const FleetSet& estimated, int year);

struct AnyFeatureShare {
  std::size_t count = 0;
  std::size_t total = 0;
  double fraction = 0.0;
};

/// Records with any listed feature Standard or Optional, over all records
/// (Unknown included in the denominator). Throws DataError(EmptyCohort).
AnyFeatureShare fleet_any_feature_share(std::span<const FarsVehicleRecord> records,
                                        std::span<const FeatureId> features);

}  // namespace adas
