#pragma once

// Data-parallel inner loops. Each kernel has a serial reference and an OpenMP
// variant that must produce identical results; the public API uses the
// parallel one.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "adas/datasets.hpp"
#include "adas/feature_catalog.hpp"
#include "adas/vin.hpp"

namespace adas::kernels {

// -- crash-record counting ---------------------------------------------------

AvailabilityCounts count_availability_serial(std::span<const FarsVehicleRecord> records,
                                             FeatureId feature, int model_year);
AvailabilityCounts count_availability_parallel(std::span<const FarsVehicleRecord> records,
                                               FeatureId feature, int model_year);

/// Records where any of `features` is Standard or Optional.
std::size_t count_any_offered_serial(std::span<const FarsVehicleRecord> records,
                                     std::span<const FeatureId> features);
std::size_t count_any_offered_parallel(std::span<const FarsVehicleRecord> records,
                                       std::span<const FeatureId> features);

// -- VIN batch validation ----------------------------------------------------

enum class VinStatus : std::uint8_t { Valid, WrongLength, ForbiddenCharacter, CheckDigitMismatch };

std::vector<VinStatus> check_vins_serial(std::span<const std::string> vins);
std::vector<VinStatus> check_vins_parallel(std::span<const std::string> vins);

// -- lag-match distance grid -------------------------------------------------

/// Alignment of target(y) against candidate(y - lag) on combined availability.
struct LagCell {
  std::size_t candidate = 0;
  int lag = 0;
  int overlap = 0;
  std::int64_t sum_sq_bp = 0;       // sum of squared differences, basis points^2
  std::int64_t max_opt_diff_bp = 0;  // max |optional share difference|
  bool admissible = true;

  bool operator==(const LagCell&) const = default;
};

using LagFilter = std::function<bool(FeatureId analog, int lag)>;

/// Row-major grid: cell (c, lag) at index c * (max_lag + 1) + lag. Cells the
/// filter rejects are marked inadmissible but still filled.
std::vector<LagCell> lag_grid_serial(const AdoptionSeries& target,
                                     std::span<const AdoptionSeries> candidates, int max_lag,
                                     const LagFilter& filter = {});
std::vector<LagCell> lag_grid_parallel(const AdoptionSeries& target,
                                       std::span<const AdoptionSeries> candidates, int max_lag,
                                       const LagFilter& filter = {});

}  // namespace adas::kernels
