#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace adas {

/// The first six enumerators are the priority features reported in the
/// penetration table; the rest exist as analogs for lag matching.
enum class FeatureId : std::uint8_t {
  AdaptiveCruiseControl,
  AutomaticEmergencyBraking,
  ForwardCollisionPrevention,
  LaneCenteringAssist,
  LaneDeparturePrevention,
  PedestrianAutomaticEmergencyBraking,
  LaneDepartureWarning,
  RearParkingSensors,
  ElectronicStabilityControl,
  LaneKeepAssist,
};

inline constexpr std::size_t kFeatureCount = 10;
inline constexpr std::size_t kPriorityCount = 6;

inline constexpr std::array<FeatureId, kFeatureCount> kAllFeatures = {
    FeatureId::AdaptiveCruiseControl,     FeatureId::AutomaticEmergencyBraking,
    FeatureId::ForwardCollisionPrevention, FeatureId::LaneCenteringAssist,
    FeatureId::LaneDeparturePrevention,   FeatureId::PedestrianAutomaticEmergencyBraking,
    FeatureId::LaneDepartureWarning,      FeatureId::RearParkingSensors,
    FeatureId::ElectronicStabilityControl, FeatureId::LaneKeepAssist,
};

/// Priority features in report order.
inline constexpr std::span<const FeatureId, kPriorityCount> kPriorityFeatures{kAllFeatures.data(),
                                                                              kPriorityCount};

constexpr bool is_priority(FeatureId f) noexcept {
  return static_cast<std::size_t>(f) < kPriorityCount;
}

/// snake_case name used in every file format.
std::string_view to_string(FeatureId f) noexcept;
std::optional<FeatureId> parse_feature(std::string_view name) noexcept;
/// Human-readable name, e.g. "Adaptive cruise control".
std::string_view display_name(FeatureId f) noexcept;
/// Short code, e.g. "ACC".
std::string_view abbreviation(FeatureId f) noexcept;

enum class Availability : std::uint8_t { Unknown, Standard, Optional, NotAvailable };

/// "standard", "optional", "not_available", "unknown".
std::string_view to_string(Availability a) noexcept;
/// Accepts the catalog vocabulary (standard/optional/not_available) only.
std::optional<Availability> parse_availability(std::string_view text) noexcept;

constexpr bool is_offered(Availability a) noexcept {
  return a == Availability::Standard || a == Availability::Optional;
}

/// Dense FeatureId -> Availability map; absent entries read as Unknown.
class FeatureFlags {
 public:
  Availability operator[](FeatureId f) const noexcept { return flags_[static_cast<std::size_t>(f)]; }
  void set(FeatureId f, Availability a) noexcept { flags_[static_cast<std::size_t>(f)] = a; }
  bool empty() const noexcept;
  bool operator==(const FeatureFlags&) const = default;

 private:
  std::array<Availability, kFeatureCount> flags_{};
};

struct TrimAvailabilityRecord {
  std::string make;
  std::string model;
  int model_year = 0;
  FeatureId feature{};
  Availability availability = Availability::Unknown;

  bool operator==(const TrimAvailabilityRecord&) const = default;
};

struct MandateInfo {
  FeatureId feature;
  int announced_year;
  int effective_year;
};

/// Regulatory mandates known to distort analog adoption curves. ESC (FMVSS 126)
/// is listed as announced 2006 (the proposed rule); some sources give 2007.
std::span<const MandateInfo> bundled_mandates() noexcept;
std::optional<MandateInfo> mandate_for(FeatureId f) noexcept;

inline constexpr int kDefaultCoverageFloor = 2017;

/// Immutable make/model/year availability database mirroring vPIC ADAS records.
/// Make and model compare case-insensitively.
class Catalog {
 public:
  Catalog() = default;

  /// Throws DataError (SchemaError, DuplicateKey, BadEnumValue) with row numbers.
  static Catalog load(const std::filesystem::path& path, int coverage_floor = kDefaultCoverageFloor);
  static Catalog load(std::istream& in, int coverage_floor = kDefaultCoverageFloor);
  /// Throws DataError(DuplicateKey) on repeated keys.
  static Catalog from_records(std::vector<TrimAvailabilityRecord> records,
                              int coverage_floor = kDefaultCoverageFloor);

  /// Exact hit returns the stored value; a miss is Unknown below the coverage
  /// floor and NotAvailable at or above it.
  Availability lookup(std::string_view make, std::string_view model, int model_year,
                      FeatureId feature) const;

  std::size_t size() const noexcept { return index_.size(); }
  int coverage_floor() const noexcept { return coverage_floor_; }
  const std::vector<TrimAvailabilityRecord>& records() const noexcept { return records_; }

 private:
  using Key = std::tuple<std::string, std::string, int, FeatureId>;

  std::vector<TrimAvailabilityRecord> records_;
  std::map<Key, Availability> index_;
  int coverage_floor_ = kDefaultCoverageFloor;
};

}  // namespace adas
