#include "adas/feature_catalog.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>

#include "adas/csv.hpp"
#include "adas/errors.hpp"

namespace adas {

namespace {

struct FeatureNames {
  FeatureId id;
  std::string_view snake;
  std::string_view display;
  std::string_view abbrev;
};

constexpr std::array<FeatureNames, kFeatureCount> kNames = {{
    {FeatureId::AdaptiveCruiseControl, "adaptive_cruise_control", "Adaptive cruise control", "ACC"},
    {FeatureId::AutomaticEmergencyBraking, "automatic_emergency_braking",
     "Automatic emergency braking", "AEB"},
    {FeatureId::ForwardCollisionPrevention, "forward_collision_prevention",
     "Forward collision prevention", "FCP"},
    {FeatureId::LaneCenteringAssist, "lane_centering_assist", "Lane centering assist", "LCA"},
    {FeatureId::LaneDeparturePrevention, "lane_departure_prevention", "Lane departure prevention",
     "LDP"},
    {FeatureId::PedestrianAutomaticEmergencyBraking, "pedestrian_automatic_emergency_braking",
     "Pedestrian automatic emergency braking", "PAEB"},
    {FeatureId::LaneDepartureWarning, "lane_departure_warning", "Lane departure warning", "LDW"},
    {FeatureId::RearParkingSensors, "rear_parking_sensors", "Rear parking sensors", "RPS"},
    {FeatureId::ElectronicStabilityControl, "electronic_stability_control",
     "Electronic stability control", "ESC"},
    {FeatureId::LaneKeepAssist, "lane_keep_assist", "Lane keep assist", "LKA"},
}};

constexpr std::array<MandateInfo, 1> kMandates = {{
    {FeatureId::ElectronicStabilityControl, 2006, 2012},
}};

const FeatureNames& names(FeatureId f) noexcept { return kNames[static_cast<std::size_t>(f)]; }

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::string_view to_string(FeatureId f) noexcept { return names(f).snake; }
std::string_view display_name(FeatureId f) noexcept { return names(f).display; }
std::string_view abbreviation(FeatureId f) noexcept { return names(f).abbrev; }

std::optional<FeatureId> parse_feature(std::string_view name) noexcept {
  for (const auto& n : kNames) {
    if (n.snake == name) return n.id;
  }
  return std::nullopt;
}

std::string_view to_string(Availability a) noexcept {
  switch (a) {
    case Availability::Standard: return "standard";
    case Availability::Optional: return "optional";
    case Availability::NotAvailable: return "not_available";
    case Availability::Unknown: return "unknown";
  }
  return "unknown";
}

std::optional<Availability> parse_availability(std::string_view text) noexcept {
  if (text == "standard") return Availability::Standard;
  if (text == "optional") return Availability::Optional;
  if (text == "not_available") return Availability::NotAvailable;
  return std::nullopt;
}

bool FeatureFlags::empty() const noexcept {
  return std::all_of(flags_.begin(), flags_.end(),
                     [](Availability a) { return a == Availability::Unknown; });
}

std::span<const MandateInfo> bundled_mandates() noexcept { return kMandates; }

std::optional<MandateInfo> mandate_for(FeatureId f) noexcept {
  for (const auto& m : kMandates) {
    if (m.feature == f) return m;
  }
  return std::nullopt;
}

Catalog Catalog::from_records(std::vector<TrimAvailabilityRecord> records, int coverage_floor) {
  Catalog cat;
  cat.coverage_floor_ = coverage_floor;
  for (const auto& r : records) {
    Key key{upper(r.make), upper(r.model), r.model_year, r.feature};
    if (!cat.index_.emplace(std::move(key), r.availability).second) {
      throw DataError(DataErrc::DuplicateKey, "duplicate catalog key (" + r.make + ", " + r.model +
                                                  ", " + std::to_string(r.model_year) + ", " +
                                                  std::string(to_string(r.feature)) + ")");
    }
  }
  cat.records_ = std::move(records);
  return cat;
}

Catalog Catalog::load(std::istream& in, int coverage_floor) {
  const auto table = csv::read(in, "catalog");
  const auto c_make = table.require_column("make", "catalog");
  const auto c_model = table.require_column("model", "catalog");
  const auto c_year = table.require_column("model_year", "catalog");
  const auto c_feature = table.require_column("feature", "catalog");
  const auto c_avail = table.require_column("availability", "catalog");

  Catalog cat;
  cat.coverage_floor_ = coverage_floor;
  for (const auto& row : table.rows) {
    const auto& f = row.fields;
    TrimAvailabilityRecord rec;
    rec.make = f[c_make];
    rec.model = f[c_model];
    if (rec.make.empty() || rec.model.empty()) {
      throw DataError(DataErrc::SchemaError, "make and model must be non-empty", row.line);
    }
    const auto& year_text = f[c_year];
    auto [ptr, ec] = std::from_chars(year_text.data(), year_text.data() + year_text.size(), rec.model_year);
    if (ec != std::errc{} || ptr != year_text.data() + year_text.size() || rec.model_year < 1980) {
      throw DataError(DataErrc::SchemaError, "bad model_year '" + year_text + "'", row.line);
    }
    const auto feature = parse_feature(f[c_feature]);
    if (!feature) {
      throw DataError(DataErrc::BadEnumValue, "unknown feature '" + f[c_feature] + "'", row.line);
    }
    rec.feature = *feature;
    const auto avail = parse_availability(f[c_avail]);
    if (!avail) {
      throw DataError(DataErrc::BadEnumValue, "bad availability '" + f[c_avail] + "'", row.line);
    }
    rec.availability = *avail;

    Key key{upper(rec.make), upper(rec.model), rec.model_year, rec.feature};
    if (!cat.index_.emplace(std::move(key), rec.availability).second) {
      throw DataError(DataErrc::DuplicateKey, "duplicate (make, model, model_year, feature)", row.line);
    }
    cat.records_.push_back(std::move(rec));
  }
  return cat;
}

Catalog Catalog::load(const std::filesystem::path& path, int coverage_floor) {
  std::ifstream in(path);
  if (!in) throw DataError(DataErrc::SchemaError, "cannot open " + path.string());
  return load(in, coverage_floor);
}

Availability Catalog::lookup(std::string_view make, std::string_view model, int model_year,
                             FeatureId feature) const {
  const auto it = index_.find(Key{upper(make), upper(model), model_year, feature});
  if (it != index_.end()) return it->second;
  return model_year < coverage_floor_ ? Availability::Unknown : Availability::NotAvailable;
}

}  // namespace adas
