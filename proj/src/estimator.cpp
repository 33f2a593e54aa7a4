#include "adas/estimator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "adas/errors.hpp"

namespace adas {

const char* to_string(EstimationErrc code) noexcept {
  switch (code) {
    case EstimationErrc::NoCandidateQualifies: return "NoCandidateQualifies";
    case EstimationErrc::YearNotInSeries: return "YearNotInSeries";
    case EstimationErrc::InsufficientData: return "InsufficientData";
  }
  return "unknown";
}

EstimationError::EstimationError(EstimationErrc code, const std::string& message,
                                 std::optional<FeatureId> feature)
    : std::runtime_error(message), code_(code), feature_(feature) {}

std::string_view caution_name(CautionKind kind) noexcept {
  switch (kind) {
    case CautionKind::AnalogUnderMandate: return "analog_under_mandate";
    case CautionKind::LongLag: return "long_lag";
    case CautionKind::OptionalShareDivergence: return "optional_share_divergence";
    case CautionKind::SmallOverlap: return "small_overlap";
  }
  return "unknown";
}

std::string to_string(const CautionFlag& flag) {
  std::string out(caution_name(flag.kind));
  switch (flag.kind) {
    case CautionKind::AnalogUnderMandate:
      return out + "(" + std::to_string(flag.value) + ")";
    case CautionKind::LongLag:
    case CautionKind::SmallOverlap:
      return out + "(" + std::to_string(flag.value) + "y)";
    case CautionKind::OptionalShareDivergence: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "(%.1fpp)", static_cast<double>(flag.value) / 100.0);
      return out + buf;
    }
  }
  return out;
}

bool LagMatch::has(CautionKind kind) const noexcept {
  return std::any_of(cautions.begin(), cautions.end(),
                     [kind](const CautionFlag& c) { return c.kind == kind; });
}

// -- lag matching --------------------------------------------------------------

LagMatch match_lag(const AdoptionSeries& target, std::span<const AdoptionSeries> candidates,
                   const MatchConfig& config, const kernels::LagFilter& filter) {
  if (target.points.empty()) {
    throw std::invalid_argument("match_lag: target series is empty");
  }
  if (candidates.empty() || config.max_lag < 0) {
    throw EstimationError(EstimationErrc::NoCandidateQualifies,
                          "no analog candidates for " + std::string(to_string(target.feature)),
                          target.feature);
  }

  const auto grid = kernels::lag_grid_parallel(target, candidates, config.max_lag, filter);

  // Equal distances: smaller lag wins, then the earlier candidate (grid order).
  const kernels::LagCell* best = nullptr;
  const int min_overlap = std::max(config.min_overlap, 1);
  for (const auto& cell : grid) {
    if (!cell.admissible || cell.overlap < min_overlap) continue;
    if (!best) {
      best = &cell;
      continue;
    }
    // sum/overlap compared exactly by cross-multiplication.
    const std::int64_t lhs = cell.sum_sq_bp * best->overlap;
    const std::int64_t rhs = best->sum_sq_bp * cell.overlap;
    if (lhs < rhs || (lhs == rhs && cell.lag < best->lag)) best = &cell;
  }
  if (!best) {
    throw EstimationError(EstimationErrc::NoCandidateQualifies,
                          "no analog meets the overlap minimum for " +
                              std::string(to_string(target.feature)),
                          target.feature);
  }

  LagMatch m;
  m.target = target.feature;
  m.analog = candidates[best->candidate].feature;
  m.lag_years = best->lag;
  m.overlap_years = best->overlap;
  m.sum_sq_bp = best->sum_sq_bp;
  m.distance = static_cast<double>(best->sum_sq_bp) / best->overlap /
               static_cast<double>(Fraction::kScale * Fraction::kScale);
  if (best->lag > config.long_lag_threshold) {
    m.cautions.push_back({CautionKind::LongLag, best->lag});
  }
  if (best->max_opt_diff_bp > config.optional_divergence_bp) {
    m.cautions.push_back({CautionKind::OptionalShareDivergence, best->max_opt_diff_bp});
  }
  if (best->overlap < config.small_overlap_threshold) {
    m.cautions.push_back({CautionKind::SmallOverlap, best->overlap});
  }
  return m;
}

Transfer transfer_fleet_rate(const LagMatch& match, const FleetSeries& analog_fleet, int target_year) {
  const int analog_year = target_year - match.lag_years;
  const auto rate = analog_fleet.at(analog_year);
  if (!rate) {
    throw EstimationError(EstimationErrc::YearNotInSeries,
                          std::string(to_string(analog_fleet.feature)) + " fleet series has no " +
                              std::to_string(analog_year),
                          analog_fleet.feature);
  }
  Transfer t{*rate, analog_year, match.cautions};
  if (const auto mandate = mandate_for(match.analog); mandate && analog_year >= mandate->announced_year) {
    t.cautions.push_back({CautionKind::AnalogUnderMandate, analog_year});
  }
  std::sort(t.cautions.begin(), t.cautions.end());
  return t;
}

// -- equipped-rate resolution --------------------------------------------------

std::string_view to_string(ProvenanceKind kind) noexcept {
  switch (kind) {
    case ProvenanceKind::DirectFleetSeries: return "direct";
    case ProvenanceKind::LagTransfer: return "lag_transfer";
    case ProvenanceKind::FarsLagTransfer: return "fars_lag_transfer";
  }
  return "unknown";
}

std::string to_string(const Provenance& p) {
  std::string out(to_string(p.kind));
  if (p.analog) {
    out += "(" + std::string(abbreviation(*p.analog)) + "," + std::to_string(p.lag_years) + ")";
  }
  return out;
}

namespace {

struct AnalogPool {
  std::vector<AdoptionSeries> candidates;
  kernels::LagFilter filter;
};

AnalogPool analog_pool(FeatureId target, int year, const FleetSet& fleet, const AdoptionSet& adoption) {
  AnalogPool pool;
  for (const auto& [feature, series] : adoption) {
    if (feature == target || !fleet.contains(feature) || series.points.empty()) continue;
    pool.candidates.push_back(series);
  }
  pool.filter = [&fleet, year](FeatureId analog, int lag) {
    const auto it = fleet.find(analog);
    return it != fleet.end() && it->second.at(year - lag).has_value();
  };
  return pool;
}

std::optional<EquippedEstimate> try_transfer(const AdoptionSeries& target, int year,
                                             const FleetSet& fleet, const AdoptionSet& adoption,
                                             const MatchConfig& config, ProvenanceKind kind) {
  const auto pool = analog_pool(target.feature, year, fleet, adoption);
  if (pool.candidates.empty()) return std::nullopt;
  LagMatch match;
  try {
    match = match_lag(target, pool.candidates, config, pool.filter);
  } catch (const EstimationError& e) {
    if (e.code() == EstimationErrc::NoCandidateQualifies) return std::nullopt;
    throw;
  }
  auto transfer = transfer_fleet_rate(match, fleet.at(match.analog), year);
  return EquippedEstimate{transfer.rate, Provenance{kind, match.analog, match.lag_years},
                          std::move(transfer.cautions), std::move(match)};
}

}  // namespace

EquippedEstimate estimate_equipped(FeatureId feature, int year, const FleetSet& fleet,
                                   const AdoptionSet& adoption,
                                   std::span<const FarsVehicleRecord> fars,
                                   const EstimatorConfig& config) {
  if (const auto it = fleet.find(feature); it != fleet.end()) {
    if (const auto rate = it->second.at(year)) {
      return EquippedEstimate{*rate, Provenance{}, {}, std::nullopt};
    }
  }

  if (const auto it = adoption.find(feature); it != adoption.end() && !it->second.points.empty()) {
    if (auto est = try_transfer(it->second, year, fleet, adoption, config.match,
                                ProvenanceKind::LagTransfer)) {
      return std::move(*est);
    }
  }

  const int cohort_year = year - config.fars_model_year_offset;
  const std::array<FeatureId, 1> only{feature};
  const auto fars_series = fars_adoption_series(fars, only, cohort_year);
  if (const auto it = fars_series.find(feature); it != fars_series.end()) {
    if (auto est = try_transfer(it->second, year, fleet, adoption, config.match,
                                ProvenanceKind::FarsLagTransfer)) {
      return std::move(*est);
    }
  }

  throw EstimationError(
      EstimationErrc::InsufficientData,
      std::string(to_string(feature)) + ": no fleet series covering " + std::to_string(year) +
          ", no transferable analog match from adoption data, and no usable crash-vehicle cohort "
          "for model year " + std::to_string(cohort_year) +
          " (add fleet.csv/adoption.csv rows or a FARS extract)",
      feature);
}

PercentTriple compose_activated(Fraction equipped, Fraction activation) {
  const int e = equipped.percent_half_up();
  const int a = activation.percent_half_up();
  return {e, a, static_cast<int>(div_round_half_up(static_cast<std::int64_t>(e) * a, 100))};
}

std::vector<PenetrationEstimate> estimate_table(int year, const EstimatorInputs& inputs,
                                                const EstimatorConfig& config) {
  std::vector<PenetrationEstimate> rows;
  rows.reserve(kPriorityCount);
  for (const auto feature : kPriorityFeatures) {
    auto equipped = estimate_equipped(feature, year, inputs.fleet, inputs.adoption, inputs.fars, config);
    const auto* activation = inputs.activation.find(feature);
    if (!activation) {
      throw EstimationError(EstimationErrc::InsufficientData,
                            std::string(to_string(feature)) +
                                ": no activation rate (add a row to activation.csv)",
                            feature);
    }
    const auto pct = compose_activated(equipped.equipped, activation->rate);
    rows.push_back(PenetrationEstimate{feature, year, pct.equipped_pct, pct.activation_pct,
                                       pct.activated_of_fleet_pct, equipped.provenance,
                                       activation->source, activation->donor,
                                       std::move(equipped.cautions)});
  }
  return rows;
}

// -- forecast error and any-feature share ---------------------------------------

double forecast_error(const FleetSeries& predicted, const FleetSeries& estimated, int year) {
  const auto p = predicted.at(year);
  const auto e = estimated.at(year);
  if (!p || !e) {
    const auto& missing = p ? estimated : predicted;
    throw EstimationError(EstimationErrc::YearNotInSeries,
                          std::string(to_string(missing.feature)) + " series has no " +
                              std::to_string(year),
                          missing.feature);
  }
  return static_cast<double>(p->basis_points() - e->basis_points()) / 100.0;
}

ForecastReport forecast_error(const FleetSet& predicted, const FleetSet& estimated, int year) {
  ForecastReport report;
  report.year = year;
  auto require = [year](const FleetSet& set, FeatureId f, const char* which) -> const FleetSeries& {
    const auto it = set.find(f);
    if (it == set.end() || !it->second.at(year)) {
      throw EstimationError(EstimationErrc::YearNotInSeries,
                            std::string(which) + " data has no " + std::string(to_string(f)) +
                                " value for " + std::to_string(year),
                            f);
    }
    return it->second;
  };
  for (const auto f : kAllFeatures) {
    if (!predicted.contains(f) && !estimated.contains(f)) continue;
    const auto& p = require(predicted, f, "predicted");
    const auto& e = require(estimated, f, "estimated");
    report.rows.push_back({f, *p.at(year), *e.at(year), forecast_error(p, e, year)});
  }
  if (!report.rows.empty()) {
    double total = 0.0;
    for (const auto& r : report.rows) total += std::abs(r.error_pp);
    report.mean_absolute_error_pp = total / static_cast<double>(report.rows.size());
  }
  return report;
}

AnyFeatureShare fleet_any_feature_share(std::span<const FarsVehicleRecord> records,
                                        std::span<const FeatureId> features) {
  if (records.empty()) {
    throw DataError(DataErrc::EmptyCohort, "no crash-vehicle records");
  }
  AnyFeatureShare share;
  share.total = records.size();
  share.count = kernels::count_any_offered_parallel(records, features);
  share.fraction = static_cast<double>(share.count) / static_cast<double>(share.total);
  return share;
}

}  // namespace adas
