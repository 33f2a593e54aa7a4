#include "adas/kernels.hpp"

#include <omp.h>

#include <cstdlib>

namespace adas::kernels {

namespace {

void tally(AvailabilityCounts& c, Availability a) noexcept {
  switch (a) {
    case Availability::Standard: ++c.standard; break;
    case Availability::Optional: ++c.optional; break;
    case Availability::NotAvailable: ++c.not_available; break;
    case Availability::Unknown: ++c.unknown; break;
  }
}

bool any_offered(const FarsVehicleRecord& r, std::span<const FeatureId> features) noexcept {
  for (const auto f : features) {
    if (is_offered(r.feature_flags[f])) return true;
  }
  return false;
}

// Same outcome as a strict parse_vin, without the exception cost per invalid VIN.
VinStatus check_one(const std::string& text) noexcept {
  if (text.size() != kVinLength) return VinStatus::WrongLength;
  char upper[kVinLength];
  for (std::size_t i = 0; i < kVinLength; ++i) {
    const char c = text[i];
    upper[i] = c >= 'a' && c <= 'z' ? static_cast<char>(c - 'a' + 'A') : c;
    if (!is_legal_vin_char(upper[i])) return VinStatus::ForbiddenCharacter;
  }
  const std::string_view vin(upper, kVinLength);
  return compute_check_digit(vin) == upper[kCheckDigitIndex] ? VinStatus::Valid : VinStatus::CheckDigitMismatch;
}

LagCell fill_cell(const AdoptionSeries& target, const AdoptionSeries& candidate, std::size_t c,
                  int lag, const LagFilter& filter) {
  LagCell cell;
  cell.candidate = c;
  cell.lag = lag;
  cell.admissible = !filter || filter(candidate.feature, lag);
  for (const auto& [year, point] : target.points) {
    const auto* other = candidate.at(year - lag);
    if (!other) continue;
    const auto d = point.combined().basis_points() - other->combined().basis_points();
    const auto opt = std::llabs(point.optional.basis_points() - other->optional.basis_points());
    cell.sum_sq_bp += d * d;
    if (opt > cell.max_opt_diff_bp) cell.max_opt_diff_bp = opt;
    ++cell.overlap;
  }
  return cell;
}

}  // namespace

AvailabilityCounts count_availability_serial(std::span<const FarsVehicleRecord> records,
                                             FeatureId feature, int model_year) {
  AvailabilityCounts counts;
  for (const auto& r : records) {
    if (r.model_year == model_year) tally(counts, r.feature_flags[feature]);
  }
  return counts;
}

AvailabilityCounts count_availability_parallel(std::span<const FarsVehicleRecord> records,
                                               FeatureId feature, int model_year) {
  std::size_t standard = 0, optional = 0, not_available = 0, unknown = 0;
  const auto n = static_cast<std::ptrdiff_t>(records.size());
#pragma omp parallel for reduction(+ : standard, optional, not_available, unknown) schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& r = records[static_cast<std::size_t>(i)];
    if (r.model_year != model_year) continue;
    switch (r.feature_flags[feature]) {
      case Availability::Standard: ++standard; break;
      case Availability::Optional: ++optional; break;
      case Availability::NotAvailable: ++not_available; break;
      case Availability::Unknown: ++unknown; break;
    }
  }
  return {standard, optional, not_available, unknown};
}

std::size_t count_any_offered_serial(std::span<const FarsVehicleRecord> records,
                                     std::span<const FeatureId> features) {
  std::size_t count = 0;
  for (const auto& r : records) count += any_offered(r, features) ? 1 : 0;
  return count;
}

std::size_t count_any_offered_parallel(std::span<const FarsVehicleRecord> records,
                                       std::span<const FeatureId> features) {
  std::size_t count = 0;
  const auto n = static_cast<std::ptrdiff_t>(records.size());
#pragma omp parallel for reduction(+ : count) schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    count += any_offered(records[static_cast<std::size_t>(i)], features) ? 1 : 0;
  }
  return count;
}

std::vector<VinStatus> check_vins_serial(std::span<const std::string> vins) {
  std::vector<VinStatus> out;
  out.reserve(vins.size());
  for (const auto& v : vins) out.push_back(check_one(v));
  return out;
}

std::vector<VinStatus> check_vins_parallel(std::span<const std::string> vins) {
  std::vector<VinStatus> out(vins.size());
  const auto n = static_cast<std::ptrdiff_t>(vins.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = check_one(vins[static_cast<std::size_t>(i)]);
  }
  return out;
}

std::vector<LagCell> lag_grid_serial(const AdoptionSeries& target,
                                     std::span<const AdoptionSeries> candidates, int max_lag,
                                     const LagFilter& filter) {
  std::vector<LagCell> grid;
  grid.reserve(candidates.size() * static_cast<std::size_t>(max_lag + 1));
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    for (int lag = 0; lag <= max_lag; ++lag) {
      grid.push_back(fill_cell(target, candidates[c], c, lag, filter));
    }
  }
  return grid;
}

std::vector<LagCell> lag_grid_parallel(const AdoptionSeries& target,
                                       std::span<const AdoptionSeries> candidates, int max_lag,
                                       const LagFilter& filter) {
  const auto lags = static_cast<std::size_t>(max_lag + 1);
  std::vector<LagCell> grid(candidates.size() * lags);
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
  // The filter is caller-supplied and may not be thread-safe.
  std::vector<char> admissible(grid.size(), 1);
  if (filter) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      admissible[i] = filter(candidates[i / lags].feature, static_cast<int>(i % lags)) ? 1 : 0;
    }
  }
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const auto c = idx / lags;
    grid[idx] = fill_cell(target, candidates[c], c, static_cast<int>(idx % lags), {});
    grid[idx].admissible = admissible[idx] != 0;
  }
  return grid;
}

}  // namespace adas::kernels
