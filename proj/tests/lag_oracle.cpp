#include "lag_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>
#include <tuple>

namespace adas::oracle {

kernels::LagFilter LagInstance::filter() const {
  if (admitted.empty()) return {};
  std::vector<FeatureId> features;
  for (const auto& c : candidates) features.push_back(c.feature);
  return [features, table = admitted](FeatureId analog, int lag) {
    const auto it = std::find(features.begin(), features.end(), analog);
    return table[static_cast<std::size_t>(it - features.begin())][static_cast<std::size_t>(lag)];
  };
}

namespace {

AdoptionSeries random_series(std::mt19937& rng, FeatureId feature) {
  AdoptionSeries s{feature, {}};
  const int length = 1 + static_cast<int>(rng() % 10);
  const int start = 1995 + static_cast<int>(rng() % 30);
  for (int y = start; y < start + length; ++y) {
    if (length > 2 && rng() % 6 == 0) continue;  // occasional gap
    const std::int64_t std_bp = 500 * static_cast<std::int64_t>(rng() % 21);
    const std::int64_t opt_bp = 500 * static_cast<std::int64_t>(rng() % (21 - std_bp / 500));
    s.points[y] = {Fraction::from_basis_points(std_bp), Fraction::from_basis_points(opt_bp)};
  }
  if (s.points.empty()) s.points[start] = {};
  return s;
}

double combined(const AdoptionPoint& p) {
  return static_cast<double>(p.standard.basis_points() + p.optional.basis_points());
}

struct Scored {
  std::int64_t num;  // reduced sum of squares
  std::int64_t den;  // reduced overlap
  int lag;
  std::size_t candidate;
  int overlap;
  std::int64_t sum_sq;
  std::int64_t max_opt;
};

bool better(const Scored& a, const Scored& b) {
  const auto lhs = a.num * b.den;
  const auto rhs = b.num * a.den;
  return std::tie(lhs, a.lag, a.candidate) < std::tie(rhs, b.lag, b.candidate);
}

}  // namespace

LagInstance random_lag_instance(std::mt19937& rng) {
  LagInstance inst;
  std::vector<FeatureId> pool(kAllFeatures.begin(), kAllFeatures.end());
  std::shuffle(pool.begin(), pool.end(), rng);
  inst.target = random_series(rng, pool[0]);
  const std::size_t count = 1 + rng() % 4;
  for (std::size_t i = 0; i < count; ++i) inst.candidates.push_back(random_series(rng, pool[i + 1]));
  inst.config.max_lag = static_cast<int>(rng() % 26);
  inst.config.min_overlap = 1 + static_cast<int>(rng() % 3);
  if (rng() % 2) {
    inst.admitted.assign(count, std::vector<bool>(static_cast<std::size_t>(inst.config.max_lag) + 1));
    for (auto& row : inst.admitted) {
      for (std::size_t l = 0; l < row.size(); ++l) row[l] = rng() % 4 != 0;
    }
  }
  return inst;
}

std::optional<LagMatch> brute_force_match(const LagInstance& inst) {
  std::vector<Scored> scored;
  for (std::size_t c = 0; c < inst.candidates.size(); ++c) {
    const auto& cand = inst.candidates[c];
    for (int lag = 0; lag <= inst.config.max_lag; ++lag) {
      if (!inst.admitted.empty() && !inst.admitted[c][static_cast<std::size_t>(lag)]) continue;
      std::int64_t sum = 0;
      std::int64_t max_opt = 0;
      int overlap = 0;
      for (const auto& [year, tp] : inst.target.points) {
        const auto it = cand.points.find(year - lag);
        if (it == cand.points.end()) continue;
        const auto d = static_cast<std::int64_t>(combined(tp) - combined(it->second));
        sum += d * d;
        max_opt = std::max<std::int64_t>(max_opt, std::llabs(tp.optional.basis_points() - it->second.optional.basis_points()));
        ++overlap;
      }
      if (overlap < std::max(1, inst.config.min_overlap)) continue;
      const auto g = std::gcd(sum, static_cast<std::int64_t>(overlap));
      scored.push_back({sum / g, overlap / g, lag, c, overlap, sum, max_opt});
    }
  }
  if (scored.empty()) return std::nullopt;
  const auto best = *std::min_element(scored.begin(), scored.end(), better);

  LagMatch m;
  m.target = inst.target.feature;
  m.analog = inst.candidates[best.candidate].feature;
  m.lag_years = best.lag;
  m.overlap_years = best.overlap;
  m.sum_sq_bp = best.sum_sq;
  m.distance = static_cast<double>(best.sum_sq) / best.overlap / 1e8;
  if (best.lag > inst.config.long_lag_threshold) m.cautions.push_back({CautionKind::LongLag, best.lag});
  if (best.max_opt > inst.config.optional_divergence_bp) {
    m.cautions.push_back({CautionKind::OptionalShareDivergence, best.max_opt});
  }
  if (best.overlap < inst.config.small_overlap_threshold) {
    m.cautions.push_back({CautionKind::SmallOverlap, best.overlap});
  }
  std::sort(m.cautions.begin(), m.cautions.end());
  return m;
}

namespace {

std::string describe(const std::optional<LagMatch>& m) {
  if (!m) return "no match";
  std::ostringstream out;
  out << abbreviation(m->analog) << " lag " << m->lag_years << " overlap " << m->overlap_years << " sumsq "
      << m->sum_sq_bp << " cautions " << m->cautions.size();
  return out.str();
}

}  // namespace

OracleRun run_lag_oracle(int trials, unsigned seed) {
  std::mt19937 rng(seed);
  OracleRun run;
  for (int t = 0; t < trials; ++t) {
    const auto inst = random_lag_instance(rng);
    const auto expected = brute_force_match(inst);
    std::optional<LagMatch> actual;
    try {
      actual = match_lag(inst.target, inst.candidates, inst.config, inst.filter());
      std::sort(actual->cautions.begin(), actual->cautions.end());
    } catch (const EstimationError& e) {
      if (e.code() != EstimationErrc::NoCandidateQualifies) throw;
    }
    bool same = expected.has_value() == actual.has_value();
    if (same && expected) {
      same = expected->analog == actual->analog && expected->lag_years == actual->lag_years &&
             expected->overlap_years == actual->overlap_years && expected->sum_sq_bp == actual->sum_sq_bp &&
             expected->cautions == actual->cautions && expected->target == actual->target &&
             std::abs(expected->distance - actual->distance) < 1e-12;
    }
    ++run.trials;
    if (same) {
      ++run.agreements;
    } else if (run.first_disagreement.empty()) {
      run.first_disagreement = "trial " + std::to_string(t) + ": expected " + describe(expected) + ", got " +
                               describe(actual);
    }
  }
  return run;
}

}  // namespace adas::oracle
