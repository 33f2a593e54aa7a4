#pragma once

// Brute-force reference for match_lag, written without the production grid
// kernel: every (candidate, lag) pair is scored directly and the winner is
// picked by sorting.

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "adas/estimator.hpp"

namespace adas::oracle {

struct LagInstance {
  AdoptionSeries target;
  std::vector<AdoptionSeries> candidates;
  MatchConfig config;
  std::vector<std::vector<bool>> admitted;  // [candidate][lag]; empty admits all

  kernels::LagFilter filter() const;
};

/// Series of at most 10 years, max_lag at most 25, values on a coarse grid so
/// exact ties occur.
LagInstance random_lag_instance(std::mt19937& rng);

/// nullopt when no pair qualifies.
std::optional<LagMatch> brute_force_match(const LagInstance& instance);

struct OracleRun {
  int trials = 0;
  int agreements = 0;
  std::string first_disagreement;
};

/// Runs match_lag against the brute force on `trials` random instances.
OracleRun run_lag_oracle(int trials, unsigned seed);

}  // namespace adas::oracle
