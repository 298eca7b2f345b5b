// Monte Carlo hitting-probability estimation, the exact finite-time-grid
// oracle for the bit-sum chain, and scaling-law verification harnesses.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "dynbit/process.hpp"
#include "dynbit/timeset.hpp"

namespace dynbit::estimators {

// Exact P{ exists j: S_k(t_j) = level } for sorted times, by propagating the
// survival mass (states != level) of the stationary sum chain through the
// two-binomial transition kernel. The sum chain is Markov in stationarity
// because the bits are exchangeable.
double exact_hit_prob_finite(std::int64_t k, std::int64_t level, double p,
                             std::span<const double> times);

struct HitProbEstimate {
  std::int64_t k = 0;
  std::int64_t ell = 0;
  double p = 0.0;
  std::int64_t trials = 0;
  std::int64_t hits = 0;
  double p_hat = 0.0;
  double ci_lo = 0.0;  // 95% Wilson interval
  double ci_hi = 0.0;
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
};

// Each trial simulates a trajectory over [0, sup F] and applies the exact
// level-hit query with level k - ell. Trials use counter-based per-trial
// streams, so results are independent of the worker count.
HitProbEstimate mc_hit_prob(std::int64_t k, std::int64_t ell, double p,
                            const timeset::TimeSet& F, std::int64_t trials,
                            std::uint64_t seed, int threads = 1);

struct ScalingEntry {
  std::int64_t k = 0;
  double p_hat = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::int64_t hits = 0;
  std::int64_t trials = 0;
  double theory = 0.0;
  double ratio = 0.0;
};

struct ScalingReport {
  std::string target;
  std::vector<ScalingEntry> entries;
  double band_lo = 0.0;  // min ratio
  double band_hi = 0.0;  // max ratio
  double slope = 0.0;    // least-squares slope of log p_hat vs log k
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
};

// Ratios p_hat / (K_F(1/k) k^ell p^k) across the k grid.
ScalingReport verify_thm1(const timeset::TimeSet& F, double p,
                          std::int64_t ell, std::span<const std::int64_t> k_grid,
                          std::int64_t trials, std::uint64_t seed,
                          int threads = 1);

struct ReturnAsymptoticsRow {
  std::int64_t k = 0;
  double t = 0.0;
  double exact = 0.0;
  double bound = 0.0;  // min(1/sqrt(k t), 1)
  double ratio = 0.0;
};

struct ReturnAsymptotics {
  std::vector<ReturnAsymptoticsRow> rows;
  double min_ratio = 0.0;
  double max_ratio = 0.0;

  nlohmann::json to_json() const;
};

// Exact conditional return probabilities at p = 1/2, ell = k/2 against the
// min(1/sqrt(kt), 1) envelope.
ReturnAsymptotics verify_return_asymptotics(std::span<const std::int64_t> k_grid,
                                            std::span<const double> t_grid);

// Ratios p_hat * sqrt(k) * min_energy(F, sqrt-clamp kernel at k) at p = 1/2,
// ell = k/2 (k even).
ScalingReport verify_thm3(const timeset::TimeSet& F,
                          std::span<const std::int64_t> k_grid,
                          std::int64_t trials, std::uint64_t seed,
                          int threads = 1);

}  // namespace dynbit::estimators
