// Run statistics with a defect budget, static and dynamical, plus the series
// diagnostics that locate the convergence/divergence boundary of capacity-
// weighted run-length series.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "dynbit/timeset.hpp"

namespace dynbit::runs {

struct RunStat {
  std::int64_t start = 0;
  std::int64_t ell = 0;
  std::int64_t value = 0;  // 0 or >= ell + 1
  bool truncated = false;  // the run reached the end of the array
};

// Largest window length j >= ell+1 starting at index `n` (0-based) containing
// at most `ell` zeros; 0 when no such window exists.
RunStat run_stat(std::span<const std::uint8_t> bits, std::int64_t n,
                 std::int64_t ell);

// Base-(1/p) logarithm with the argument clamped below at 100.
double lp_log(double p, double x);

struct ThresholdSequence {
  double theta = 0.0;
  double p = 0.5;
  // a_n = lp_log(n) + theta * lp_log(lp_log(n)), rounded to integers.
  std::vector<std::int64_t> entries;
  static ThresholdSequence make(double theta, double p, std::int64_t n_max,
                                std::int64_t stride = 1);
};

struct ErdosRenyiResult {
  std::int64_t n = 0;
  std::int64_t max_run = 0;  // max over start indices m <= n of Z_m
  double ratio = 0.0;        // max_run / log_{1/p} n
  bool truncated = false;
};

// One O(n) pass over a fresh random bit array with headroom 4 log_{1/p} n.
ErdosRenyiResult erdos_renyi_check(std::int64_t n, double p, std::int64_t ell,
                                   std::uint64_t seed);

struct DynRunSup {
  std::int64_t sup_value = 0;     // sup over constancy epochs of Z_n(t)
  std::int64_t static_value = 0;  // Z_n(0)
  std::int64_t ticks = 0;
  bool truncated = false;
};

// Event-driven supremum of the run statistic at start index n over
// [0, horizon]; recomputes the run only when a flip lands inside the current
// window.
DynRunSup dynamical_run_sup(std::int64_t n, double p, std::int64_t ell,
                            double horizon, std::uint64_t seed);

struct SeriesDiagnostic {
  double theta = 0.0;
  std::int64_t ell = 0;
  double p = 0.5;
  // Faithful series with the clamped thresholds, at dyadic checkpoints.
  std::vector<double> series_partial;
  std::vector<std::int64_t> series_checkpoints;
  // Integral comparison: partial values of the capacity-weighted power
  // integral, by dyadic block in s, and the fitted block-growth exponent.
  std::vector<double> integral_blocks;
  double integral_exponent = 0.0;  // blocks grow ~ s^exponent; converges iff < 0
  std::string verdict;             // "convergent" | "divergent" | "borderline"

  nlohmann::json to_json() const;
};

SeriesDiagnostic series_diagnostic(const timeset::TimeSet& F, double theta,
                                   double p, std::int64_t ell,
                                   std::int64_t n_max, double s_max = 1e5);

// Theta at which the integral-comparison exponent crosses the convergence
// boundary; approximately dim F + ell + 1.
double series_crossover_theta(const timeset::TimeSet& F, double p,
                              std::int64_t ell, double theta_lo,
                              double theta_hi, double step, double s_max = 1e5);

}  // namespace dynbit::runs
