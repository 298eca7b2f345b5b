// Symbolic compact subsets of [0, T]: finite unions of closed intervals,
// finite-depth Cantor-type IFS approximants, and finite point sets.
// All interval queries are exact on the materialized components; no time
// discretization happens anywhere in this module.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace dynbit::timeset {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

class TimeSet {
 public:
  enum class Kind { Intervals, Cantor, Points };

  struct CantorParams {
    double left = 0.0;
    double length = 1.0;
    double ratio = 1.0 / 3.0;  // contraction, in (0, 1/2)
    int depth = 0;             // materialized as 2^depth closed intervals
  };

  static TimeSet intervals(std::vector<Interval> parts);
  static TimeSet cantor(double left, double length, double ratio, int depth);
  static TimeSet points(std::vector<double> pts);
  static TimeSet unit_interval() { return intervals({{0.0, 1.0}}); }

  Kind kind() const { return kind_; }
  const std::vector<Interval>& components() const { return comps_; }
  const std::optional<CantorParams>& cantor_params() const { return cantor_; }

  bool empty() const { return comps_.empty(); }
  double inf() const;
  double sup() const;
  double diameter() const;

  bool contains(double t) const;
  // Closed-interval query: F ∩ [a, b] nonempty.
  bool intersects(double a, double b) const;
  // Half-open query used for piecewise-constant path segments: F ∩ [a, b).
  bool intersects_half_open(double a, double b) const;
  // Smallest point of F that is >= x, if any.
  std::optional<double> first_point_at_or_after(double x) const;

  nlohmann::json to_json() const;
  static TimeSet from_json(const nlohmann::json& j);

 private:
  TimeSet() = default;
  Kind kind_ = Kind::Points;
  std::vector<Interval> comps_;  // sorted, pairwise disjoint; points degenerate
  std::optional<CantorParams> cantor_;
};

// Maximum number of points of F that are pairwise >= eps apart. Greedy
// left-to-right selection, optimal in one dimension.
std::int64_t kolmogorov_capacity(const TimeSet& F, double eps);

// Number of grid cells [i/k, (i+1)/k] inside [0, max(1, sup F)] that meet F
// (closed-interval convention on both sides).
std::int64_t covering_count(const TimeSet& F, std::int64_t k);

struct CapacityProfile {
  std::vector<double> epsilons;          // decreasing
  std::vector<std::int64_t> capacities;  // nondecreasing
  double alpha = 0.0;                    // lower Minkowski dimension estimate
  double beta = 0.0;                     // upper Minkowski dimension estimate
  double global_slope = 0.0;             // single fit across the whole grid
  double doubling_max_ratio = 0.0;       // max over grid of K(eps)/K(2 eps)
};

CapacityProfile capacity_profile(const TimeSet& F,
                                 const std::vector<double>& eps_grid);

// (alpha, beta) from min/max of sliding one-decade slopes of
// log K vs log(1/eps).
std::pair<double, double> minkowski_dims(const TimeSet& F,
                                         const std::vector<double>& eps_grid);

// Breakpoint table of eps -> K_F(eps) over [eps_lo, eps_hi], found by
// bisection on the monotone step function. Useful when K is evaluated at
// millions of nearby scales.
struct CapacityStepTable {
  // Capacity equals value[i] on (edge[i], edge[i+1]]; edges increasing.
  std::vector<double> edges;
  std::vector<std::int64_t> values;
  std::int64_t lookup(double eps) const;
};

CapacityStepTable capacity_step_table(const TimeSet& F, double eps_lo,
                                      double eps_hi);

}  // namespace dynbit::timeset
