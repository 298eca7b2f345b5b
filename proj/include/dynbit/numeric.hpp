// Shared numeric helpers: stable log-space products, binomial pmfs,
// confidence intervals, geometric grids and sliding-window slope fits.
#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace dynbit {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(base^e) with the 0^0 = 1 convention.
double log_pow(double base, double exponent);

double log_binom(std::int64_t n, std::int64_t k);

// log(sum(exp(v))) over finite and -inf entries.
double log_sum_exp(std::span<const double> values);

// Binomial(n, p) pmf, exact in log space entry by entry.
std::vector<double> binomial_pmf(std::int64_t n, double p);

struct WilsonInterval {
  double lo = 0.0;
  double hi = 0.0;
};

// 95% Wilson score interval for hits/trials.
WilsonInterval wilson95(std::int64_t hits, std::int64_t trials);

// Decreasing geometric grid from hi down to lo with the given density.
std::vector<double> geometric_grid(double hi, double lo, int per_decade);

double least_squares_slope(std::span<const double> x, std::span<const double> y);

struct SlopeWindows {
  std::vector<double> slopes;
  double min_slope = 0.0;
  double max_slope = 0.0;
};

// Least-squares slopes over sliding windows of the given width (natural-log
// units) along an increasing abscissa. Windows need at least three points.
SlopeWindows window_slopes(std::span<const double> x, std::span<const double> y,
                           double window_width);

}  // namespace dynbit
