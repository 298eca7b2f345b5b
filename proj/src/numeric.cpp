#include "dynbit/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dynbit {

double log_pow(double base, double exponent) {
  if (exponent == 0.0) return 0.0;
  if (base <= 0.0) return kNegInf;
  return exponent * std::log(base);
}

double log_binom(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return kNegInf;
  if (k == 0 || k == n) return 0.0;
  return std::lgamma(static_cast<double>(n) + 1.0) -
         std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

double log_sum_exp(std::span<const double> values) {
  double m = kNegInf;
  for (double v : values) m = std::max(m, v);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double v : values) s += std::exp(v - m);
  return m + std::log(s);
}

std::vector<double> binomial_pmf(std::int64_t n, double p) {
  std::vector<double> pmf(static_cast<std::size_t>(n) + 1);
  for (std::int64_t i = 0; i <= n; ++i) {
    double lg = log_binom(n, i) + log_pow(p, static_cast<double>(i)) +
                log_pow(1.0 - p, static_cast<double>(n - i));
    pmf[static_cast<std::size_t>(i)] = std::exp(lg);
  }
  return pmf;
}

WilsonInterval wilson95(std::int64_t hits, std::int64_t trials) {
  if (trials <= 0) throw std::domain_error("wilson95: trials must be positive");
  const double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(hits) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (phat + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
  WilsonInterval ci{std::max(0.0, center - half), std::min(1.0, center + half)};
  if (hits == 0) ci.lo = 0.0;
  if (hits == trials) ci.hi = 1.0;
  return ci;
}

std::vector<double> geometric_grid(double hi, double lo, int per_decade) {
  if (!(hi > lo) || lo <= 0.0 || per_decade < 1)
    throw std::domain_error("geometric_grid: need hi > lo > 0");
  const double step = std::pow(10.0, -1.0 / per_decade);
  std::vector<double> grid;
  for (double v = hi; v > lo * (1.0 - 1e-12); v *= step) grid.push_back(v);
  if (grid.back() > lo * (1.0 + 1e-12)) grid.push_back(lo);
  return grid;
}

double least_squares_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::domain_error("least_squares_slope: need >= 2 paired points");
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::domain_error("least_squares_slope: degenerate x");
  return (n * sxy - sx * sy) / denom;
}

SlopeWindows window_slopes(std::span<const double> x, std::span<const double> y,
                           double window_width) {
  if (x.size() != y.size() || x.size() < 3)
    throw std::domain_error("window_slopes: need >= 3 points");
  SlopeWindows out;
  for (std::size_t i = 0; i + 2 < x.size(); ++i) {
    std::size_t j = i + 1;
    while (j < x.size() && x[j] - x[i] < window_width) ++j;
    if (j >= x.size()) break;
    if (j - i + 1 < 3) continue;
    out.slopes.push_back(least_squares_slope(x.subspan(i, j - i + 1),
                                             y.subspan(i, j - i + 1)));
  }
  if (out.slopes.empty())
    throw std::domain_error("window_slopes: grid narrower than one window");
  auto [mn, mx] = std::minmax_element(out.slopes.begin(), out.slopes.end());
  out.min_slope = *mn;
  out.max_slope = *mx;
  return out;
}

}  // namespace dynbit
