#include "dynbit/runs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dynbit/errors.hpp"
#include "dynbit/numeric.hpp"
#include "dynbit/rng.hpp"

namespace dynbit::runs {

RunStat run_stat(std::span<const std::uint8_t> bits, std::int64_t n,
                 std::int64_t ell) {
  if (n < 0 || static_cast<std::size_t>(n) >= bits.size())
    throw std::domain_error("run_stat: start index out of range");
  if (ell < 0) throw std::domain_error("run_stat: ell must be >= 0");

  RunStat rs;
  rs.start = n;
  rs.ell = ell;
  std::int64_t zeros = 0;
  std::int64_t j = 0;
  for (std::size_t i = static_cast<std::size_t>(n); i < bits.size(); ++i) {
    if (bits[i] == 0) {
      ++zeros;
      if (zeros > ell) {  // window [n, i-1] is the maximal one
        j = static_cast<std::int64_t>(i) - n;
        rs.value = j >= ell + 1 ? j : 0;
        return rs;
      }
    }
  }
  rs.truncated = true;  // run reaches the array boundary
  j = static_cast<std::int64_t>(bits.size()) - n;
  rs.value = j >= ell + 1 ? j : 0;
  return rs;
}

double lp_log(double p, double x) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("lp_log: bad p");
  return std::log(std::max(x, 100.0)) / std::log(1.0 / p);
}

ThresholdSequence ThresholdSequence::make(double theta, double p,
                                          std::int64_t n_max,
                                          std::int64_t stride) {
  if (n_max < 1 || stride < 1)
    throw std::domain_error("threshold sequence: bad n_max/stride");
  ThresholdSequence seq;
  seq.theta = theta;
  seq.p = p;
  seq.entries.reserve(static_cast<std::size_t>(n_max / stride) + 1);
  for (std::int64_t n = 1; n <= n_max; n += stride) {
    const double x = static_cast<double>(n);
    const double a = lp_log(p, x) + theta * lp_log(p, lp_log(p, x));
    seq.entries.push_back(
        std::max<std::int64_t>(1, static_cast<std::int64_t>(std::llround(a))));
  }
  return seq;
}

ErdosRenyiResult erdos_renyi_check(std::int64_t n, double p, std::int64_t ell,
                                   std::uint64_t seed) {
  if (n < 10000) throw std::domain_error("erdos_renyi_check: n must be >= 1e4");
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("erdos_renyi_check: p must lie in (0, 1)");
  if (ell < 0) throw std::domain_error("erdos_renyi_check: ell must be >= 0");

  const auto headroom = static_cast<std::int64_t>(
      std::ceil(4.0 * lp_log(p, static_cast<double>(n))));
  const std::int64_t N = n + headroom + ell + 2;

  Rng rng(seed);
  std::vector<std::int64_t> zeros;
  zeros.reserve(static_cast<std::size_t>(
      static_cast<double>(N) * (1.0 - p) * 1.1) + 64);
  for (std::int64_t i = 0; i < N; ++i)
    if (!rng.bernoulli(p)) zeros.push_back(i);

  ErdosRenyiResult out;
  out.n = n;
  std::size_t zi = 0;  // first zero at position >= m
  for (std::int64_t m = 0; m < n; ++m) {
    while (zi < zeros.size() && zeros[zi] < m) ++zi;
    const std::size_t target = zi + static_cast<std::size_t>(ell);
    std::int64_t z;
    if (target < zeros.size()) {
      z = zeros[target] - m;
    } else {
      z = N - m;
      out.truncated = true;
    }
    if (z >= ell + 1) out.max_run = std::max(out.max_run, z);
  }
  out.ratio = static_cast<double>(out.max_run) /
              (std::log(static_cast<double>(n)) / std::log(1.0 / p));
  return out;
}

DynRunSup dynamical_run_sup(std::int64_t n, double p, std::int64_t ell,
                            double horizon, std::uint64_t seed) {
  if (n < 1) throw std::domain_error("dynamical_run_sup: n must be >= 1");
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("dynamical_run_sup: p must lie in (0, 1)");
  if (ell < 0 || !(horizon >= 0.0))
    throw std::domain_error("dynamical_run_sup: bad ell or horizon");

  const auto headroom = static_cast<std::int64_t>(
      std::ceil(4.0 * lp_log(p, static_cast<double>(n))));
  const std::int64_t N = n + headroom + ell + 2;
  if (static_cast<double>(N) * horizon > 1e8)
    throw BudgetError("dynamical_run_sup: event budget exceeded");

  Rng rng(seed);
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(N));
  for (auto& b : bits) b = rng.bernoulli(p) ? 1 : 0;

  DynRunSup out;
  auto rs = run_stat(bits, n, ell);
  out.static_value = rs.value;
  out.sup_value = rs.value;
  out.truncated = rs.truncated;

  const auto rate = static_cast<double>(N);
  double t = 0.0;
  for (;;) {
    t += rng.exponential(rate);
    if (t > horizon) break;
    ++out.ticks;
    const auto idx = static_cast<std::int64_t>(
        rng.uniform_index(static_cast<std::uint64_t>(N)));
    const std::uint8_t nv = rng.bernoulli(p) ? 1 : 0;
    if (nv == bits[static_cast<std::size_t>(idx)]) continue;
    bits[static_cast<std::size_t>(idx)] = nv;
    // The statistic can change only when the flip lands inside the current
    // window or on its terminating zero.
    if (idx >= n && idx <= n + std::max(rs.value, ell)) {
      rs = run_stat(bits, n, ell);
      out.sup_value = std::max(out.sup_value, rs.value);
      out.truncated = out.truncated || rs.truncated;
    }
  }
  return out;
}

nlohmann::json SeriesDiagnostic::to_json() const {
  return {{"theta", theta},
          {"ell", ell},
          {"p", p},
          {"series_checkpoints", series_checkpoints},
          {"series_partial", series_partial},
          {"integral_blocks", integral_blocks},
          {"integral_exponent", integral_exponent},
          {"verdict", verdict}};
}

namespace {

// Exact integral of K_F(1/s) s^c over [s_lo, s_hi] split into dyadic blocks,
// using the capacity breakpoint table (K is piecewise constant).
std::vector<double> integral_blocks_for(
    const timeset::CapacityStepTable& table, double c, double s_lo,
    double s_hi) {
  auto primitive = [&](double s) {
    return std::abs(c + 1.0) > 1e-9 ? std::pow(s, c + 1.0) / (c + 1.0)
                                    : std::log(s);
  };
  // Piece boundaries in s: table edges are in eps = 1/s.
  std::vector<double> bounds;
  bounds.push_back(s_lo);
  for (auto it = table.edges.rbegin(); it != table.edges.rend(); ++it) {
    const double s = 1.0 / *it;
    if (s > s_lo && s < s_hi) bounds.push_back(s);
  }
  for (double s = 2.0; s < s_hi; s *= 2.0)
    if (s > s_lo) bounds.push_back(s);
  bounds.push_back(s_hi);
  std::sort(bounds.begin(), bounds.end());
  bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());

  std::vector<double> blocks;
  for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
    const double a = bounds[i];
    const double b = bounds[i + 1];
    const double mid = std::sqrt(a * b);
    const auto K = static_cast<double>(table.lookup(1.0 / mid));
    const double piece = K * (primitive(b) - primitive(a));
    const auto block_index =
        static_cast<std::size_t>(std::floor(std::log2(mid)));
    if (blocks.size() <= block_index) blocks.resize(block_index + 1, 0.0);
    blocks[block_index] += piece;
  }
  return blocks;
}

double fit_block_exponent(const std::vector<double>& blocks) {
  std::vector<double> lx, ly;
  for (std::size_t j = 2; j < blocks.size(); ++j) {
    if (blocks[j] <= 0.0) continue;
    lx.push_back(static_cast<double>(j) * std::log(2.0));
    ly.push_back(std::log(blocks[j]));
  }
  if (lx.size() < 3)
    throw std::domain_error("series diagnostic: not enough dyadic blocks");
  return least_squares_slope(lx, ly);
}

}  // namespace

SeriesDiagnostic series_diagnostic(const timeset::TimeSet& F, double theta,
                                   double p, std::int64_t ell,
                                   std::int64_t n_max, double s_max) {
  if (n_max < 1000)
    throw std::domain_error("series_diagnostic: n_max must be >= 1e3");
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("series_diagnostic: p must lie in (0, 1)");

  SeriesDiagnostic diag;
  diag.theta = theta;
  diag.ell = ell;
  diag.p = p;

  // Faithful partial sums of K_F(1/a_n) a_n^ell p^(a_n) with the clamped,
  // integer-rounded thresholds.
  {
    const double a_max_d =
        lp_log(p, static_cast<double>(n_max)) +
        std::abs(theta) * lp_log(p, lp_log(p, static_cast<double>(n_max))) + 2.0;
    const auto table = timeset::capacity_step_table(F, 1.0 / a_max_d, 1.0);
    std::int64_t a_cached = -1;
    double term_cached = 0.0;
    double sum = 0.0;
    std::int64_t next_checkpoint = 128;
    for (std::int64_t n = 1; n <= n_max; ++n) {
      const double x = static_cast<double>(n);
      const double a_real =
          lp_log(p, x) + theta * lp_log(p, lp_log(p, x));
      const auto a = std::max<std::int64_t>(
          1, static_cast<std::int64_t>(std::llround(a_real)));
      if (a != a_cached) {
        a_cached = a;
        const double ad = static_cast<double>(a);
        const double K = ad >= 1.0
                             ? static_cast<double>(table.lookup(std::min(
                                   1.0, 1.0 / ad)))
                             : 1.0;
        term_cached = K * std::pow(ad, static_cast<double>(ell)) *
                      std::exp(ad * std::log(p));
      }
      sum += term_cached;
      if (n == next_checkpoint || n == n_max) {
        diag.series_checkpoints.push_back(n);
        diag.series_partial.push_back(sum);
        next_checkpoint *= 2;
      }
    }
  }

  // Integral comparison with a genuine power of s.
  {
    const auto table = timeset::capacity_step_table(F, 1.0 / s_max, 1.0);
    diag.integral_blocks = integral_blocks_for(
        table, static_cast<double>(ell) - theta, 1.0, s_max);
    diag.integral_exponent = fit_block_exponent(diag.integral_blocks);
  }

  if (diag.integral_exponent < -0.05)
    diag.verdict = "convergent";
  else if (diag.integral_exponent > 0.05)
    diag.verdict = "divergent";
  else
    diag.verdict = "borderline";
  return diag;
}

double series_crossover_theta(const timeset::TimeSet& F, double p,
                              std::int64_t ell, double theta_lo,
                              double theta_hi, double step, double s_max) {
  if (!(theta_hi > theta_lo) || !(step > 0.0))
    throw std::domain_error("series_crossover_theta: bad theta range");
  const auto table = timeset::capacity_step_table(F, 1.0 / s_max, 1.0);
  auto exponent = [&](double theta) {
    return fit_block_exponent(integral_blocks_for(
        table, static_cast<double>(ell) - theta, 1.0, s_max));
  };
  double prev_theta = theta_lo;
  double prev_exp = exponent(theta_lo);
  for (double th = theta_lo + step; th <= theta_hi + 1e-12; th += step) {
    const double e = exponent(th);
    if (prev_exp >= 0.0 && e < 0.0) {
      // Linear interpolation to the zero crossing.
      return prev_theta + step * prev_exp / (prev_exp - e);
    }
    prev_theta = th;
    prev_exp = e;
  }
  throw std::domain_error(
      "series_crossover_theta: no crossover in the given range");
}

}  // namespace dynbit::runs
