// Test-only oracles and statistical helpers, all independent of the library
// implementation paths they check: brute-force enumeration, dense vertex
// enumeration for tiny LPs, and textbook statistical thresholds.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace testutil {

// Maximum eps-separated subset by full subset enumeration (n <= 20).
inline std::int64_t brute_max_separated(std::span<const double> points,
                                        double eps) {
  const auto n = points.size();
  std::int64_t best = 0;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    std::vector<double> sel;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) sel.push_back(points[i]);
    bool ok = true;
    for (std::size_t i = 0; i + 1 < sel.size() && ok; ++i)
      for (std::size_t j = i + 1; j < sel.size() && ok; ++j)
        if (std::abs(sel[i] - sel[j]) < eps) ok = false;
    if (ok) best = std::max<std::int64_t>(best, static_cast<std::int64_t>(sel.size()));
  }
  return best;
}

// Maximum eps-separated subset of sorted points by quadratic DP; independent
// of the greedy route.
inline std::int64_t dp_max_separated(std::span<const double> sorted_points,
                                     double eps) {
  const auto n = sorted_points.size();
  std::vector<std::int64_t> f(n, 1);
  std::int64_t best = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j)
      if (sorted_points[i] - sorted_points[j] >= eps)
        f[i] = std::max(f[i], f[j] + 1);
    best = std::max(best, f[i]);
  }
  return best;
}

// Exact P{ exists j: S_k(t_j) = level } by enumerating all joint bit paths
// over the time grid (k * |times| <= 22), using only the 2x2 chain.
inline double brute_joint_path_hit_prob(
    std::int64_t k, std::int64_t level, double p, std::span<const double> times,
    std::array<std::array<double, 2>, 2> (*matrix)(double, double)) {
  const auto m = times.size();
  const auto paths = static_cast<std::uint64_t>(1) << m;  // per-bit paths
  // Probability of one bit following a given 0/1 path across the grid.
  std::vector<double> path_prob(paths, 0.0);
  for (std::uint64_t pat = 0; pat < paths; ++pat) {
    double prob = (pat & 1u) ? p : 1.0 - p;  // stationary at the first time
    for (std::size_t j = 1; j < m; ++j) {
      const auto prev = static_cast<std::size_t>((pat >> (j - 1)) & 1u);
      const auto cur = static_cast<std::size_t>((pat >> j) & 1u);
      prob *= matrix(p, times[j] - times[j - 1])[prev][cur];
    }
    path_prob[pat] = prob;
  }

  // Enumerate the joint assignment of one path per bit.
  double hit = 0.0;
  std::vector<std::uint64_t> idx(static_cast<std::size_t>(k), 0);
  for (;;) {
    double prob = 1.0;
    for (std::int64_t b = 0; b < k; ++b)
      prob *= path_prob[idx[static_cast<std::size_t>(b)]];
    if (prob > 0.0) {
      bool any = false;
      for (std::size_t j = 0; j < m && !any; ++j) {
        std::int64_t sum = 0;
        for (std::int64_t b = 0; b < k; ++b)
          sum += (idx[static_cast<std::size_t>(b)] >> j) & 1u;
        any = sum == level;
      }
      if (any) hit += prob;
    }
    // Odometer increment.
    std::size_t pos = 0;
    while (pos < idx.size()) {
      if (++idx[pos] < paths) break;
      idx[pos] = 0;
      ++pos;
    }
    if (pos == idx.size()) break;
  }
  return hit;
}

// Value of max sum(w) s.t. A w <= 1, w >= 0 by vertex enumeration (n <= 5).
inline double brute_lp_value(const std::vector<double>& A, std::size_t n) {
  // Constraint matrix: n kernel rows then n bounds -w_i <= 0.
  auto solve = [&](const std::vector<std::size_t>& tight,
                   std::vector<double>& w) {
    std::vector<double> M(n * (n + 1), 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      const auto c = tight[r];
      if (c < n) {
        for (std::size_t j = 0; j < n; ++j) M[r * (n + 1) + j] = A[c * n + j];
        M[r * (n + 1) + n] = 1.0;
      } else {
        M[r * (n + 1) + (c - n)] = 1.0;
        M[r * (n + 1) + n] = 0.0;
      }
    }
    // Gaussian elimination with partial pivoting.
    for (std::size_t col = 0; col < n; ++col) {
      std::size_t piv = col;
      for (std::size_t r = col + 1; r < n; ++r)
        if (std::abs(M[r * (n + 1) + col]) > std::abs(M[piv * (n + 1) + col]))
          piv = r;
      if (std::abs(M[piv * (n + 1) + col]) < 1e-11) return false;
      for (std::size_t j = 0; j <= n; ++j)
        std::swap(M[col * (n + 1) + j], M[piv * (n + 1) + j]);
      for (std::size_t r = 0; r < n; ++r) {
        if (r == col) continue;
        const double f = M[r * (n + 1) + col] / M[col * (n + 1) + col];
        for (std::size_t j = 0; j <= n; ++j)
          M[r * (n + 1) + j] -= f * M[col * (n + 1) + j];
      }
    }
    w.resize(n);
    for (std::size_t r = 0; r < n; ++r)
      w[r] = M[r * (n + 1) + n] / M[r * (n + 1) + r];
    return true;
  };

  double best = 0.0;  // w = 0 is always feasible
  std::vector<std::size_t> comb;
  const std::size_t total = 2 * n;
  std::vector<bool> pick(total, false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(n), true);
  do {
    comb.clear();
    for (std::size_t i = 0; i < total; ++i)
      if (pick[i]) comb.push_back(i);
    std::vector<double> w;
    if (!solve(comb, w)) continue;
    bool feasible = true;
    for (std::size_t i = 0; i < n && feasible; ++i)
      if (w[i] < -1e-9) feasible = false;
    for (std::size_t r = 0; r < n && feasible; ++r) {
      double row = 0.0;
      for (std::size_t j = 0; j < n; ++j) row += A[r * n + j] * w[j];
      if (row > 1.0 + 1e-9) feasible = false;
    }
    if (!feasible) continue;
    double value = 0.0;
    for (double wi : w) value += wi;
    best = std::max(best, value);
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return best;
}

// Wilson-Hilferty approximation of the chi-square quantile.
inline double chi2_critical(double df, double z_alpha = 3.090232306167814) {
  const double a = 2.0 / (9.0 * df);
  const double c = 1.0 - a + z_alpha * std::sqrt(a);
  return df * c * c * c;
}

// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() -
                             static_cast<double>(j) / b.size()));
  }
  return d;
}

inline double ks_critical(std::size_t n, std::size_t m, double c_alpha = 1.628) {
  return c_alpha * std::sqrt((static_cast<double>(n) + static_cast<double>(m)) /
                             (static_cast<double>(n) * static_cast<double>(m)));
}

// Composite 2D Simpson integral over [0,1]^2.
template <class F>
double simpson_2d_unit_square(F&& f, int panels) {
  auto weight = [panels](int i) {
    if (i == 0 || i == 2 * panels) return 1.0;
    return i % 2 == 1 ? 4.0 : 2.0;
  };
  const double h = 1.0 / (2.0 * panels);
  double total = 0.0;
  for (int i = 0; i <= 2 * panels; ++i)
    for (int j = 0; j <= 2 * panels; ++j)
      total += weight(i) * weight(j) * f(i * h, j * h);
  return total * h * h / 9.0;
}

}  // namespace testutil
