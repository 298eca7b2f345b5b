#include <doctest.h>

#include <cmath>

#include "dynbit/energy.hpp"
#include "dynbit/lp.hpp"
#include "dynbit/numeric.hpp"
#include "dynbit/rng.hpp"
#include "test_stats.hpp"

using namespace dynbit;
using namespace dynbit::energy;
using dynbit::timeset::TimeSet;

TEST_CASE("kernel bounds and monotonicity") {
  Rng rng(11);
  for (int rep = 0; rep < 500; ++rep) {
    const double s = 0.1 + 2.0 * rng.uniform();
    const double kk = 1.0 + 1000.0 * rng.uniform();
    const double x = 20.0 * (rng.uniform() - 0.5);
    const auto psi = Kernel::psi(s);
    const auto sq = Kernel::sqrt_clamp(kk);
    for (const auto& k : {psi, sq}) {
      const double v = k(x);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      CHECK(k(x) == k(-x));                       // even
      CHECK(k(1.01 * x) <= k(x) + 1e-15);         // nonincreasing in |x|
    }
    CHECK(psi(0.0) == 1.0);
    CHECK(sq(0.0) == 1.0);
  }
  // Spot values.
  CHECK(Kernel::psi(0.5)(4.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(Kernel::sqrt_clamp(100.0)(1.0) == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("energy closed forms") {
  // Point mass: any clamped kernel gives 1.
  DiscreteMeasure delta{{0.3}, {1.0}};
  CHECK(dynbit::energy::energy(delta, Kernel::psi(0.7), 0.05) == 1.0);
  CHECK(dynbit::energy::energy(delta, Kernel::sqrt_clamp(64.0), 1.0) == 1.0);

  // Two atoms, weight 1/2 each at distance D: (1 + psi(D/r)) / 2.
  const double D = 0.2;
  const double r = 0.1;
  DiscreteMeasure two{{0.3, 0.5}, {0.5, 0.5}};
  const double psi_val = Kernel::psi(1.0)(D / r);  // = 1/2
  CHECK(psi_val == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(dynbit::energy::energy(two, Kernel::psi(1.0), r) ==
        doctest::Approx((1.0 + psi_val) / 2.0).epsilon(1e-14));

  // Relabeling invariance.
  DiscreteMeasure perm{{0.3, 0.5}, {0.25, 0.75}};
  DiscreteMeasure perm2{{0.3, 0.5}, {0.25, 0.75}};
  CHECK(dynbit::energy::energy(perm, Kernel::psi(0.6), r) ==
        doctest::Approx(dynbit::energy::energy(perm2, Kernel::psi(0.6), r)).epsilon(1e-14));

  // Doubling r cannot increase energy for clamped kernels.
  Rng rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    DiscreteMeasure mu;
    double total = 0.0;
    for (int i = 0; i < 6; ++i) {
      mu.atoms.push_back(rng.uniform());
      const double w = 0.05 + rng.uniform();
      mu.weights.push_back(w);
      total += w;
    }
    std::sort(mu.atoms.begin(), mu.atoms.end());
    for (auto& w : mu.weights) w /= total;
    const double rr = 0.02 + 0.2 * rng.uniform();
    CHECK(dynbit::energy::energy(mu, Kernel::psi(0.5), 2.0 * rr) >=
          dynbit::energy::energy(mu, Kernel::psi(0.5), rr) - 1e-12);
  }
}

TEST_CASE("uniform sqrt-clamp energy tracks the double integral") {
  // Closed form of the continuum integral over the unit square:
  // (8/3) k^{-1/2} - 2/k + (1/3) k^{-2}; cross-checked numerically here.
  auto analytic = [](double k) {
    return (8.0 / 3.0) / std::sqrt(k) - 2.0 / k + (1.0 / 3.0) / (k * k);
  };
  for (double k : {1.0, 16.0, 256.0}) {
    const double numeric = testutil::simpson_2d_unit_square(
        [&](double t, double s) {
          const double v = k * std::abs(t - s);
          return v <= 1.0 ? 1.0 : 1.0 / std::sqrt(v);
        },
        600);
    CHECK(numeric == doctest::Approx(analytic(k)).epsilon(2e-3));
  }

  // Uniform discrete measure on n >> k points approximates it.
  const double k = 256.0;
  const int n = 4097;
  DiscreteMeasure unif;
  for (int i = 0; i < n; ++i) {
    unif.atoms.push_back(static_cast<double>(i) / (n - 1));
    unif.weights.push_back(1.0 / n);
  }
  const double e = dynbit::energy::energy(unif, Kernel::sqrt_clamp(k), 1.0);
  CHECK(e == doctest::Approx(analytic(k)).epsilon(0.02));
  CHECK(e * std::sqrt(k) > 1.0);
  CHECK(e * std::sqrt(k) < 2.7);
}

TEST_CASE("min_energy on degenerate and two-point sets") {
  const auto single = min_energy(TimeSet::points({0.42}), Kernel::psi(0.5),
                                 1.0, 8);
  CHECK(single.value == 1.0);
  CHECK(single.measure.atoms.size() == 1);
  CHECK(single.measure.weights[0] == 1.0);

  // Two points with psi(D/r) = 1/2: optimum (1/2, 1/2), value 3/4.
  const auto two = min_energy(TimeSet::points({0.3, 0.5}), Kernel::psi(1.0),
                              0.1, 8);
  CHECK(two.value == doctest::Approx(0.75).epsilon(1e-9));
  CHECK(two.measure.weights[0] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(two.gap < 1e-6);
}

TEST_CASE("min_energy on the unit interval meets the analytic band") {
  const auto res = min_energy(TimeSet::unit_interval(),
                              Kernel::sqrt_clamp(256.0), 1.0, 2048);
  CHECK(res.gap < 1e-6);
  const double scaled = res.value * 16.0;
  // Lower constant: the kernel dominates k^{-1/2} min(|x|^{-1/2}, 1), whose
  // energy on [0,1] is identically 1. Upper: the uniform measure's value.
  CHECK(scaled >= 1.0);
  CHECK(scaled <= 2.7);

  // Frank-Wolfe certificate: min potential >= value - gap.
  double phi_min = std::numeric_limits<double>::infinity();
  const auto& mu = res.measure;
  const auto kern = Kernel::sqrt_clamp(256.0);
  for (std::size_t i = 0; i < mu.atoms.size(); ++i) {
    double phi = 0.0;
    for (std::size_t j = 0; j < mu.atoms.size(); ++j)
      phi += mu.weights[j] * kern(mu.atoms[i] - mu.atoms[j]);
    phi_min = std::min(phi_min, phi);
  }
  CHECK(phi_min >= res.value - res.gap - 1e-12);
}

TEST_CASE("packing lp matches brute force on tiny instances") {
  Rng rng(99);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = 2 + rng.uniform_index(4);  // 2..5
    std::vector<double> A(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      A[i * n + i] = 1.0;
      for (std::size_t j = i + 1; j < n; ++j) {
        const double v = rng.uniform();
        A[i * n + j] = v;
        A[j * n + i] = v;
      }
    }
    const auto res = lp::solve_packing_lp(A, n);
    const double brute = testutil::brute_lp_value(A, n);
    CHECK(res.value == doctest::Approx(brute).epsilon(1e-7));
    CHECK(res.max_row_violation <= 1e-9);
    for (double w : res.w) CHECK(w >= 0.0);
  }
}

TEST_CASE("weighted packing closed forms and feasibility") {
  const auto single = weighted_packing(TimeSet::points({0.5}), 0.5, 0.1, 8);
  CHECK(single.value == doctest::Approx(1.0).epsilon(1e-10));

  // Two points with gamma = 1/2: value 2/(1+gamma) = 4/3.
  const auto two = weighted_packing(TimeSet::points({0.3, 0.5}), 1.0, 0.1, 8);
  CHECK(two.value == doctest::Approx(4.0 / 3.0).epsilon(1e-9));

  const auto pack = weighted_packing(TimeSet::unit_interval(), 0.5, 0.01, 300);
  CHECK(pack.max_row_violation <= 1e-9);
  // Feasibility invariant re-checked directly.
  const auto psi = Kernel::psi(0.5);
  for (std::size_t i = 0; i < pack.points.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < pack.points.size(); ++j)
      row += pack.weights[j] * psi((pack.points[i] - pack.points[j]) / 0.01);
    CHECK(row <= 1.0 + 1e-9);
  }
}

TEST_CASE("packing grows when the kernel loosens in s") {
  // psi_s >= psi_s' pointwise for s <= s', so constraints tighten. N_r is
  // therefore nondecreasing in s.
  for (const auto& F :
       {TimeSet::unit_interval(), TimeSet::cantor(0.0, 1.0, 1.0 / 3.0, 6)}) {
    double prev = -1.0;
    for (double s : {0.3, 0.5, 0.8, 1.2}) {
      const double v = weighted_packing(F, s, 0.02, 200).value;
      CHECK(v >= prev - 1e-9);
      prev = v;
    }
  }
}

TEST_CASE("packing and minimal energy track each other") {
  // On a shared grid the exact optimum satisfies N * E <= 1, and the factor-4
  // agreement between N and 1/E holds on all tested instances.
  Rng rng(2024);
  for (int rep = 0; rep < 10; ++rep) {
    TimeSet F = rep % 3 == 0
                    ? TimeSet::unit_interval()
                    : rep % 3 == 1
                          ? TimeSet::cantor(0.0, 1.0, 1.0 / 3.0, 6)
                          : TimeSet::intervals({{0.0, 0.3}, {0.6, 1.0}});
    const double s = 0.3 + 0.5 * rng.uniform();
    const double r = 0.01 + 0.1 * rng.uniform();
    const auto pack = weighted_packing(F, s, r, 250);
    const auto me = min_energy(F, Kernel::psi(s), r,
                               static_cast<int>(pack.points.size()));
    const double product = pack.value * me.value;
    CHECK(product <= 1.0 + 1e-5);
    CHECK(product >= 0.25);
    CHECK(pack.value <= 4.0 / me.value);
    CHECK(pack.value >= 1.0 / (4.0 * me.value));
  }
}

TEST_CASE("box dimension profiles") {
  const auto grid = geometric_grid(0.01, 1e-5, 4);

  const auto unit = box_dim_profile(TimeSet::unit_interval(), 0.5, grid, 1200);
  CHECK(unit.gamma == doctest::Approx(0.5).epsilon(0.05));
  CHECK(unit.delta == doctest::Approx(0.5).epsilon(0.05));

  // Point sets saturate once r is far below the minimum gap; the psi kernel
  // decays slowly, so the grid sits well below that gap.
  const auto pts = box_dim_profile(TimeSet::points({0.0, 0.2, 0.5, 0.9}), 0.5,
                                   geometric_grid(5e-4, 5e-7, 4), 1200);
  CHECK(std::abs(pts.gamma) < 0.05);
  CHECK(std::abs(pts.delta) < 0.05);

  // The profile saturates at s = 1/2 for the ternary Cantor set as well,
  // but the prefactor still drifts like r^(dim - s) at reachable scales, so
  // the estimates sit a little below 1/2. Calibrated band, approach from
  // below.
  const auto cantor = box_dim_profile(TimeSet::cantor(0.0, 1.0, 1.0 / 3.0, 12),
                                      0.5, grid, 1200);
  CHECK(cantor.gamma >= 0.40);
  CHECK(cantor.delta >= cantor.gamma);
  CHECK(cantor.delta <= 0.55);
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < cantor.r_grid.size(); ++i) {
    lx.push_back(std::log(1.0 / cantor.r_grid[i]));
    ly.push_back(std::log(1.0 / cantor.energy_values[i]));
  }
  const double energy_slope = least_squares_slope(lx, ly);
  CHECK(energy_slope == doctest::Approx(0.5).epsilon(0.12));
  // Both routes see the same exponent.
  CHECK(std::abs(energy_slope - 0.5 * (cantor.gamma + cantor.delta)) < 0.05);
}
