#include <doctest.h>

#include <cmath>
#include <numeric>

#include "dynbit/numeric.hpp"
#include "dynbit/process.hpp"
#include "dynbit/rng.hpp"
#include "test_stats.hpp"

using namespace dynbit;
using namespace dynbit::process;

TEST_CASE("transition params closed forms") {
  const auto zero = transition_params(0.5, 0.0);
  CHECK(zero.theta == 0.0);
  CHECK(zero.kappa == 1.0);

  const auto half = transition_params(0.5, std::log(2.0));
  CHECK(half.theta == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(half.kappa == doctest::Approx(0.75).epsilon(1e-14));

  const auto late = transition_params(0.9, 50.0);
  CHECK(std::abs(late.theta - 0.9) < 1e-15);
  CHECK(std::abs(late.kappa - 0.9) < 1e-15);

  CHECK_THROWS_AS(transition_params(0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(transition_params(1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(transition_params(0.5, -1e-9), std::domain_error);

  // Structural invariants across a parameter grid.
  for (double p : {0.1, 0.5, 0.93}) {
    for (double t : {0.0, 0.01, 0.7, 3.0, 40.0}) {
      const auto tp = transition_params(p, t);
      CHECK(0.0 <= tp.theta);
      CHECK(tp.theta <= p);
      CHECK(p <= tp.kappa);
      CHECK(tp.kappa <= 1.0);
      CHECK(tp.theta + (1.0 - tp.kappa) ==
            doctest::Approx(1.0 - std::exp(-t)).epsilon(1e-13));
    }
  }
}

TEST_CASE("transition matrix semigroup and stochasticity") {
  const auto m = transition_matrix(0.5, std::log(2.0));
  CHECK(m[0][0] == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(m[0][1] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(m[1][0] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(m[1][1] == doctest::Approx(0.75).epsilon(1e-14));

  const auto id = transition_matrix(0.37, 0.0);
  CHECK(id[0][0] == 1.0);
  CHECK(id[1][1] == 1.0);

  for (double p : {0.3, 0.5, 0.8}) {
    for (double s : {0.1, 0.3, 1.4}) {
      for (double t : {0.2, 0.4, 2.2}) {
        const auto ms = transition_matrix(p, s);
        const auto mt = transition_matrix(p, t);
        const auto mst = transition_matrix(p, s + t);
        for (int i = 0; i < 2; ++i) {
          CHECK(ms[i][0] + ms[i][1] == doctest::Approx(1.0).epsilon(1e-14));
          for (int j = 0; j < 2; ++j) {
            const double prod = ms[i][0] * mt[0][j] + ms[i][1] * mt[1][j];
            CHECK(prod == doctest::Approx(mst[i][j]).epsilon(1e-12));
          }
        }
      }
    }
  }
}

TEST_CASE("conditional return probability") {
  // Hand expansion: (1-theta)kappa + theta(1-kappa) at p=1/2, t=ln 2.
  CHECK(conditional_return_prob(2, 1, std::log(2.0), 0.5) ==
        doctest::Approx(0.625).epsilon(1e-13));
  CHECK(conditional_return_prob(7, 3, 0.0, 0.42) == 1.0);

  // Independent two-binomial convolution route.
  for (const auto& [k, ell, t, p] :
       std::vector<std::tuple<int, int, double, double>>{
           {6, 3, 0.7, 0.5}, {9, 2, 0.3, 0.8}, {12, 12, 1.1, 0.35},
           {5, 0, 2.0, 0.6}}) {
    const auto kern = sum_transition_kernel(k, k - ell, t, p);
    CHECK(conditional_return_prob(k, ell, t, p) ==
          doctest::Approx(kern.probs[static_cast<std::size_t>(k - ell)])
              .epsilon(1e-12));
  }
  CHECK_THROWS_AS(conditional_return_prob(4, 5, 1.0, 0.5), std::domain_error);
  CHECK_THROWS_AS(conditional_return_prob(4, -1, 1.0, 0.5), std::domain_error);

  // Large-k evaluation stays finite and inside [0, 1].
  const double big = conditional_return_prob(10000, 5000, 0.25, 0.5);
  CHECK(big > 0.0);
  CHECK(big < 1.0);
}

TEST_CASE("sum transition kernel") {
  // Single bit: the kernel row is the transition-matrix row.
  const auto tp = transition_params(0.4, 0.9);
  const auto one = sum_transition_kernel(1, 1, 0.9, 0.4);
  CHECK(one.probs[0] == doctest::Approx(1.0 - tp.kappa).epsilon(1e-14));
  CHECK(one.probs[1] == doctest::Approx(tp.kappa).epsilon(1e-14));

  // No time, no motion.
  const auto frozen = sum_transition_kernel(3, 2, 0.0, 0.7);
  CHECK(frozen.probs[2] == 1.0);

  // Stationarity limit: entry at 2 of Binomial(4, 1/2) is 6/16.
  const auto late = sum_transition_kernel(4, 4, 50.0, 0.5);
  CHECK(late.probs[2] == doctest::Approx(0.375).epsilon(1e-10));

  // Independent oracle: enumerate all 16 terminal states of 4 independent
  // 2-state chains started from a = 4 ones.
  {
    const auto m = transition_matrix(0.5, 50.0);
    std::vector<double> dist(5, 0.0);
    for (int state = 0; state < 16; ++state) {
      double prob = 1.0;
      int sum = 0;
      for (int b = 0; b < 4; ++b) {
        const int v = (state >> b) & 1;
        prob *= m[1][static_cast<std::size_t>(v)];
        sum += v;
      }
      dist[static_cast<std::size_t>(sum)] += prob;
    }
    for (int s = 0; s <= 4; ++s)
      CHECK(late.probs[static_cast<std::size_t>(s)] ==
            doctest::Approx(dist[static_cast<std::size_t>(s)]).epsilon(1e-12));
  }

  for (const auto& k : {1, 5, 12}) {
    for (int a = 0; a <= k; ++a) {
      const auto kern = sum_transition_kernel(k, a, 0.63, 0.44);
      CHECK(std::accumulate(kern.probs.begin(), kern.probs.end(), 0.0) ==
            doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(sum_transition_kernel(3, 4, 1.0, 0.5), std::domain_error);
}

TEST_CASE("stationarity of the binomial law") {
  for (int k = 1; k <= 12; ++k) {
    for (double p : {0.3, 0.5, 0.9}) {
      for (double t : {0.05, 0.8, 3.0}) {
        const auto pi = binomial_pmf(k, p);
        std::vector<double> pushed(static_cast<std::size_t>(k) + 1, 0.0);
        for (int a = 0; a <= k; ++a) {
          const auto row = sum_transition_kernel(k, a, t, p);
          for (int b = 0; b <= k; ++b)
            pushed[static_cast<std::size_t>(b)] +=
                pi[static_cast<std::size_t>(a)] *
                row.probs[static_cast<std::size_t>(b)];
        }
        for (int b = 0; b <= k; ++b)
          CHECK(pushed[static_cast<std::size_t>(b)] ==
                doctest::Approx(pi[static_cast<std::size_t>(b)])
                    .epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("trajectory simulation contracts") {
  CHECK_THROWS_AS(simulate_trajectory(1, 1.0, 1.0, 7), std::domain_error);
  CHECK_THROWS_AS(simulate_trajectory(0, 0.5, 1.0, 7), std::domain_error);

  // Determinism.
  const auto a = simulate_trajectory(2, 0.5, 1.0, 123456);
  const auto b = simulate_trajectory(2, 0.5, 1.0, 123456);
  REQUIRE(a.events.size() == b.events.size());
  CHECK(a.initial_bits == b.initial_bits);
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    CHECK(a.events[i].time == b.events[i].time);
    CHECK(a.events[i].index == b.events[i].index);
    CHECK(a.events[i].value == b.events[i].value);
  }

  // Times strictly increasing, indices in range.
  const auto traj = simulate_trajectory(37, 0.3, 2.5, 99);
  for (std::size_t i = 0; i < traj.events.size(); ++i) {
    CHECK(traj.events[i].time > (i ? traj.events[i - 1].time : 0.0));
    CHECK(traj.events[i].time <= 2.5);
    CHECK(traj.events[i].index < 37);
  }

  // Poisson superposition: mean event count k * horizon over many seeds.
  const std::int64_t seeds = 10000;
  std::int64_t total = 0;
  for (std::int64_t s = 0; s < seeds; ++s)
    total += static_cast<std::int64_t>(
        simulate_trajectory(100, 0.5, 1.0,
                            derive_stream(42, static_cast<std::uint64_t>(s)))
            .events.size());
  const double mean = static_cast<double>(total) / static_cast<double>(seeds);
  const double sigma = 10.0 / std::sqrt(static_cast<double>(seeds));
  CHECK(std::abs(mean - 100.0) < 3.0 * sigma);
}

TEST_CASE("replaying events reconstructs the final sum") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const auto traj = simulate_trajectory(25, 0.6, 1.7, seed);
    const auto fin = traj.final_bits();
    const auto popcount =
        std::accumulate(fin.begin(), fin.end(), std::int64_t{0});
    std::int64_t replay = traj.initial_sum();
    auto bits = traj.initial_bits;
    for (const auto& e : traj.events) {
      replay += static_cast<std::int64_t>(e.value) - bits[e.index];
      bits[e.index] = e.value;
    }
    CHECK(replay == popcount);
  }
}

TEST_CASE("hits_level exactness") {
  using dynbit::timeset::TimeSet;

  // No events: hit iff the initial sum matches, on any nonempty F.
  Trajectory still;
  still.k = 3;
  still.p = 0.5;
  still.horizon = 1.0;
  still.initial_bits = {1, 0, 1};
  CHECK(hits_level(still, 2, TimeSet::unit_interval()));
  CHECK(hits_level(still, 2, TimeSet::points({0.0})));
  CHECK_FALSE(hits_level(still, 1, TimeSet::unit_interval()));

  // Sum equals the level only on [0.2, 0.3); F beyond it misses.
  Trajectory seg;
  seg.k = 1;
  seg.p = 0.5;
  seg.horizon = 1.0;
  seg.initial_bits = {0};
  seg.events.push_back({0.2, 0, 1});
  seg.events.push_back({0.3, 0, 0});
  CHECK(hits_level(seg, 1, TimeSet::intervals({{0.2, 0.25}})));
  CHECK_FALSE(hits_level(seg, 1, TimeSet::intervals({{0.5, 0.9}})));
  CHECK_FALSE(hits_level(seg, 1, TimeSet::points({0.3})));  // right-continuous
  CHECK(hits_level(seg, 0, TimeSet::points({0.3})));

  CHECK_THROWS_AS(hits_level(seg, 1, TimeSet::intervals({{0.5, 1.5}})),
                  std::domain_error);

  // Randomized cross-check against pointwise evaluation on finite F.
  Rng rng(777);
  for (int rep = 0; rep < 1000; ++rep) {
    const std::int64_t k = 1 + static_cast<std::int64_t>(rng.uniform_index(6));
    const auto traj = simulate_trajectory(k, 0.4, 1.0, rng.next_u64());
    std::vector<double> pts;
    for (int i = 0; i < 4; ++i) pts.push_back(rng.uniform());
    const auto F = TimeSet::points(pts);
    const auto level = static_cast<std::int64_t>(
        rng.uniform_index(static_cast<std::uint64_t>(k) + 1));

    // Pointwise oracle: evaluate S at each point by replay.
    bool expect = false;
    for (double t : pts) {
      auto bits = traj.initial_bits;
      for (const auto& e : traj.events) {
        if (e.time > t) break;
        bits[e.index] = e.value;
      }
      const auto sum =
          std::accumulate(bits.begin(), bits.end(), std::int64_t{0});
      if (sum == level) expect = true;
    }
    CHECK(hits_level(traj, level, F) == expect);
  }
}

TEST_CASE("one-time marginal matches the kernel (chi-square)") {
  // Aggregated expected counts: initial sums are observed, each trial then
  // transitions through the kernel for the fixed gap.
  const std::int64_t k = 6;
  const double p = 0.4;
  const double t = 0.8;
  const std::int64_t trials = 100000;

  std::vector<std::int64_t> initial_counts(static_cast<std::size_t>(k) + 1, 0);
  std::vector<std::int64_t> final_counts(static_cast<std::size_t>(k) + 1, 0);
  for (std::int64_t trial = 0; trial < trials; ++trial) {
    const auto traj = simulate_trajectory(
        k, p, t, derive_stream(314159, static_cast<std::uint64_t>(trial)));
    ++initial_counts[static_cast<std::size_t>(traj.initial_sum())];
    const auto fin = traj.final_bits();
    ++final_counts[static_cast<std::size_t>(
        std::accumulate(fin.begin(), fin.end(), std::int64_t{0}))];
  }

  std::vector<double> expected(static_cast<std::size_t>(k) + 1, 0.0);
  for (std::int64_t a = 0; a <= k; ++a) {
    if (initial_counts[static_cast<std::size_t>(a)] == 0) continue;
    const auto row = sum_transition_kernel(k, a, t, p);
    for (std::int64_t b = 0; b <= k; ++b)
      expected[static_cast<std::size_t>(b)] +=
          static_cast<double>(initial_counts[static_cast<std::size_t>(a)]) *
          row.probs[static_cast<std::size_t>(b)];
  }

  double chi2 = 0.0;
  int bins = 0;
  for (std::int64_t b = 0; b <= k; ++b) {
    const double e = expected[static_cast<std::size_t>(b)];
    if (e < 5.0) continue;
    const double o =
        static_cast<double>(final_counts[static_cast<std::size_t>(b)]);
    chi2 += (o - e) * (o - e) / e;
    ++bins;
  }
  REQUIRE(bins >= 3);
  CHECK(chi2 < testutil::chi2_critical(static_cast<double>(bins - 1)));
}
