// Exact probabilistic core of the dynamical bit sequence.
//
// A k-vector of Bernoulli(p) bits where each coordinate is resampled at the
// ticks of its own rate-one Poisson clock. This module provides the one-bit
// transition closed forms, the exact distribution of the bit sum after a time
// gap, and event-driven trajectory simulation with exact level-hit queries on
// the piecewise-constant sum path.
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <json.hpp>

#include "dynbit/timeset.hpp"

namespace dynbit::process {

// One-bit transition data at time gap t: theta is the probability that a bit
// currently 0 reads 1 after the gap, kappa that a bit currently 1 still
// reads 1.
struct TransitionParams {
  double p = 0.0;
  double t = 0.0;
  double theta = 0.0;
  double kappa = 1.0;
};

TransitionParams transition_params(double p, double t);

// Row-stochastic 2x2 matrix [[1-theta, theta], [1-kappa, kappa]]; satisfies
// the semigroup property P_s * P_t = P_{s+t}.
std::array<std::array<double, 2>, 2> transition_matrix(double p, double t);

// P{ S_k(t) = k-ell | S_k(0) = k-ell }, evaluated in log space; valid for
// k up to 1e6.
double conditional_return_prob(std::int64_t k, std::int64_t ell, double t,
                               double p);

// Distribution of the bit sum after time gap t, conditioned on the current
// sum being a: the convolution of Binomial(a, kappa_t) and
// Binomial(k-a, theta_t).
struct SumDistribution {
  std::int64_t k = 0;
  std::vector<double> probs;  // size k+1, sums to 1
};

SumDistribution sum_transition_kernel(std::int64_t k, std::int64_t a, double t,
                                      double p);

struct Event {
  double time = 0.0;       // in (0, horizon]
  std::uint32_t index = 0;  // bit index in [0, k)
  std::uint8_t value = 0;   // resampled bit value
};

struct Trajectory {
  std::int64_t k = 0;
  double p = 0.0;
  double horizon = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::uint8_t> initial_bits;
  std::vector<Event> events;  // strictly increasing times

  std::int64_t initial_sum() const;
  // Final bit vector after replaying all events.
  std::vector<std::uint8_t> final_bits() const;
  nlohmann::json to_json() const;
};

// Merged-clock simulation: one rate-k Poisson stream over [0, horizon], each
// tick resampling a uniformly chosen bit with a fresh Bernoulli(p) draw.
// Deterministic given the seed.
Trajectory simulate_trajectory(std::int64_t k, double p, double horizon,
                               std::uint64_t seed);

// True iff some maximal constancy interval of the sum path with value `level`
// meets F. Exact on the event representation.
bool hits_level(const Trajectory& traj, std::int64_t level,
                const timeset::TimeSet& F);

}  // namespace dynbit::process
