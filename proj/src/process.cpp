#include "dynbit/process.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "dynbit/numeric.hpp"
#include "dynbit/rng.hpp"

namespace dynbit::process {

namespace {

constexpr std::int64_t kMaxClosedFormBits = 1000000;
constexpr std::int64_t kMaxKernelBits = 20000;  // kernel is O(k^2)

void check_p(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("p must lie in the open interval (0, 1)");
}

void check_t(double t) {
  if (!(t >= 0.0)) throw std::domain_error("t must be >= 0");
}

}  // namespace

TransitionParams transition_params(double p, double t) {
  check_p(p);
  check_t(t);
  const double et = std::exp(-t);
  return {p, t, p * (1.0 - et), p + (1.0 - p) * et};
}

std::array<std::array<double, 2>, 2> transition_matrix(double p, double t) {
  const auto tp = transition_params(p, t);
  return {{{1.0 - tp.theta, tp.theta}, {1.0 - tp.kappa, tp.kappa}}};
}

double conditional_return_prob(std::int64_t k, std::int64_t ell, double t,
                               double p) {
  if (k < 1 || k > kMaxClosedFormBits)
    throw std::domain_error("conditional_return_prob: k out of range");
  if (ell < 0 || ell > k)
    throw std::domain_error("conditional_return_prob: need 0 <= ell <= k");
  const auto tp = transition_params(p, t);

  const std::int64_t imax = std::min(ell, k - ell);
  std::vector<double> log_terms;
  log_terms.reserve(static_cast<std::size_t>(imax) + 1);
  for (std::int64_t i = 0; i <= imax; ++i) {
    const double lt =
        log_binom(ell, i) + log_pow(tp.theta, static_cast<double>(i)) +
        log_pow(1.0 - tp.theta, static_cast<double>(ell - i)) +
        log_binom(k - ell, i) +
        log_pow(tp.kappa, static_cast<double>(k - ell - i)) +
        log_pow(1.0 - tp.kappa, static_cast<double>(i));
    if (lt != kNegInf) log_terms.push_back(lt);
  }
  const double logp = log_sum_exp(log_terms);
  return logp == kNegInf ? 0.0 : std::min(1.0, std::exp(logp));
}

SumDistribution sum_transition_kernel(std::int64_t k, std::int64_t a, double t,
                                      double p) {
  if (k < 1 || k > kMaxKernelBits)
    throw std::domain_error("sum_transition_kernel: k out of range");
  if (a < 0 || a > k)
    throw std::domain_error("sum_transition_kernel: need 0 <= a <= k");
  const auto tp = transition_params(p, t);

  const auto ones = binomial_pmf(a, tp.kappa);        // bits staying 1
  const auto zeros = binomial_pmf(k - a, tp.theta);   // bits turning 1
  SumDistribution out;
  out.k = k;
  out.probs.assign(static_cast<std::size_t>(k) + 1, 0.0);
  for (std::size_t i = 0; i < ones.size(); ++i) {
    if (ones[i] == 0.0) continue;
    for (std::size_t j = 0; j < zeros.size(); ++j)
      out.probs[i + j] += ones[i] * zeros[j];
  }
  return out;
}

std::int64_t Trajectory::initial_sum() const {
  return std::accumulate(initial_bits.begin(), initial_bits.end(),
                         std::int64_t{0});
}

std::vector<std::uint8_t> Trajectory::final_bits() const {
  std::vector<std::uint8_t> bits = initial_bits;
  for (const auto& e : events) bits[e.index] = e.value;
  return bits;
}

nlohmann::json Trajectory::to_json() const {
  nlohmann::json j;
  j["k"] = k;
  j["p"] = p;
  j["horizon"] = horizon;
  j["seed"] = seed;
  j["initial_bits"] = initial_bits;
  auto times = nlohmann::json::array();
  auto indices = nlohmann::json::array();
  auto values = nlohmann::json::array();
  for (const auto& e : events) {
    times.push_back(e.time);
    indices.push_back(e.index);
    values.push_back(static_cast<int>(e.value));
  }
  j["events"] = {{"times", times}, {"indices", indices}, {"values", values}};
  return j;
}

Trajectory simulate_trajectory(std::int64_t k, double p, double horizon,
                               std::uint64_t seed) {
  if (k < 1) throw std::domain_error("simulate_trajectory: k must be >= 1");
  check_p(p);
  if (!(horizon >= 0.0))
    throw std::domain_error("simulate_trajectory: horizon must be >= 0");

  Rng rng(seed);
  Trajectory traj;
  traj.k = k;
  traj.p = p;
  traj.horizon = horizon;
  traj.seed = seed;
  traj.initial_bits.resize(static_cast<std::size_t>(k));
  for (auto& b : traj.initial_bits) b = rng.bernoulli(p) ? 1 : 0;

  const auto rate = static_cast<double>(k);
  double t = 0.0;
  for (;;) {
    t += rng.exponential(rate);
    if (t > horizon) break;
    Event e;
    e.time = t;
    e.index = static_cast<std::uint32_t>(rng.uniform_index(
        static_cast<std::uint64_t>(k)));
    e.value = rng.bernoulli(p) ? 1 : 0;
    traj.events.push_back(e);
  }
  return traj;
}

bool hits_level(const Trajectory& traj, std::int64_t level,
                const timeset::TimeSet& F) {
  if (F.empty()) return false;
  if (F.sup() > traj.horizon || F.inf() < 0.0)
    throw std::domain_error("hits_level: F exceeds the trajectory horizon");

  std::vector<std::uint8_t> bits = traj.initial_bits;
  std::int64_t sum = traj.initial_sum();
  double seg_start = 0.0;
  for (const auto& e : traj.events) {
    const std::int64_t next_sum =
        sum - bits[e.index] + static_cast<std::int64_t>(e.value);
    if (next_sum != sum) {
      // Maximal constancy interval [seg_start, e.time) just ended.
      if (sum == level && F.intersects_half_open(seg_start, e.time))
        return true;
      seg_start = e.time;
      sum = next_sum;
    }
    bits[e.index] = e.value;
  }
  return sum == level && F.intersects(seg_start, traj.horizon);
}

}  // namespace dynbit::process
