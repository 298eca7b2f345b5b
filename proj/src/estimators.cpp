#include "dynbit/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "dynbit/energy.hpp"
#include "dynbit/numeric.hpp"
#include "dynbit/parallel.hpp"
#include "dynbit/rng.hpp"

namespace dynbit::estimators {

namespace {

constexpr std::int64_t kMaxDpBits = 200;
constexpr std::size_t kMaxDpTimes = 4096;

// Row-indexed transition kernel of the sum chain for one time gap.
std::vector<std::vector<double>> kernel_matrix(std::int64_t k, double gap,
                                               double p) {
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(k) + 1);
  for (std::int64_t a = 0; a <= k; ++a)
    rows[static_cast<std::size_t>(a)] =
        process::sum_transition_kernel(k, a, gap, p).probs;
  return rows;
}

}  // namespace

double exact_hit_prob_finite(std::int64_t k, std::int64_t level, double p,
                             std::span<const double> times) {
  if (k < 1 || k > kMaxDpBits)
    throw std::domain_error("exact_hit_prob_finite: k out of range");
  if (level < 0 || level > k)
    throw std::domain_error("exact_hit_prob_finite: need 0 <= level <= k");
  if (times.empty() || times.size() > kMaxDpTimes)
    throw std::domain_error("exact_hit_prob_finite: bad time grid size");
  for (std::size_t j = 0; j < times.size(); ++j) {
    if (times[j] < 0.0 || (j > 0 && times[j] <= times[j - 1]))
      throw std::domain_error(
          "exact_hit_prob_finite: times must be sorted, distinct, >= 0");
  }

  // Stationary law at the first observation time.
  std::vector<double> survive = binomial_pmf(k, p);
  const auto lvl = static_cast<std::size_t>(level);
  survive[lvl] = 0.0;

  std::map<double, std::vector<std::vector<double>>> kernels;
  for (std::size_t j = 1; j < times.size(); ++j) {
    const double gap = times[j] - times[j - 1];
    auto it = kernels.find(gap);
    if (it == kernels.end())
      it = kernels.emplace(gap, kernel_matrix(k, gap, p)).first;
    const auto& rows = it->second;

    std::vector<double> next(static_cast<std::size_t>(k) + 1, 0.0);
    for (std::size_t a = 0; a <= static_cast<std::size_t>(k); ++a) {
      const double mass = survive[a];
      if (mass == 0.0) continue;
      const auto& row = rows[a];
      for (std::size_t b = 0; b <= static_cast<std::size_t>(k); ++b)
        next[b] += mass * row[b];
    }
    next[lvl] = 0.0;
    survive = std::move(next);
  }

  double alive = 0.0;
  for (double v : survive) alive += v;
  return std::clamp(1.0 - alive, 0.0, 1.0);
}

nlohmann::json HitProbEstimate::to_json() const {
  return {{"k", k},       {"ell", ell},     {"p", p},
          {"trials", trials}, {"hits", hits},   {"p_hat", p_hat},
          {"ci_lo", ci_lo},   {"ci_hi", ci_hi}, {"seed", seed}};
}

HitProbEstimate mc_hit_prob(std::int64_t k, std::int64_t ell, double p,
                            const timeset::TimeSet& F, std::int64_t trials,
                            std::uint64_t seed, int threads) {
  if (trials < 1) throw std::domain_error("mc_hit_prob: trials must be >= 1");
  if (ell < 0 || ell > k)
    throw std::domain_error("mc_hit_prob: need 0 <= ell <= k");
  if (F.empty()) throw std::domain_error("mc_hit_prob: empty time set");

  const double horizon = F.sup();
  const std::int64_t level = k - ell;
  const std::int64_t hits =
      parallel_count(trials, threads, [&](std::int64_t trial) -> std::int64_t {
        const auto traj = process::simulate_trajectory(
            k, p, horizon, derive_stream(seed, static_cast<std::uint64_t>(trial)));
        return process::hits_level(traj, level, F) ? 1 : 0;
      });

  HitProbEstimate est;
  est.k = k;
  est.ell = ell;
  est.p = p;
  est.trials = trials;
  est.hits = hits;
  est.p_hat = static_cast<double>(hits) / static_cast<double>(trials);
  const auto ci = wilson95(hits, trials);
  est.ci_lo = ci.lo;
  est.ci_hi = ci.hi;
  est.seed = seed;
  return est;
}

nlohmann::json ScalingReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& e : entries) {
    rows.push_back({{"k", e.k},
                    {"p_hat", e.p_hat},
                    {"ci_lo", e.ci_lo},
                    {"ci_hi", e.ci_hi},
                    {"hits", e.hits},
                    {"trials", e.trials},
                    {"theory", e.theory},
                    {"ratio", e.ratio}});
  }
  return {{"target", target}, {"entries", rows},     {"band_lo", band_lo},
          {"band_hi", band_hi}, {"slope", slope},     {"warnings", warnings}};
}

namespace {

void finalize_report(ScalingReport& rep) {
  rep.band_lo = std::numeric_limits<double>::infinity();
  rep.band_hi = -std::numeric_limits<double>::infinity();
  std::vector<double> lx, ly;
  for (const auto& e : rep.entries) {
    if (e.ratio > 0.0) {
      rep.band_lo = std::min(rep.band_lo, e.ratio);
      rep.band_hi = std::max(rep.band_hi, e.ratio);
    }
    if (e.p_hat > 0.0) {
      lx.push_back(std::log(static_cast<double>(e.k)));
      ly.push_back(std::log(e.p_hat));
    }
    if (e.hits < 50)
      rep.warnings.push_back("insufficient hits at k=" + std::to_string(e.k));
  }
  rep.slope = lx.size() >= 2 ? least_squares_slope(lx, ly) : 0.0;
}

}  // namespace

ScalingReport verify_thm1(const timeset::TimeSet& F, double p,
                          std::int64_t ell,
                          std::span<const std::int64_t> k_grid,
                          std::int64_t trials, std::uint64_t seed,
                          int threads) {
  ScalingReport rep;
  rep.target = "thm1";
  std::uint64_t salt = 0;
  for (std::int64_t k : k_grid) {
    const auto est =
        mc_hit_prob(k, ell, p, F, trials, derive_stream(seed, salt++), threads);
    ScalingEntry e;
    e.k = k;
    e.p_hat = est.p_hat;
    e.ci_lo = est.ci_lo;
    e.ci_hi = est.ci_hi;
    e.hits = est.hits;
    e.trials = est.trials;
    const double cap = static_cast<double>(
        timeset::kolmogorov_capacity(F, 1.0 / static_cast<double>(k)));
    e.theory = cap *
               std::exp(static_cast<double>(ell) *
                            std::log(static_cast<double>(k)) +
                        static_cast<double>(k) * std::log(p));
    e.ratio = e.theory > 0.0 ? e.p_hat / e.theory : 0.0;
    rep.entries.push_back(e);
  }
  finalize_report(rep);
  return rep;
}

nlohmann::json ReturnAsymptotics::to_json() const {
  nlohmann::json out_rows = nlohmann::json::array();
  for (const auto& r : rows) {
    out_rows.push_back({{"k", r.k},
                        {"t", r.t},
                        {"exact", r.exact},
                        {"bound", r.bound},
                        {"ratio", r.ratio}});
  }
  return {{"rows", out_rows},
          {"min_ratio", min_ratio},
          {"max_ratio", max_ratio}};
}

ReturnAsymptotics verify_return_asymptotics(
    std::span<const std::int64_t> k_grid, std::span<const double> t_grid) {
  ReturnAsymptotics out;
  out.min_ratio = std::numeric_limits<double>::infinity();
  out.max_ratio = 0.0;
  for (std::int64_t k : k_grid) {
    if (k < 2 || k % 2 != 0)
      throw std::domain_error("verify_return_asymptotics: k must be even >= 2");
    // Default per-k grid: 20 log-spaced times spanning [1/k, 1].
    std::vector<double> default_grid;
    if (t_grid.empty()) {
      const int pts = 20;
      const double lo = 1.0 / static_cast<double>(k);
      for (int i = 0; i < pts; ++i)
        default_grid.push_back(
            lo * std::pow(1.0 / lo, static_cast<double>(i) / (pts - 1)));
    }
    const std::span<const double> ts =
        t_grid.empty() ? std::span<const double>(default_grid) : t_grid;
    for (double t : ts) {
      ReturnAsymptoticsRow row;
      row.k = k;
      row.t = t;
      row.exact = process::conditional_return_prob(k, k / 2, t, 0.5);
      row.bound =
          t == 0.0 ? 1.0
                   : std::min(1.0, 1.0 / std::sqrt(static_cast<double>(k) * t));
      row.ratio = row.exact / row.bound;
      out.min_ratio = std::min(out.min_ratio, row.ratio);
      out.max_ratio = std::max(out.max_ratio, row.ratio);
      out.rows.push_back(row);
    }
  }
  return out;
}

ScalingReport verify_thm3(const timeset::TimeSet& F,
                          std::span<const std::int64_t> k_grid,
                          std::int64_t trials, std::uint64_t seed,
                          int threads) {
  ScalingReport rep;
  rep.target = "thm3";
  std::uint64_t salt = 0;
  for (std::int64_t k : k_grid) {
    if (k < 2 || k % 2 != 0)
      throw std::domain_error("verify_thm3: k must be even >= 2");
    const auto est = mc_hit_prob(k, k / 2, 0.5, F, trials,
                                 derive_stream(seed, salt++), threads);
    // Grid density tracks the 1/k kernel scale.
    const int grid_n = static_cast<int>(std::min<std::int64_t>(
        4096, std::max<std::int64_t>(256, 4 * k)));
    const auto me = energy::min_energy(
        F, energy::Kernel::sqrt_clamp(static_cast<double>(k)), 1.0, grid_n);
    ScalingEntry e;
    e.k = k;
    e.p_hat = est.p_hat;
    e.ci_lo = est.ci_lo;
    e.ci_hi = est.ci_hi;
    e.hits = est.hits;
    e.trials = est.trials;
    e.theory = 1.0 / (std::sqrt(static_cast<double>(k)) * me.value);
    e.ratio = est.p_hat * std::sqrt(static_cast<double>(k)) * me.value;
    rep.entries.push_back(e);
  }
  finalize_report(rep);
  return rep;
}

}  // namespace dynbit::estimators
