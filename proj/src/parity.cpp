#include "dynbit/parity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <stdexcept>

#include "dynbit/errors.hpp"
#include "dynbit/parallel.hpp"
#include "dynbit/rng.hpp"

namespace dynbit::parity {

namespace {

constexpr double kFactorCutoff = 1e-16;  // stop infinite products here
constexpr double kDiagonalCap = 1e12;

double log_product(const BlockScheme& scheme, std::int64_t n, double lambda,
                   double sign) {
  // sum of log(1 + sign * exp(-m(k) lambda)) over k.
  const double a = std::abs(lambda);
  double total = 0.0;
  const auto kmax = static_cast<std::int64_t>(scheme.x_hi()) - 1;
  for (std::int64_t k = 1; n == kInfiniteProduct || k <= n; ++k) {
    if (k > kmax)
      throw std::domain_error(
          "block scheme product: n exceeds the tabulated range");
    const double e = std::exp(-scheme.m(static_cast<double>(k)) * a);
    total += std::log1p(sign * e);
    if (n == kInfiniteProduct && e < kFactorCutoff) break;
  }
  return total;
}

}  // namespace

double f_n(const BlockScheme& scheme, std::int64_t n, double lambda) {
  if (n != kInfiniteProduct && n < 1)
    throw std::domain_error("f_n: n must be >= 1 or infinite");
  if (lambda == 0.0) return 0.0;  // every factor vanishes
  return std::exp(log_product(scheme, n, lambda, -1.0));
}

double riesz_product(const BlockScheme& scheme, std::int64_t n,
                     double lambda) {
  if (n != kInfiniteProduct && n < 1)
    throw std::domain_error("riesz_product: n must be >= 1 or infinite");
  if (lambda == 0.0) {
    if (n == kInfiniteProduct)
      return std::numeric_limits<double>::infinity();
    return std::exp2(static_cast<double>(n));
  }
  return std::exp(log_product(scheme, n, lambda, +1.0));
}

EnergyIJ energy_I_J(const BlockScheme& scheme,
                    const energy::DiscreteMeasure& mu) {
  if (mu.atoms.size() != mu.weights.size() || mu.atoms.empty())
    throw std::domain_error("energy_I_J: bad measure");

  // Truncated diagonal kernel: grow the lambda=0 product until it passes the
  // cap.
  double diag_kernel = 1.0;
  while (diag_kernel < kDiagonalCap) diag_kernel *= 2.0;

  std::map<double, double> i_cache, j_cache;
  auto i_kernel = [&](double d) {
    auto it = i_cache.find(d);
    if (it == i_cache.end())
      it = i_cache.emplace(d, riesz_product(scheme, kInfiniteProduct, d)).first;
    return it->second;
  };
  auto j_kernel = [&](double d) {
    auto it = j_cache.find(d);
    if (it == j_cache.end()) it = j_cache.emplace(d, laplace_g(scheme, d)).first;
    return it->second;
  };

  EnergyIJ out;
  const auto n = mu.atoms.size();
  for (std::size_t i = 0; i < n; ++i) {
    out.diagonal_mass += mu.weights[i] * mu.weights[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = std::abs(mu.atoms[i] - mu.atoms[j]);
      const double ww = 2.0 * mu.weights[i] * mu.weights[j];
      if (d == 0.0) {
        out.diagonal_mass += ww;
        out.diagonal_flag = true;
        continue;
      }
      out.I_offdiag += ww * i_kernel(d);
      out.J_offdiag += ww * j_kernel(d);
    }
  }
  out.I = out.I_offdiag + out.diagonal_mass * diag_kernel;
  out.J = out.J_offdiag;
  return out;
}

double sandwich_C(const BlockScheme& scheme, double diameter) {
  if (!(diameter > 0.0))
    throw std::domain_error("sandwich_C: diameter must be positive");
  const double tail = laplace_g(scheme, diameter, 1e-8, 2.0);
  if (!(tail > 0.0))
    throw std::runtime_error("sandwich_C: tail integral underflowed");
  return 4.0 / tail;
}

namespace {

std::vector<double> block_rates(const BlockScheme& scheme, int n_blocks) {
  if (n_blocks < 1 || n_blocks > 63)
    throw std::domain_error("parity: n_blocks must lie in [1, 63]");
  std::vector<double> rates(static_cast<std::size_t>(n_blocks));
  double total_bits = 0.0;
  for (int k = 1; k <= n_blocks; ++k) {
    const double size = scheme.m(static_cast<double>(k + 1)) -
                        scheme.m(static_cast<double>(k));
    if (!(size > 0.0)) throw std::domain_error("parity: empty block");
    total_bits += size;
    rates[static_cast<std::size_t>(k - 1)] = 0.5 * size;  // parity flip rate
  }
  if (total_bits > 1e7)
    throw BudgetError("simulate_T_m: bit budget exceeded for this scheme");
  return rates;
}

}  // namespace

ParityTrajectory simulate_parity_paths(const BlockScheme& scheme, int n_blocks,
                                       double horizon, std::uint64_t seed) {
  const auto rates = block_rates(scheme, n_blocks);
  Rng rng(seed);
  ParityTrajectory traj;
  traj.n_blocks = n_blocks;
  traj.initial.resize(static_cast<std::size_t>(n_blocks));
  traj.flip_times.resize(static_cast<std::size_t>(n_blocks));
  for (auto& b : traj.initial) b = rng.bernoulli(0.5) ? 1 : 0;
  for (int k = 0; k < n_blocks; ++k) {
    double t = 0.0;
    for (;;) {
      t += rng.exponential(rates[static_cast<std::size_t>(k)]);
      if (t > horizon) break;
      traj.flip_times[static_cast<std::size_t>(k)].push_back(t);
    }
  }
  return traj;
}

nlohmann::json TmEstimate::to_json() const {
  return {{"n_blocks", n_blocks},
          {"trials", trials},
          {"seed", seed},
          {"estimates", estimates},
          {"expected_flips_per_trial", expected_flips_per_trial}};
}

TmEstimate simulate_T_m(const BlockScheme& scheme, int n_blocks,
                        std::int64_t trials, std::uint64_t seed, int threads) {
  if (trials < 1) throw std::domain_error("simulate_T_m: trials must be >= 1");
  const auto rates = block_rates(scheme, n_blocks);

  const auto nb = static_cast<std::size_t>(n_blocks);
  auto one_trial = [&](std::int64_t trial,
                       std::vector<std::int64_t>& depth_hist) {
    Rng rng(derive_stream(seed, static_cast<std::uint64_t>(trial)));

    // Bit k-1 of the mask is set while B_k != 0.
    std::uint64_t mask = 0;
    for (std::size_t k = 0; k < nb; ++k)
      if (rng.bernoulli(0.5)) mask |= (1ULL << k);

    auto depth_of = [&](std::uint64_t m) {
      const int tz = m == 0 ? 64 : std::countr_zero(m);
      return std::min<int>(tz, n_blocks);
    };
    int maxdepth = depth_of(mask);

    if (maxdepth < n_blocks) {
      using Item = std::pair<double, std::uint32_t>;
      std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
      for (std::size_t k = 0; k < nb; ++k) {
        const double t = rng.exponential(rates[k]);
        if (t <= 1.0) heap.emplace(t, static_cast<std::uint32_t>(k));
      }
      while (!heap.empty() && maxdepth < n_blocks) {
        const auto [t, k] = heap.top();
        heap.pop();
        mask ^= (1ULL << k);
        maxdepth = std::max(maxdepth, depth_of(mask));
        const double next = t + rng.exponential(rates[k]);
        if (next <= 1.0) heap.emplace(next, k);
      }
    }
    ++depth_hist[static_cast<std::size_t>(maxdepth)];
  };

  const auto hist = parallel_histogram(trials, threads, nb + 1, one_trial);

  TmEstimate est;
  est.n_blocks = n_blocks;
  est.trials = trials;
  est.seed = seed;
  est.estimates.resize(nb);
  std::int64_t at_least = 0;
  for (std::size_t n = nb; n >= 1; --n) {
    at_least += hist[n];
    est.estimates[n - 1] =
        static_cast<double>(at_least) / static_cast<double>(trials);
  }
  for (double r : rates) est.expected_flips_per_trial += r;
  return est;
}

}  // namespace dynbit::parity
