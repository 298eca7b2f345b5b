// Parity-block process over a block scheme m: block k carries the XOR of the
// dynamical bits with indices in [m(k), m(k+1)). At p = 1/2 a clock tick
// flips the block parity with probability 1/2, so parities are simulated
// directly as two-state chains with flip rate (block size)/2.
//
// Also the product kernels attached to the scheme: the gap product
// f_n(lambda) = prod (1 - exp(-m(k)|lambda|)), the product kernel
// prod (1 + exp(-m(k)|lambda|)) behind the I-energy, and the quadratic forms
// I and J of a discrete measure.
#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "dynbit/block_scheme.hpp"
#include "dynbit/energy.hpp"

namespace dynbit::parity {

inline constexpr std::int64_t kInfiniteProduct = -1;

// prod_{k=1..n} (1 - exp(-m(k)|lambda|)); n = kInfiniteProduct truncates once
// the factors pass 1 - 1e-16.
double f_n(const BlockScheme& scheme, std::int64_t n, double lambda);

// prod_{k=1..n} (1 + exp(-m(k)|lambda|)); the I-kernel at lambda = |t - s|.
// Returns +infinity for lambda = 0 with an infinite product.
double riesz_product(const BlockScheme& scheme, std::int64_t n, double lambda);

struct EnergyIJ {
  double I = 0.0;          // off-diagonal sum + truncated diagonal kernel
  double J = 0.0;          // off-diagonal sum (the Laplace kernel diverges at 0)
  double I_offdiag = 0.0;
  double J_offdiag = 0.0;
  double diagonal_mass = 0.0;  // measure mass sitting on coincident pairs
  bool diagonal_flag = false;
};

EnergyIJ energy_I_J(const BlockScheme& scheme,
                    const energy::DiscreteMeasure& mu);

// C from 4 / C = integral over s >= m(2) of exp(-D s) dg(s), for the lower
// kernel sandwich constant 4 (1 + C).
double sandwich_C(const BlockScheme& scheme, double diameter);

// Per-block parity flip times over [0, horizon]; exposed for distribution
// tests.
struct ParityTrajectory {
  int n_blocks = 0;
  std::vector<std::uint8_t> initial;             // B_k(0)
  std::vector<std::vector<double>> flip_times;   // strictly increasing per block
};

ParityTrajectory simulate_parity_paths(const BlockScheme& scheme, int n_blocks,
                                       double horizon, std::uint64_t seed);

struct TmEstimate {
  std::int64_t n_blocks = 0;
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
  // estimates[n-1] = P{ exists t in [0,1]: B_k(t) = 0 for all k <= n };
  // monotone nonincreasing in n by construction (shared randomness).
  std::vector<double> estimates;
  double expected_flips_per_trial = 0.0;

  nlohmann::json to_json() const;
};

// Event-driven estimate of the all-blocks-zero hitting probabilities for
// every prefix depth n <= n_blocks at once.
TmEstimate simulate_T_m(const BlockScheme& scheme, int n_blocks,
                        std::int64_t trials, std::uint64_t seed,
                        int threads = 1);

}  // namespace dynbit::parity
