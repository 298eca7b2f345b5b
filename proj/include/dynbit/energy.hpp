// Kernels, discrete measures on time sets, energy minimization over the
// probability simplex, weighted kernel packings, and box-dimension profiles.
#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "dynbit/block_scheme.hpp"
#include "dynbit/timeset.hpp"

namespace dynbit::energy {

// Evaluation kernels. PsiS and SqrtClamp are even, nonincreasing in |x| and
// clamped to [0, 1]; the Laplace-Stieltjes kernel is unbounded near zero.
class Kernel {
 public:
  enum class Kind { PsiS, SqrtClamp, LaplaceStieltjes };

  static Kernel psi(double s);
  static Kernel sqrt_clamp(double k);
  static Kernel laplace_stieltjes(std::shared_ptr<const parity::BlockScheme> scheme);

  Kind kind() const { return kind_; }
  double param() const { return param_; }
  bool clamped() const { return kind_ != Kind::LaplaceStieltjes; }

  double operator()(double x) const;

 private:
  Kind kind_ = Kind::PsiS;
  double param_ = 1.0;
  std::shared_ptr<const parity::BlockScheme> scheme_;
};

struct DiscreteMeasure {
  std::vector<double> atoms;    // sorted
  std::vector<double> weights;  // nonnegative, sums to 1

  void validate(const timeset::TimeSet& F) const;
};

// Quadratic form sum_ij w_i w_j K((x_i - x_j)/r).
double energy(const DiscreteMeasure& mu, const Kernel& kernel, double r);

// Candidate atoms on F: equal spacing per interval component, level-depth
// midpoints and endpoints for Cantor sets (coarser-level endpoints when the
// cap binds), the points themselves for finite sets.
std::vector<double> candidate_atoms(const timeset::TimeSet& F, int grid_n,
                                    int cap);

struct MinEnergyResult {
  DiscreteMeasure measure;
  double value = 0.0;
  double gap = 0.0;  // Frank-Wolfe duality gap at termination
  std::int64_t iterations = 0;
};

// Approximate minimizer of the energy over probability measures on a finite
// grid of F, via Frank-Wolfe with away steps and exact line search.
MinEnergyResult min_energy(const timeset::TimeSet& F, const Kernel& kernel,
                           double r, int grid_n, double gap_tol = 1e-6,
                           std::int64_t max_iter = 500000);

struct PackingSolution {
  std::vector<double> points;
  std::vector<double> weights;
  double value = 0.0;  // sum of weights
  double r = 0.0;
  double s = 0.0;
  double max_row_violation = 0.0;
  std::string lp_method;
};

// Maximal total weight of a size-r weighted psi_s-packing supported on the
// candidate grid: the LP max sum(w) s.t. sum_j w_j psi_s((x_i-x_j)/r) <= 1.
PackingSolution weighted_packing(const timeset::TimeSet& F, double s, double r,
                                 int grid_n);

struct DimProfile {
  std::vector<double> r_grid;          // decreasing
  std::vector<double> packing_values;  // N_r from the LP route
  std::vector<double> energy_values;   // minimal energies on the same scales
  double gamma = 0.0;                  // lower profile estimate
  double delta = 0.0;                  // upper profile estimate
};

// Sliding-window slopes of log N_r vs log(1/r); grid density scales with 1/r
// up to the LP size cap.
DimProfile box_dim_profile(const timeset::TimeSet& F, double s,
                           const std::vector<double>& r_grid,
                           int grid_cap = 2000);

}  // namespace dynbit::energy
