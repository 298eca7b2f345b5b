#include "dynbit/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dynbit/lp.hpp"
#include "dynbit/numeric.hpp"

namespace dynbit::energy {

Kernel Kernel::psi(double s) {
  if (!(s > 0.0)) throw std::domain_error("psi kernel: s must be positive");
  Kernel k;
  k.kind_ = Kind::PsiS;
  k.param_ = s;
  return k;
}

Kernel Kernel::sqrt_clamp(double k_bits) {
  if (!(k_bits >= 1.0))
    throw std::domain_error("sqrt_clamp kernel: k must be >= 1");
  Kernel k;
  k.kind_ = Kind::SqrtClamp;
  k.param_ = k_bits;
  return k;
}

Kernel Kernel::laplace_stieltjes(
    std::shared_ptr<const parity::BlockScheme> scheme) {
  if (!scheme) throw std::domain_error("laplace kernel: null scheme");
  Kernel k;
  k.kind_ = Kind::LaplaceStieltjes;
  k.scheme_ = std::move(scheme);
  return k;
}

double Kernel::operator()(double x) const {
  const double a = std::abs(x);
  switch (kind_) {
    case Kind::PsiS:
      if (a <= 1.0) return 1.0;
      return std::pow(a, -param_);
    case Kind::SqrtClamp: {
      const double v = param_ * a;
      if (v <= 1.0) return 1.0;
      return 1.0 / std::sqrt(v);
    }
    case Kind::LaplaceStieltjes:
      if (a == 0.0) return std::numeric_limits<double>::infinity();
      return parity::laplace_g(*scheme_, a);
  }
  return 0.0;
}

void DiscreteMeasure::validate(const timeset::TimeSet& F) const {
  if (atoms.size() != weights.size() || atoms.empty())
    throw std::domain_error("measure: atoms/weights size mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (i > 0 && atoms[i] < atoms[i - 1])
      throw std::domain_error("measure: atoms must be sorted");
    if (weights[i] < 0.0)
      throw std::domain_error("measure: weights must be nonnegative");
    if (!F.contains(atoms[i]))
      throw std::domain_error("measure: atom outside the support set");
    total += weights[i];
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::domain_error("measure: weights must sum to 1");
}

double energy(const DiscreteMeasure& mu, const Kernel& kernel, double r) {
  if (!(r > 0.0)) throw std::domain_error("energy: r must be positive");
  const auto n = mu.atoms.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (mu.weights[i] == 0.0) continue;
    total += mu.weights[i] * mu.weights[i] * kernel(0.0);
    for (std::size_t j = i + 1; j < n; ++j) {
      if (mu.weights[j] == 0.0) continue;
      total += 2.0 * mu.weights[i] * mu.weights[j] *
               kernel((mu.atoms[i] - mu.atoms[j]) / r);
    }
  }
  return total;
}

std::vector<double> candidate_atoms(const timeset::TimeSet& F, int grid_n,
                                    int cap) {
  if (F.empty()) throw std::domain_error("candidate_atoms: empty set");
  if (grid_n < 2 && F.components().size() > 1)
    throw std::domain_error("candidate_atoms: grid_n must be >= 2");
  const int budget = std::max(2, std::min(grid_n, cap));

  std::vector<double> atoms;
  switch (F.kind()) {
    case timeset::TimeSet::Kind::Points:
      for (const auto& iv : F.components()) atoms.push_back(iv.lo);
      if (static_cast<int>(atoms.size()) > cap)
        throw std::domain_error("candidate_atoms: point set exceeds grid cap");
      break;
    case timeset::TimeSet::Kind::Cantor: {
      const auto& cp = *F.cantor_params();
      // At full depth the grid is the level-d midpoints and endpoints; when
      // that exceeds the budget, fall back to the endpoints of the finest
      // coarser level that fits (endpoints persist in deeper approximants).
      if (3LL * (1LL << cp.depth) <= budget) {
        for (const auto& iv : F.components()) {
          atoms.push_back(iv.lo);
          atoms.push_back(0.5 * (iv.lo + iv.hi));
          atoms.push_back(iv.hi);
        }
      } else {
        int level = cp.depth;
        while (level > 0 && 2LL * (1LL << level) > budget) --level;
        const auto coarse =
            timeset::TimeSet::cantor(cp.left, cp.length, cp.ratio, level);
        for (const auto& iv : coarse.components()) {
          atoms.push_back(iv.lo);
          atoms.push_back(iv.hi);
        }
      }
      break;
    }
    case timeset::TimeSet::Kind::Intervals: {
      double total_len = 0.0;
      for (const auto& iv : F.components()) total_len += iv.hi - iv.lo;
      for (const auto& iv : F.components()) {
        const double len = iv.hi - iv.lo;
        if (len == 0.0) {
          atoms.push_back(iv.lo);
          continue;
        }
        const int n_i =
            total_len > 0.0
                ? std::max(2, static_cast<int>(std::lround(
                                  static_cast<double>(budget) * len /
                                  total_len)))
                : 2;
        for (int j = 0; j < n_i; ++j)
          atoms.push_back(iv.lo + len * static_cast<double>(j) /
                                      static_cast<double>(n_i - 1));
      }
      break;
    }
  }
  std::sort(atoms.begin(), atoms.end());
  atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
  return atoms;
}

namespace {

// Shared Frank-Wolfe state on a fixed atom grid.
struct FwState {
  const std::vector<double>& atoms;
  const Kernel& kernel;
  double r;
  std::vector<double> w;
  std::vector<double> phi;  // potentials K w
  double value = 0.0;       // w' K w

  double col(std::size_t i, std::size_t j) const {
    return kernel((atoms[i] - atoms[j]) / r);
  }

  void recompute() {
    const auto n = atoms.size();
    std::fill(phi.begin(), phi.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (w[j] == 0.0) continue;
      for (std::size_t i = 0; i < n; ++i) phi[i] += w[j] * col(i, j);
    }
    value = 0.0;
    for (std::size_t i = 0; i < n; ++i) value += w[i] * phi[i];
  }
};

}  // namespace

MinEnergyResult min_energy(const timeset::TimeSet& F, const Kernel& kernel,
                           double r, int grid_n, double gap_tol,
                           std::int64_t max_iter) {
  if (!(r > 0.0)) throw std::domain_error("min_energy: r must be positive");
  const auto atoms = candidate_atoms(F, grid_n, 16384);
  const auto n = atoms.size();
  if (n == 0) throw std::domain_error("min_energy: empty candidate grid");

  MinEnergyResult res;
  if (n == 1) {
    res.measure = {atoms, {1.0}};
    res.value = kernel(0.0);
    res.gap = 0.0;
    res.iterations = 0;
    return res;
  }

  FwState st{atoms, kernel, r, std::vector<double>(n, 1.0 / n),
             std::vector<double>(n, 0.0), 0.0};
  st.recompute();

  const double k0 = kernel(0.0);
  std::int64_t iter = 0;
  double gap = std::numeric_limits<double>::infinity();
  for (; iter < max_iter; ++iter) {
    // Toward vertex: smallest potential. Away vertex: largest potential on
    // the support.
    std::size_t vt = 0, va = n;
    double phi_min = std::numeric_limits<double>::infinity();
    double phi_max = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (st.phi[i] < phi_min) {
        phi_min = st.phi[i];
        vt = i;
      }
      if (st.w[i] > 0.0 && st.phi[i] > phi_max) {
        phi_max = st.phi[i];
        va = i;
      }
    }
    gap = 2.0 * (st.value - phi_min);
    if (gap < gap_tol) {
      // Verify against exactly recomputed potentials before accepting.
      st.recompute();
      phi_min = *std::min_element(st.phi.begin(), st.phi.end());
      gap = 2.0 * (st.value - phi_min);
      if (gap < gap_tol) break;
      continue;
    }

    const double toward_gain = st.value - phi_min;
    const double away_gain = phi_max - st.value;
    if (toward_gain >= away_gain || va == n) {
      // d = e_vt - w; exact line search for the quadratic.
      const double lin = phi_min - st.value;           // w'Kd
      const double quad = k0 - 2.0 * phi_min + st.value;  // d'Kd
      double gamma = quad > 0.0 ? -lin / quad : 1.0;
      gamma = std::clamp(gamma, 0.0, 1.0);
      if (gamma == 0.0) break;
      for (std::size_t i = 0; i < n; ++i) {
        st.w[i] *= (1.0 - gamma);
        st.phi[i] = (1.0 - gamma) * st.phi[i] + gamma * st.col(i, vt);
      }
      st.w[vt] += gamma;
      st.value = (1.0 - gamma) * (1.0 - gamma) * st.value +
                 2.0 * gamma * (1.0 - gamma) * phi_min + gamma * gamma * k0;
    } else {
      // Away step: d = w - e_va, step limited by w_va.
      const double lin = st.value - phi_max;
      const double quad = st.value - 2.0 * phi_max + k0;
      const double gamma_max = st.w[va] / (1.0 - st.w[va]);
      double gamma = quad > 0.0 ? -lin / quad : gamma_max;
      gamma = std::clamp(gamma, 0.0, gamma_max);
      if (gamma == 0.0) break;
      for (std::size_t i = 0; i < n; ++i) {
        st.w[i] *= (1.0 + gamma);
        st.phi[i] = (1.0 + gamma) * st.phi[i] - gamma * st.col(i, va);
      }
      st.w[va] -= gamma;
      if (st.w[va] < 1e-16) st.w[va] = 0.0;
      st.value = (1.0 + gamma) * (1.0 + gamma) * st.value -
                 2.0 * gamma * (1.0 + gamma) * phi_max + gamma * gamma * k0;
    }
    if ((iter & 0xFFFF) == 0xFFFF) st.recompute();  // kill drift
  }

  st.recompute();
  const double phi_min = *std::min_element(st.phi.begin(), st.phi.end());
  res.gap = 2.0 * (st.value - phi_min);
  res.value = st.value;
  res.iterations = iter;
  res.measure.atoms = atoms;
  res.measure.weights = st.w;
  // Renormalize away accumulated rounding in the weights.
  double total = 0.0;
  for (double wi : res.measure.weights) total += wi;
  for (double& wi : res.measure.weights) wi /= total;
  return res;
}

PackingSolution weighted_packing(const timeset::TimeSet& F, double s, double r,
                                 int grid_n) {
  if (!(r > 0.0))
    throw std::domain_error("weighted_packing: r must be positive");
  const auto atoms =
      candidate_atoms(F, grid_n, static_cast<int>(lp::kMaxLpSize));
  const auto n = atoms.size();
  if (n > lp::kMaxLpSize)
    throw std::domain_error("weighted_packing: grid exceeds LP size cap");

  const auto kernel = Kernel::psi(s);
  std::vector<double> A(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    A[i * n + i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = kernel((atoms[i] - atoms[j]) / r);
      A[i * n + j] = v;
      A[j * n + i] = v;
    }
  }
  const auto lp_res = lp::solve_packing_lp(A, n);

  PackingSolution sol;
  sol.points = atoms;
  sol.weights = lp_res.w;
  sol.value = lp_res.value;
  sol.r = r;
  sol.s = s;
  sol.max_row_violation = lp_res.max_row_violation;
  sol.lp_method = lp_res.method;
  return sol;
}

DimProfile box_dim_profile(const timeset::TimeSet& F, double s,
                           const std::vector<double>& r_grid, int grid_cap) {
  if (r_grid.size() < 3)
    throw std::domain_error("box_dim_profile: need at least 3 scales");
  for (std::size_t i = 1; i < r_grid.size(); ++i)
    if (!(r_grid[i] < r_grid[i - 1]))
      throw std::domain_error("box_dim_profile: r grid must decrease");
  if (std::log(r_grid.front() / r_grid.back()) < 3.0 * std::log(10.0) - 1e-9)
    throw std::domain_error("box_dim_profile: grid must span >= 3 decades");

  DimProfile prof;
  prof.r_grid = r_grid;
  for (double r : r_grid) {
    // Row sums of the kernel matrix converge once the grid carries a few
    // atoms per sqrt(r * diam) cell, so the density grows like 1/sqrt(r)
    // until the LP cap binds.
    const int want = static_cast<int>(std::min<double>(
        grid_cap,
        std::max(64.0, std::ceil(30.0 * F.diameter() / std::sqrt(r)))));
    const auto pack = weighted_packing(F, s, r, want);
    prof.packing_values.push_back(pack.value);
    const auto me = min_energy(F, Kernel::psi(s), r,
                               static_cast<int>(pack.points.size()), 1e-6);
    prof.energy_values.push_back(me.value);
  }

  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    lx.push_back(std::log(1.0 / r_grid[i]));
    ly.push_back(std::log(prof.packing_values[i]));
  }
  const auto win = window_slopes(lx, ly, std::log(10.0));
  prof.gamma = win.min_slope;
  prof.delta = win.max_slope;
  return prof;
}

}  // namespace dynbit::energy
