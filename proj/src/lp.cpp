#include "dynbit/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

namespace dynbit::lp {

namespace {

constexpr double kFeasTol = 1e-9;
constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-9;

double max_row_violation(const Eigen::MatrixXd& A, const Eigen::VectorXd& w) {
  return (A * w - Eigen::VectorXd::Ones(A.rows())).maxCoeff();
}

// Optimality certificate specific to symmetric A: y := w is dual feasible iff
// A w >= 1 on every row, and complementary slackness holds by construction
// when A w = 1 on the support.
bool certify_self_dual(const Eigen::MatrixXd& A, const Eigen::VectorXd& w) {
  if (w.minCoeff() < -kFeasTol) return false;
  const Eigen::VectorXd rows = A * w;
  return rows.maxCoeff() <= 1.0 + kFeasTol && rows.minCoeff() >= 1.0 - kDualTol;
}

PackingLpResult pack_result(const Eigen::MatrixXd& A, Eigen::VectorXd w,
                            std::string method, std::int64_t pivots) {
  w = w.cwiseMax(0.0);
  PackingLpResult res;
  res.w.assign(w.data(), w.data() + w.size());
  res.value = w.sum();
  res.method = std::move(method);
  res.max_row_violation = max_row_violation(A, w);
  res.pivots = pivots;
  return res;
}

// Primal simplex on the full tableau. Bounded because the unit diagonal
// forces w_i <= 1.
PackingLpResult simplex(const Eigen::MatrixXd& A) {
  const std::size_t n = static_cast<std::size_t>(A.rows());
  const std::size_t m = n;          // one row constraint per atom
  const std::size_t cols = n + m + 1;
  std::vector<double> tab((m + 1) * cols, 0.0);
  auto at = [&](std::size_t r, std::size_t c) -> double& {
    return tab[r * cols + c];
  };

  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) at(i, j) = A(i, j);
    at(i, n + i) = 1.0;
    at(i, cols - 1) = 1.0;
  }
  for (std::size_t j = 0; j < n; ++j) at(m, j) = -1.0;  // maximize sum(w)

  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;

  const std::int64_t max_pivots = 40 * static_cast<std::int64_t>(n) + 2000;
  std::int64_t pivots = 0;
  for (;; ++pivots) {
    if (pivots > max_pivots)
      throw std::runtime_error("packing LP simplex exceeded pivot budget");
    const bool bland = pivots > 10 * static_cast<std::int64_t>(n);

    // Entering column.
    std::size_t enter = cols;
    double best = -kPivotTol;
    for (std::size_t j = 0; j + 1 < cols; ++j) {
      const double rc = at(m, j);
      if (bland) {
        if (rc < -kPivotTol) {
          enter = j;
          break;
        }
      } else if (rc < best) {
        best = rc;
        enter = j;
      }
    }
    if (enter == cols) break;  // optimal

    // Ratio test with smallest-basis-index tie break.
    std::size_t leave = m;
    double best_ratio = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double a = at(i, enter);
      if (a <= kPivotTol) continue;
      const double ratio = at(i, cols - 1) / a;
      if (leave == m || ratio < best_ratio - 1e-12 ||
          (ratio < best_ratio + 1e-12 && basis[i] < basis[leave])) {
        leave = i;
        best_ratio = ratio;
      }
    }
    if (leave == m)
      throw std::runtime_error("packing LP unbounded; invalid kernel matrix");

    // Pivot.
    const double piv = at(leave, enter);
    for (std::size_t j = 0; j < cols; ++j) at(leave, j) /= piv;
    for (std::size_t r = 0; r <= m; ++r) {
      if (r == leave) continue;
      const double f = at(r, enter);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < cols; ++j) at(r, j) -= f * at(leave, j);
    }
    basis[leave] = enter;
  }

  Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] < n)
      w[static_cast<Eigen::Index>(basis[i])] = at(i, cols - 1);
  return pack_result(A, w, "simplex", pivots);
}

}  // namespace

PackingLpResult solve_packing_lp(const std::vector<double>& A_flat,
                                 std::size_t n) {
  if (n == 0) throw std::domain_error("packing LP: empty instance");
  if (n > kMaxLpSize)
    throw std::domain_error("packing LP: instance exceeds dense size cap");
  if (A_flat.size() != n * n)
    throw std::domain_error("packing LP: matrix size mismatch");

  Eigen::MatrixXd A(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          A_flat[i * n + j];

  // Equilibrium fast path: A w = 1 with nonnegative solution is self-dual
  // optimal.
  {
    Eigen::VectorXd w = A.ldlt().solve(Eigen::VectorXd::Ones(A.rows()));
    if ((A * w - Eigen::VectorXd::Ones(A.rows())).cwiseAbs().maxCoeff() <
            1e-8 &&
        w.minCoeff() >= -1e-11) {
      return pack_result(A, w, "equilibrium", 0);
    }

    // Active-set refinement: drop negative weights, re-solve on the support,
    // accept only with a full self-dual certificate.
    std::vector<bool> active(n, true);
    for (int round = 0; round < 64; ++round) {
      std::vector<Eigen::Index> idx;
      for (std::size_t i = 0; i < n; ++i)
        if (active[i]) idx.push_back(static_cast<Eigen::Index>(i));
      if (idx.empty()) break;
      Eigen::MatrixXd As(idx.size(), idx.size());
      for (std::size_t r = 0; r < idx.size(); ++r)
        for (std::size_t c = 0; c < idx.size(); ++c)
          As(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
              A(idx[r], idx[c]);
      Eigen::VectorXd ws =
          As.ldlt().solve(Eigen::VectorXd::Ones(As.rows()));
      if ((As * ws - Eigen::VectorXd::Ones(As.rows())).cwiseAbs().maxCoeff() >
          1e-8)
        break;  // singular subsystem; give up on this path
      bool all_nonneg = true;
      for (std::size_t r = 0; r < idx.size(); ++r) {
        if (ws[static_cast<Eigen::Index>(r)] < -1e-11) {
          active[static_cast<std::size_t>(idx[r])] = false;
          all_nonneg = false;
        }
      }
      if (!all_nonneg) continue;
      Eigen::VectorXd w_full = Eigen::VectorXd::Zero(A.rows());
      for (std::size_t r = 0; r < idx.size(); ++r)
        w_full[idx[r]] = std::max(0.0, ws[static_cast<Eigen::Index>(r)]);
      if (certify_self_dual(A, w_full))
        return pack_result(A, w_full, "active-set", round + 1);
      break;
    }
  }

  return simplex(A);
}

}  // namespace dynbit::lp
