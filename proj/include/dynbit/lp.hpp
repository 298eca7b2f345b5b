// Dense solver for the weighted-packing linear program
//   maximize sum(w)  subject to  A w <= 1, w >= 0,
// where A is symmetric with unit diagonal (a kernel Gram matrix).
//
// Strategy: try the symmetric equilibrium solve A w = 1 first (when the
// solution is nonnegative it is optimal, with itself as the dual
// certificate), then an active-set refinement, then a dense primal simplex
// as the general fallback.
#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace dynbit::lp {

struct PackingLpResult {
  std::vector<double> w;
  double value = 0.0;
  std::string method;             // "equilibrium", "active-set" or "simplex"
  double max_row_violation = 0.0; // max over rows of (A w - 1)
  std::int64_t pivots = 0;
};

inline constexpr std::size_t kMaxLpSize = 2000;

// A is row-major n x n. Throws std::domain_error on size violations and
// std::runtime_error if the simplex exceeds its iteration budget.
PackingLpResult solve_packing_lp(const std::vector<double>& A, std::size_t n);

}  // namespace dynbit::lp
