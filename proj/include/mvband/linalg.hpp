#pragma once

#include <vector>

// Small dense solves for the omega oracle and the interpolation systems
// (all <= ~10x10, Vandermonde-like; partial pivoting suffices).

namespace mvband::detail {

struct DenseSolveResult {
  std::vector<double> x;
  int rank = 0;
  int nullity = 0;
  bool ok = false;  // full rank at the given tolerance
};

// Gaussian elimination with partial pivoting on A x = b. A pivot below
// rank_tol_rel * max|A_ij| ends elimination; rank/nullity report the outcome.
DenseSolveResult solve_dense(std::vector<std::vector<double>> A,
                             std::vector<double> b,
                             double rank_tol_rel = 1e-10);

}  // namespace mvband::detail
