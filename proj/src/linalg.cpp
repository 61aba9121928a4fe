#include "mvband/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace mvband::detail {

DenseSolveResult solve_dense(std::vector<std::vector<double>> A,
                             std::vector<double> b, double rank_tol_rel) {
  const int n = static_cast<int>(A.size());
  if (n == 0) return {{}, 0, 0, true};
  for (const auto& row : A)
    if (static_cast<int>(row.size()) != n)
      throw std::invalid_argument("solve_dense: matrix not square");
  if (static_cast<int>(b.size()) != n)
    throw std::invalid_argument("solve_dense: rhs size mismatch");

  double scale = 0.0;
  for (const auto& row : A)
    for (double v : row) scale = std::max(scale, std::abs(v));
  const double tol = rank_tol_rel * std::max(scale, 1e-300);

  DenseSolveResult res;
  int rank = 0;
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    double best = tol;
    for (int r = rank; r < n; ++r) {
      if (std::abs(A[r][col]) > best) {
        best = std::abs(A[r][col]);
        piv = r;
      }
    }
    if (piv < 0) continue;
    std::swap(A[piv], A[rank]);
    std::swap(b[piv], b[rank]);
    for (int r = rank + 1; r < n; ++r) {
      double f = A[r][col] / A[rank][col];
      if (f == 0.0) continue;
      for (int c = col; c < n; ++c) A[r][c] -= f * A[rank][c];
      b[r] -= f * b[rank];
    }
    ++rank;
  }
  res.rank = rank;
  res.nullity = n - rank;
  res.ok = (rank == n);
  if (!res.ok) return res;

  res.x.assign(n, 0.0);
  for (int r = n - 1; r >= 0; --r) {
    double acc = b[r];
    int lead = -1;
    for (int c = 0; c < n; ++c) {
      if (std::abs(A[r][c]) > tol) {
        lead = c;
        break;
      }
    }
    for (int c = lead + 1; c < n; ++c) acc -= A[r][c] * res.x[c];
    res.x[lead] = acc / A[r][lead];
  }
  return res;
}

}  // namespace mvband::detail
