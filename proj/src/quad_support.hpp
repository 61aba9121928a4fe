#pragma once

#include <vector>

#include "mvband/solver.hpp"

// Private quad-precision (__float128) support. The interpolation systems and
// the late-chain omega weights are ill-conditioned against unstructured
// double roundoff in the assembled matrices, so chains are re-solved and the
// dense systems assembled and eliminated at quad precision, then rounded.

namespace mvband::detail {

using qreal = __float128;

inline qreal q_abs(qreal v) { return v < 0 ? -v : v; }

template <typename Real>
Real r_T(int n, Real x) {
  if (n == 0) return Real(1);
  Real prev = Real(1), cur = x;
  for (int k = 1; k < n; ++k) {
    Real next = Real(2) * x * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

template <typename Real>
Real r_U(int n, Real x) {
  if (n == 0) return Real(1);
  Real prev = Real(1), cur = Real(2) * x;
  for (int k = 1; k < n; ++k) {
    Real next = Real(2) * x * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

template <typename Real>
Real r_m(Real x) {
  return (Real(1) - x) * (Real(1) + x);
}

template <typename Real>
Real r_g2(Real E, int j, int kappa, Real x) {
  Real z = E / x;
  const int jk = j * kappa;
  return z * r_m(x) * r_U(jk - 1, x) + x * r_m(z) * r_U(jk - 1, z);
}

template <typename Real>
Real r_g2_prime(Real E, int j, int kappa, Real x) {
  Real z = E / x;
  const int jk = j * kappa;
  return -(E / (x * x)) * r_U(jk - 1, x) - Real(jk) * z * r_T(jk, x) +
         r_U(jk - 1, z) + Real(jk) * z * r_T(jk, z);
}

qreal q_pi();
qreal q_cos_node(int kappa, int j);
qreal q_sqrt(qreal v);

// Bisection for T_kappa = y on well j; a finite hint narrows the bracket.
qreal q_inv_T_well(int kappa, int j, qreal y, double hint);

struct QuadChain {
  bool ok = false;
  qreal energy = 0;
  std::vector<qreal> coords;
};

QuadChain q_build_chain(int kappa, int n, const solver::PingPongSchedule& sched,
                        qreal E, const std::vector<double>& coord_hints);

// Re-solves a standard family at quad precision near a double-accurate
// energy. ok = false when the family has no standard schedule or the hint
// does not bracket the root.
QuadChain q_refine_standard(int kappa, int n, const solver::Family& fam,
                            double energy_hint,
                            const std::vector<double>& coord_hints);

std::vector<qreal> q_solve_dense(std::vector<std::vector<qreal>> A,
                                 std::vector<qreal> b);

}  // namespace mvband::detail
