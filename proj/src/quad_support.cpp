#include "quad_support.hpp"

#include <cmath>
#include <limits>

namespace mvband::detail {

using solver::Family;
using solver::FamilyKind;
using solver::PingPongSchedule;

qreal q_pi() {
  // pi as the nearest double plus its residual, exact to ~1e-33 relative
  return qreal(3.141592653589793116) + qreal(1.2246467991473531772e-16);
}

qreal q_cos_node(int kappa, int j) {
  // Maclaurin series; |t| <= pi, so forty terms are far more than enough.
  qreal t = qreal(j) * q_pi() / qreal(kappa);
  qreal t2 = t * t;
  qreal term = 1, sum = 1;
  for (int k = 1; k < 40; ++k) {
    term *= -t2 / (qreal(2 * k - 1) * qreal(2 * k));
    sum += term;
    if (q_abs(term) < qreal(1e-40)) break;
  }
  return sum;
}

qreal q_sqrt(qreal v) {
  if (v <= 0) return 0;
  qreal x = static_cast<qreal>(std::sqrt(static_cast<double>(v)));
  for (int it = 0; it < 4; ++it) x = (x + v / x) / 2;  // Newton polish
  return x;
}

qreal q_inv_T_well(int kappa, int j, qreal y, double hint) {
  qreal a = q_cos_node(kappa, j);
  qreal b = q_cos_node(kappa, j - 1);
  if (y > 1) y = 1;
  if (y < -1) y = -1;
  if (std::isfinite(hint)) {
    // the double-accurate hint brackets the root within a few of its ulps
    qreal ha = qreal(hint) - qreal(4e-15);
    qreal hb = qreal(hint) + qreal(4e-15);
    if (ha > a && hb < b) {
      qreal fa = r_T(kappa, ha) - y;
      qreal fb = r_T(kappa, hb) - y;
      if (fa * fb <= 0) {
        a = ha;
        b = hb;
      }
    }
  }
  qreal fa = r_T(kappa, a) - y;
  for (int it = 0; it < 260 && (b - a) > qreal(1e-36); ++it) {
    qreal mid = (a + b) / 2;
    qreal fm = r_T(kappa, mid) - y;
    if (fa * fm <= 0) {
      b = mid;
    } else {
      a = mid;
      fa = fm;
    }
  }
  return (a + b) / 2;
}

QuadChain q_build_chain(int kappa, int n, const PingPongSchedule& sched, qreal E,
                        const std::vector<double>& coord_hints) {
  QuadChain res;
  res.energy = E;
  res.coords.assign(n + 2, qreal(0));
  auto& X = res.coords;
  auto hint = [&](int idx) {
    return idx < static_cast<int>(coord_hints.size())
               ? coord_hints[idx]
               : std::numeric_limits<double>::quiet_NaN();
  };
  auto interior = [](qreal x) { return q_abs(x) < 1 && q_abs(x) > qreal(1e-30); };
  const int mid = (n % 2 == 1) ? (n + 1) / 2 : n / 2;
  if (n % 2 == 1) {
    X[mid] = q_sqrt(E);
    if (!interior(X[mid])) return res;
    for (int k = 1; k <= mid; ++k) {
      qreal level = r_T(kappa, X[mid + k - 1]);
      if (q_abs(level) > 1) return res;
      X[mid - k] = q_inv_T_well(kappa, sched.branch_wells[k - 1], level, hint(mid - k));
      X[mid + k] = E / X[mid - k];
      if (mid + k <= n && !interior(X[mid + k])) return res;
    }
  } else {
    X[mid] = q_cos_node(kappa, sched.start_level_j);
    X[mid + 1] = E / X[mid];
    if (mid + 1 <= n && !interior(X[mid + 1])) return res;
    for (int k = 1; k <= mid; ++k) {
      qreal level = r_T(kappa, X[mid + k]);
      if (q_abs(level) > 1) return res;
      X[mid - k] = q_inv_T_well(kappa, sched.branch_wells[k - 1], level, hint(mid - k));
      X[mid + k + 1] = E / X[mid - k];
      if (mid + k + 1 <= n && !interior(X[mid + k + 1])) return res;
    }
  }
  res.ok = true;
  return res;
}

QuadChain q_refine_standard(int kappa, int n, const Family& fam,
                            double energy_hint,
                            const std::vector<double>& coord_hints) {
  QuadChain none;
  if (n < 1 || fam.kind == FamilyKind::Alignment) return none;
  PingPongSchedule sched;
  try {
    sched = PingPongSchedule::standard(kappa, n, fam);
  } catch (const solver::ScheduleInfeasible&) {
    return none;
  }
  const bool dec = fam.kind == FamilyKind::J2Decreasing ||
                   fam.kind == FamilyKind::WellDecreasing;
  const qreal target = q_cos_node(kappa, sched.terminal_level_j);
  auto low_side = [&](qreal E) {
    QuadChain c = q_build_chain(kappa, n, sched, E, coord_hints);
    if (!c.ok) return !dec;  // failures sit above the root for decreasing
    return (c.coords.back() - target) < 0;
  };
  qreal lo = qreal(energy_hint) - qreal(1e-9);
  qreal hi = qreal(energy_hint) + qreal(1e-9);
  if (!low_side(lo) || low_side(hi)) return none;
  for (int it = 0; it < 150; ++it) {
    qreal mid = (lo + hi) / 2;
    if (mid <= lo || mid >= hi) break;
    if (low_side(mid))
      lo = mid;
    else
      hi = mid;
  }
  QuadChain c = q_build_chain(kappa, n, sched, (lo + hi) / 2, coord_hints);
  return c;
}

std::vector<qreal> q_solve_dense(std::vector<std::vector<qreal>> A,
                                 std::vector<qreal> b) {
  const int n = static_cast<int>(A.size());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (q_abs(A[r][col]) > q_abs(A[piv][col])) piv = r;
    if (A[piv][col] == 0)
      throw solver::SingularSystem("quad dense system is singular");
    std::swap(A[piv], A[col]);
    std::swap(b[piv], b[col]);
    for (int r = col + 1; r < n; ++r) {
      qreal f = A[r][col] / A[col][col];
      if (f == 0) continue;
      for (int c2 = col; c2 < n; ++c2) A[r][c2] -= f * A[col][c2];
      b[r] -= f * b[col];
    }
  }
  std::vector<qreal> x(n, qreal(0));
  for (int r = n - 1; r >= 0; --r) {
    qreal acc = b[r];
    for (int c2 = r + 1; c2 < n; ++c2) acc -= A[r][c2] * x[c2];
    x[r] = acc / A[r][r];
  }
  return x;
}

}  // namespace mvband::detail
