#include "mvband/cheb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace mvband::cheb {

double T(int n, double x) {
  if (n < 0) throw std::invalid_argument("cheb::T: negative order");
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = x;
  for (int k = 1; k < n; ++k) {
    double next = 2.0 * x * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double U(int n, double x) {
  if (n < 0) throw std::invalid_argument("cheb::U: negative order");
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = 2.0 * x;
  for (int k = 1; k < n; ++k) {
    double next = 2.0 * x * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double T_prime(int kappa, double x) {
  if (kappa < 1) throw std::invalid_argument("cheb::T_prime: order < 1");
  return static_cast<double>(kappa) * U(kappa - 1, x);
}

namespace {

// d/dx U_n by differentiating the recurrence:
//   U'_{n+1} = 2 U_n + 2 x U'_n - U'_{n-1}.
double u_prime_recurrence(int n, double x) {
  if (n == 0) return 0.0;
  double u_prev = 1.0, u_cur = 2.0 * x;
  double d_prev = 0.0, d_cur = 2.0;
  for (int k = 1; k < n; ++k) {
    double d_next = 2.0 * u_cur + 2.0 * x * d_cur - d_prev;
    double u_next = 2.0 * x * u_cur - u_prev;
    d_prev = d_cur;
    d_cur = d_next;
    u_prev = u_cur;
    u_cur = u_next;
  }
  return d_cur;
}

}  // namespace

double U_prime(int kappa, double x) {
  if (kappa < 1) throw std::invalid_argument("cheb::U_prime: order < 1");
  if (std::abs(std::abs(x) - 1.0) < 1e-8) return u_prime_recurrence(kappa - 1, x);
  return (kappa * T(kappa, x) - x * U(kappa - 1, x)) / (x * x - 1.0);
}

double cos_node(int kappa, int j) {
  return std::cos(static_cast<double>(j) * std::numbers::pi /
                  static_cast<double>(kappa));
}

Well::Well(int kappa_, int j_) : kappa(kappa_), j(j_) {
  if (kappa < 2 || kappa % 2 != 0)
    throw std::invalid_argument("Well: kappa must be even and >= 2");
  if (j < 1 || j > kappa)
    throw std::invalid_argument("Well: j out of range 1..kappa");
}

double Well::lo() const { return cos_node(kappa, j); }
double Well::hi() const { return cos_node(kappa, j - 1); }

double inv_T_on_well(const Well& w, double y, double tol_root, int max_iter) {
  if (!std::isfinite(y)) throw BranchRangeError("inv_T_on_well: non-finite level");
  if (y > 1.0 + 1e-12 || y < -1.0 - 1e-12)
    throw BranchRangeError("inv_T_on_well: level " + std::to_string(y) +
                           " outside the branch range [-1, 1]");
  y = std::clamp(y, -1.0, 1.0);

  double a = w.lo();
  double b = w.hi();
  double fa = T(w.kappa, a) - y;
  double fb = T(w.kappa, b) - y;
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (fa * fb > 0.0) {
    // y sits within rounding slack of the range edge hit at one endpoint.
    return std::abs(fa) <= std::abs(fb) ? a : b;
  }
  (void)tol_root;  // bisection to interval width eps beats tol_root on T-values
  const double eps = 4.0 * std::numeric_limits<double>::epsilon();
  for (int it = 0; it < max_iter && (b - a) > eps; ++it) {
    double mid = 0.5 * (a + b);
    double fm = T(w.kappa, mid) - y;
    if (fa * fm <= 0.0) {
      b = mid;
      fb = fm;
    } else {
      a = mid;
      fa = fm;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace mvband::cheb
