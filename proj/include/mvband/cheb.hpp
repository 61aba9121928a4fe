#pragma once

#include <stdexcept>

// Chebyshev polynomials of both kinds, their derivatives, and monotone-branch
// inversion of T_kappa between consecutive extrema. Everything here is a pure
// function; evaluation uses the three-term recurrences, which stay valid (and
// differentiable) at and slightly beyond the interval endpoints.

namespace mvband::cheb {

// T_n(x), first kind. Defined on all of R.
double T(int n, double x);

// U_n(x), second kind. U_n(+-1) = (n+1)(+-1)^n falls out of the recurrence.
double U(int n, double x);

// d/dx T_kappa(x) = kappa * U_{kappa-1}(x).
double T_prime(int kappa, double x);

// d/dx U_{kappa-1}(x) = (kappa*T_kappa(x) - x*U_{kappa-1}(x)) / (x^2 - 1),
// switching to the differentiated recurrence within 1e-8 of |x| = 1 where the
// identity degenerates to 0/0.
double U_prime(int kappa, double x);

// The function bracket [f(x), g(y)] = f(x)*g(y) - f(y)*g(x).
inline double bracket(double fx, double fy, double gx, double gy) {
  return fx * gy - fy * gx;
}

class BranchRangeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One monotone branch of T_kappa: the open interval between the consecutive
// extrema cos(j*pi/kappa) < cos((j-1)*pi/kappa). T_kappa is strictly
// increasing on the branch iff j is odd, and spans exactly [-1, 1] over the
// closed interval.
struct Well {
  int kappa;
  int j;  // 1 <= j <= kappa

  Well(int kappa_, int j_);

  double lo() const;
  double hi() const;
  bool increasing() const { return j % 2 == 1; }
};

// The unique x in the closed well with T_kappa(x) = y, found by bisection.
// Throws BranchRangeError when y falls outside [-1, 1] beyond rounding slack.
double inv_T_on_well(const Well& w, double y, double tol_root = 1e-13,
                     int max_iter = 200);

// cos(j*pi/kappa); the shared definition keeps chain points, well endpoints
// and threshold targets bit-identical across modules.
double cos_node(int kappa, int j);

}  // namespace mvband::cheb
