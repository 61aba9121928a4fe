#pragma once

#include <stdexcept>
#include <vector>

// The commutator polynomials g_{j*kappa}^E in dimensions 2 and 3, their
// analytic x-derivative, and linear combinations G weighted by the
// conjugate-operator coefficients rho. All functions are pure.

namespace mvband::gfun {

class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// 1 - x^2, factored so no precision is lost within 1e-12 of |x| = 1.
inline double m(double x) { return (1.0 - x) * (1.0 + x); }

// g_{j*kappa}^E(x) = (E/x) m(x) U_{j*kappa-1}(x) + x m(E/x) U_{j*kappa-1}(E/x)
// for x in [-1,-|E|] u [|E|,1]. Inputs outside that set (beyond rounding
// slack) are hard errors; clamping would fabricate spectrum.
double g2(double E, int j, int kappa, double x);

// d/dx g_{j*kappa}^E(x) in the cancellation-stable form
//   -(E/x^2) U_{jk-1}(x) - jk (E/x) T_{jk}(x) + U_{jk-1}(E/x) + jk (E/x) T_{jk}(E/x).
double g2_prime(double E, int j, int kappa, double x);

// Dimension-3 variant with the third coordinate z = E/(x*y) implied.
double g3(double E, int j, int kappa, double x, double y);

// Finite linear combination A = sum_q rho[q] * A_{sigma[q]*kappa},
// represented by its index multipliers and coefficients.
struct ConjugateOperator {
  int kappa = 0;
  std::vector<int> sigma;    // strictly increasing multipliers, sigma[0] == 1
  std::vector<double> rho;   // rho[0] == 1 by normalization convention

  ConjugateOperator() = default;
  ConjugateOperator(int kappa_, std::vector<int> sigma_, std::vector<double> rho_);

  static ConjugateOperator trivial(int kappa_) {
    return ConjugateOperator(kappa_, {1}, {1.0});
  }
};

double G(const ConjugateOperator& op, double E, double x);
double G(const ConjugateOperator& op, double E, double x, double y);
double G_prime(const ConjugateOperator& op, double E, double x);

// Model-level configuration; kappa odd or dimensions outside {2,3} are
// rejected at construction.
struct ModelConfig {
  int kappa = 4;
  int dimension = 2;
  double tol_root = 1e-13;
  double tol_sign = 1e-9;
  int n_energy = 2001;
  int n_x = 4001;
  int n_y = 801;

  ModelConfig() = default;
  ModelConfig(int kappa_, int dimension_);
  void validate() const;
};

}  // namespace mvband::gfun
