#include "mvband/gfun.hpp"

#include <cmath>
#include <string>

#include "mvband/cheb.hpp"

namespace mvband::gfun {

namespace {

constexpr double kUnitSlack = 1e-12;  // rounding slack on |.| <= 1 checks

void require_unit(double v, const char* what) {
  if (!(std::abs(v) <= 1.0 + kUnitSlack))
    throw DomainError(std::string("g: ") + what + " = " + std::to_string(v) +
                      " outside [-1, 1]");
}

void require_nonzero(double v, const char* what) {
  if (v == 0.0)
    throw DomainError(std::string("g: ") + what + " is zero");
}

void require_order(int j, int kappa) {
  if (j < 1) throw DomainError("g: j must be >= 1");
  if (kappa < 1) throw DomainError("g: kappa must be >= 1");
}

}  // namespace

double g2(double E, int j, int kappa, double x) {
  require_order(j, kappa);
  require_nonzero(x, "x");
  require_unit(x, "x");
  const double z = E / x;
  require_unit(z, "E/x");
  const int jk = j * kappa;
  return z * m(x) * cheb::U(jk - 1, x) + x * m(z) * cheb::U(jk - 1, z);
}

double g2_prime(double E, int j, int kappa, double x) {
  require_order(j, kappa);
  require_nonzero(x, "x");
  require_unit(x, "x");
  const double z = E / x;
  require_unit(z, "E/x");
  const int jk = j * kappa;
  return -(E / (x * x)) * cheb::U(jk - 1, x) - jk * z * cheb::T(jk, x) +
         cheb::U(jk - 1, z) + jk * z * cheb::T(jk, z);
}

double g3(double E, int j, int kappa, double x, double y) {
  require_order(j, kappa);
  require_nonzero(x, "x");
  require_nonzero(y, "y");
  require_unit(x, "x");
  require_unit(y, "y");
  const double z = E / (x * y);
  require_unit(z, "E/(x*y)");
  const int jk = j * kappa;
  return (E / x) * m(x) * cheb::U(jk - 1, x) +
         (E / y) * m(y) * cheb::U(jk - 1, y) +
         x * y * m(z) * cheb::U(jk - 1, z);
}

ConjugateOperator::ConjugateOperator(int kappa_, std::vector<int> sigma_,
                                     std::vector<double> rho_)
    : kappa(kappa_), sigma(std::move(sigma_)), rho(std::move(rho_)) {
  if (kappa < 2 || kappa % 2 != 0)
    throw std::invalid_argument("ConjugateOperator: kappa must be even >= 2");
  if (sigma.empty())
    throw std::invalid_argument("ConjugateOperator: empty index set");
  if (sigma.front() != 1)
    throw std::invalid_argument("ConjugateOperator: sigma must start at 1");
  for (size_t q = 1; q < sigma.size(); ++q)
    if (sigma[q] <= sigma[q - 1])
      throw std::invalid_argument("ConjugateOperator: sigma not strictly increasing");
  if (rho.size() != sigma.size())
    throw std::invalid_argument("ConjugateOperator: rho/sigma length mismatch");
  if (std::abs(rho.front() - 1.0) > 1e-12)
    throw std::invalid_argument("ConjugateOperator: rho[0] must be 1");
  rho.front() = 1.0;
}

double G(const ConjugateOperator& op, double E, double x) {
  double acc = 0.0;
  for (size_t q = 0; q < op.sigma.size(); ++q)
    acc += op.rho[q] * g2(E, op.sigma[q], op.kappa, x);
  return acc;
}

double G(const ConjugateOperator& op, double E, double x, double y) {
  double acc = 0.0;
  for (size_t q = 0; q < op.sigma.size(); ++q)
    acc += op.rho[q] * g3(E, op.sigma[q], op.kappa, x, y);
  return acc;
}

double G_prime(const ConjugateOperator& op, double E, double x) {
  double acc = 0.0;
  for (size_t q = 0; q < op.sigma.size(); ++q)
    acc += op.rho[q] * g2_prime(E, op.sigma[q], op.kappa, x);
  return acc;
}

ModelConfig::ModelConfig(int kappa_, int dimension_)
    : kappa(kappa_), dimension(dimension_) {
  validate();
}

void ModelConfig::validate() const {
  if (kappa < 2 || kappa % 2 != 0)
    throw std::invalid_argument("ModelConfig: kappa must be even >= 2");
  if (dimension != 2 && dimension != 3)
    throw std::invalid_argument("ModelConfig: dimension must be 2 or 3");
  if (!(tol_root > 0.0) || !(tol_sign > 0.0))
    throw std::invalid_argument("ModelConfig: tolerances must be positive");
  if (n_energy < 2 || n_x < 2 || n_y < 2)
    throw std::invalid_argument("ModelConfig: grids must have >= 2 points");
}

}  // namespace mvband::gfun
