#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "mvband/cheb.hpp"

using namespace mvband;
using cheb::Well;

namespace {
constexpr double kPi = std::numbers::pi;

double fd_central(double (*f)(int, double), int order, double x, double h) {
  return (f(order, x + h) - f(order, x - h)) / (2.0 * h);
}
}  // namespace

TEST_CASE("T matches the trigonometric form on [-1,1]") {
  CHECK(cheb::T(4, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(cheb::T(4, 0.5) == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(std::abs(cheb::T(6, std::cos(kPi / 12.0))) < 1e-13);
  for (int i = 0; i <= 200; ++i) {
    double x = -1.0 + 2.0 * i / 200.0;
    for (int n : {0, 1, 2, 5, 8, 13}) {
      CHECK(std::abs(cheb::T(n, x) - std::cos(n * std::acos(x))) < 1e-13);
    }
  }
}

TEST_CASE("U values and endpoint limits") {
  CHECK(std::abs(cheb::U(3, std::cos(kPi / 4.0))) < 1e-13);
  CHECK(cheb::U(3, 1.0) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(cheb::U(3, -1.0) == doctest::Approx(-4.0).epsilon(1e-15));
  CHECK(cheb::U(3, 0.5) == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("T_prime") {
  CHECK(std::abs(cheb::T_prime(4, std::cos(kPi / 4.0))) < 1e-13);
  CHECK(cheb::T_prime(4, 1.0) == doctest::Approx(16.0));
  double fd = fd_central(&cheb::T, 6, 0.9, 1e-6);
  CHECK(cheb::T_prime(6, 0.9) == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("U_prime identity form and the near-one switch") {
  CHECK(cheb::U_prime(4, 0.0) == doctest::Approx(-4.0).epsilon(1e-14));
  CHECK(cheb::U_prime(4, 0.5) == doctest::Approx(2.0).epsilon(1e-13));
  auto u3 = [](int kappa, double x) { return cheb::U(kappa - 1, x); };
  double fd = (u3(6, 0.3 + 1e-6) - u3(6, 0.3 - 1e-6)) / 2e-6;
  CHECK(cheb::U_prime(6, 0.3) == doctest::Approx(fd).epsilon(1e-6));
  // limit value U'_{kappa-1}(1) = (kappa-1) kappa (kappa+1) / 3
  CHECK(cheb::U_prime(6, 1.0) == doctest::Approx(5.0 * 6.0 * 7.0 / 3.0));
  CHECK(cheb::U_prime(6, 1.0 - 1e-9) ==
        doctest::Approx(cheb::U_prime(6, 1.0 - 1e-7)).epsilon(1e-4));
}

TEST_CASE("bracket basics and the U_{2k-1}/U_{k-1} identity") {
  CHECK(cheb::bracket(1, 2, 3, 4) == doctest::Approx(-2.0));
  CHECK(cheb::bracket(0.7, 0.3, 0.7, 0.3) == doctest::Approx(0.0));
  // [U_{2k-1}(x), U_{k-1}(y)] = 2 U_{k-1}(x) U_{k-1}(y) (T_k(x) - T_k(y))
  const int kappa = 4;
  const double x = 0.3, y = 0.8;
  double lhs = cheb::bracket(cheb::U(2 * kappa - 1, x), cheb::U(2 * kappa - 1, y),
                             cheb::U(kappa - 1, x), cheb::U(kappa - 1, y));
  double rhs = 2.0 * cheb::U(kappa - 1, x) * cheb::U(kappa - 1, y) *
               (cheb::T(kappa, x) - cheb::T(kappa, y));
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("Pell identity on a dense grid") {
  for (int n : {2, 4, 6, 9}) {
    for (int i = 0; i <= 10000; ++i) {
      double x = -1.0 + 2.0 * i / 10000.0;
      double t = cheb::T(n, x);
      double u = cheb::U(n - 1, x);
      double pell = t * t - (x * x - 1.0) * u * u;
      REQUIRE(std::abs(pell - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("equal T_kappa level propagates to every multiple order") {
  std::mt19937 rng(20240817);
  std::uniform_real_distribution<double> lev(-1.0, 1.0);
  for (int kappa : {4, 6}) {
    for (int trial = 0; trial < 200; ++trial) {
      double y = lev(rng);
      Well w1(kappa, 1), w2(kappa, 2);
      double a = cheb::inv_T_on_well(w1, y);
      double b = cheb::inv_T_on_well(w2, y);
      for (int alpha = 1; alpha <= 5; ++alpha)
        REQUIRE(std::abs(cheb::T(alpha * kappa, a) - cheb::T(alpha * kappa, b)) < 1e-9);
    }
  }
}

TEST_CASE("equal level kills the U-bracket at multiple orders") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> lev(-0.95, 0.95);
  int used = 0;
  for (int kappa : {4, 6}) {
    for (int trial = 0; trial < 400 && used < 200; ++trial) {
      double y = lev(rng);
      double a = cheb::inv_T_on_well(Well(kappa, 1), y);
      double b = cheb::inv_T_on_well(Well(kappa, 2), y);
      if (std::abs(cheb::U(kappa - 1, a)) < 0.1 || std::abs(cheb::U(kappa - 1, b)) < 0.1)
        continue;
      ++used;
      for (int alpha = 1; alpha <= 4; ++alpha) {
        for (int beta = 1; beta <= 4; ++beta) {
          double br = cheb::bracket(cheb::U(alpha * kappa - 1, a),
                                    cheb::U(alpha * kappa - 1, b),
                                    cheb::U(beta * kappa - 1, a),
                                    cheb::U(beta * kappa - 1, b));
          REQUIRE(std::abs(br) < 1e-9);
        }
      }
    }
  }
  CHECK(used >= 100);
}

TEST_CASE("T4 and T6 level-set factorizations") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    double x = u(rng), y = u(rng);
    double lhs4 = cheb::T(4, x) - cheb::T(4, y);
    double rhs4 = 8.0 * (x - y) * (x + y) * (x * x + y * y - 1.0);
    REQUIRE(std::abs(lhs4 - rhs4) < 1e-9);
    double lhs6 = cheb::T(6, x) - cheb::T(6, y);
    double rhs6 = 2.0 * (x - y) * (x + y) *
                  (-3.0 + 4.0 * x * x - 4.0 * x * y + 4.0 * y * y) *
                  (-3.0 + 4.0 * x * x + 4.0 * x * y + 4.0 * y * y);
    REQUIRE(std::abs(lhs6 - rhs6) < 1e-9);
  }
}

TEST_CASE("well geometry and inversion") {
  Well w(4, 1);
  CHECK(w.lo() == doctest::Approx(std::cos(kPi / 4.0)));
  CHECK(w.hi() == doctest::Approx(1.0));
  CHECK(w.increasing());
  CHECK_FALSE(Well(4, 2).increasing());
  CHECK(w.lo() < w.hi());
  CHECK_THROWS_AS(Well(3, 1), std::invalid_argument);
  CHECK_THROWS_AS(Well(4, 5), std::invalid_argument);

  CHECK(cheb::inv_T_on_well(w, 1.0) == doctest::Approx(1.0));
  CHECK(cheb::inv_T_on_well(w, -1.0) == doctest::Approx(std::cos(kPi / 4.0)));
  CHECK(cheb::inv_T_on_well(Well(4, 2), cheb::T(4, 0.5)) ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(cheb::inv_T_on_well(w, 1.5), cheb::BranchRangeError);
}

TEST_CASE("inv_T_on_well round trip over random wells and levels") {
  std::mt19937 rng(4242);
  std::uniform_real_distribution<double> lev(-1.0, 1.0);
  std::uniform_int_distribution<int> kd(1, 3);
  for (int trial = 0; trial < 1000; ++trial) {
    int kappa = 2 * kd(rng) + 2;  // 4, 6, 8
    std::uniform_int_distribution<int> jd(1, kappa);
    Well w(kappa, jd(rng));
    double y = lev(rng);
    double x = cheb::inv_T_on_well(w, y);
    REQUIRE(x >= w.lo());
    REQUIRE(x <= w.hi());
    REQUIRE(std::abs(cheb::T(kappa, x) - y) < 1e-13);
  }
}
