#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mvband/gfun.hpp"

// Threshold construction by the dynamical ping-pong algorithm: chains
// X_0..X_{n+1} built by alternating multiplicative symmetry X -> E/X with
// monotone-branch inversion of T_kappa, the energy calibrated by bisection on
// the terminal condition. Also: the omega weights (closed form, dense matrix
// oracle, alignment closed forms), threshold lifting to dimension 3, the
// continued-fraction reformulation for kappa in {4,6}, and the convergence
// regression over even-index energies.

namespace mvband::solver {

using gfun::ConjugateOperator;

class NoConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class ScheduleInfeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class DegenerateFactor : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class SingularSystem : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class UnsupportedPair : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};
class ZeroFactor : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class FamilyKind {
  J2Decreasing,
  FIncreasing,
  WellDecreasing,
  WellIncreasing,
  Alignment,
};

struct Family {
  FamilyKind kind = FamilyKind::J2Decreasing;
  int well_j = 1;    // well index for the well families
  int align_p = -1;  // chain index the terminal aligns to

  static Family j2() { return {FamilyKind::J2Decreasing, 1, -1}; }
  static Family f() { return {FamilyKind::FIncreasing, 1, -1}; }
  static Family well_decreasing(int j) { return {FamilyKind::WellDecreasing, j, -1}; }
  static Family well_increasing(int j) { return {FamilyKind::WellIncreasing, j, -1}; }
  static Family alignment(int p) { return {FamilyKind::Alignment, 1, p}; }

  std::string name() const;
};

enum class Assumption { AO1, AO2, AO3, AE1, AE2, AE3, AlignmentSigns, Unknown };

std::string assumption_name(Assumption a);

// Explicit ping-pong data: where the chain starts, which branch of T_kappa
// each inverse step uses, and what the terminal coordinate must hit.
struct PingPongSchedule {
  enum class Start { SqrtE, LevelCosine };
  enum class Terminal { LevelCosine, AlignTo };
  enum class Ordering { Increasing, Decreasing, None };

  Start start = Start::SqrtE;
  int start_level_j = 0;     // X_{n/2} = cos(start_level_j*pi/kappa), n even
  Terminal terminal = Terminal::LevelCosine;
  int terminal_level_j = 0;  // X_{n+1} target level
  int align_p = -1;          // T(X_{n+1}) = T(X_p) instead of a cosine level
  std::vector<int> branch_wells;  // one well per inverse-T step
  Ordering ordering = Ordering::None;

  // Canonical schedule of the J2/F/well families.
  static PingPongSchedule standard(int kappa, int n, const Family& fam);

  static int level_steps(int n) { return (n % 2 == 1) ? (n + 1) / 2 : n / 2; }
};

struct ChainResult {
  bool ok = false;
  std::vector<double> coords;  // X_0..X_{n+1} (valid when ok)
  int failed_step = -1;
  std::string reason;
};

// Builds the chain at a trial energy E > 0. Failure signals that E left the
// admissible set of the construction (a point exited (-1,1)\{0}, an inverse
// level fell outside [-1,1], or the family ordering broke).
ChainResult construct_chain(int kappa, int n, const PingPongSchedule& sched,
                            double E);

struct ThresholdSolution {
  int kappa = 0;
  int n = 0;
  Family family;
  int dimension = 2;
  double energy = 0.0;
  std::vector<double> coords;        // X_0..X_{n+1}
  std::vector<double> lift_factors;  // appended constant coordinates (d > 2)
  std::vector<double> omegas;
  double residual = 0.0;  // terminal-condition defect at the solved energy
  Assumption assumption = Assumption::Unknown;
  std::vector<int> mix_I1, mix_I2;  // index split for AO3/AE3
  bool omegas_all_negative = false;

  int omega_count() const { return (n % 2 == 1) ? (n + 1) / 2 : n / 2; }
  // Index of the chain point expressed as the omega-combination of X_0..X_{m-1}.
  int relation_mid() const { return (n % 2 == 1) ? (n + 1) / 2 : n / 2; }
};

struct SolveOptions {
  double tol_root = 1e-13;
  int max_iter = 200;
  int bracket_samples = 128;
};

// g_{j*kappa} evaluated at chain point q of a solution, honoring lifts.
double sol_g(const ThresholdSolution& sol, int j_mult, int q);
double sol_g_prime(const ThresholdSolution& sol, int j_mult, int q);

// J2 family: E_n in (cos^2(pi/kappa), cos(pi/kappa)), terminal X_{n+1} = 1.
// n = 0 returns the trivial sup-J2 endpoint solution.
ThresholdSolution solve_J2(int kappa, int n, const SolveOptions& opts = {});

// F family: F_n in (cos(pi/k)cos(2pi/k), cos(2pi/k)), terminal cos(2pi/kappa).
ThresholdSolution solve_F(int kappa, int n, const SolveOptions& opts = {});

enum class Direction { Decreasing, Increasing };

// Generalized well sequences; j = 1 specializes to solve_J2 / solve_F.
ThresholdSolution solve_well(int kappa, int j, int n, Direction dir,
                             const SolveOptions& opts = {});

struct AlignmentProblem {
  int kappa = 6;
  int n = 1;
  PingPongSchedule schedule;  // terminal must be AlignTo
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
};

// All calibrated solutions of the alignment problem inside the bracket.
std::vector<ThresholdSolution> solve_alignment_all(const AlignmentProblem& prob,
                                                   const SolveOptions& opts = {});

// The solution nearest to energy_hint (ScheduleInfeasible if none exist).
ThresholdSolution solve_alignment(const AlignmentProblem& prob,
                                  double energy_hint,
                                  const SolveOptions& opts = {});

// omega weights from the product formulas of the odd/even systems.
std::vector<double> omega_closed_form(const ThresholdSolution& sol);

// omega from the dense linear system over any distinct frequency multipliers.
std::vector<double> omega_matrix_oracle(const ThresholdSolution& sol,
                                        const std::vector<int>& j_indices);

// Printed closed forms under the alignment condition,
// (n,p) in {(1,0),(2,0),(3,0),(3,1),(4,0),(4,1)}.
std::vector<double> omega_alignment(const ThresholdSolution& sol, int n, int p);

// All distinct d-fold products of cos(j*pi/kappa), j in 0..kappa, sorted.
std::vector<double> theta0_set(int kappa, int d);

// Scale a threshold into dimension d+1 by the factor cos(j*pi/kappa);
// omega weights carry over unchanged. j = kappa/2 is rejected (zero factor).
ThresholdSolution lift_threshold(const ThresholdSolution& sol, int j);

enum class Parity { Odd, Even };

// Single-equation reformulation for kappa in {4,6}: the fixed point of
// E = f_E^(n)(cos(pi/kappa)) (even terms, solves E_{2n}) or
// E = f_E^(n)(sqrt(E))      (odd terms,  solves E_{2n-1}).
double continued_fraction_solve(int kappa, int n, Parity parity,
                                const SolveOptions& opts = {});

struct ConvergenceStudy {
  std::vector<std::pair<double, double>> points;  // (log n, log(E_2n - inf J2))
  double slope = 0.0;
  double intercept = 0.0;
};

// Log-log regression of the even-term gap E_{2n} - cos^2(pi/kappa) over
// n = 10, 20, ..., N.
ConvergenceStudy convergence_study(int kappa, int N, const SolveOptions& opts = {});

// Documented alignment constructions for kappa = 6 (the shipped data set;
// same content as data/alignment_k6.json).
struct AlignmentCase {
  int n = 0;
  int p = 0;
  double energy = 0.0;  // calibrated energy this case reproduces
  AlignmentProblem problem;
};

const std::vector<AlignmentCase>& alignment_catalog_k6();

}  // namespace mvband::solver
