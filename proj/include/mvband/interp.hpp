#pragma once

#include <string>
#include <vector>

#include "mvband/gfun.hpp"
#include "mvband/scan.hpp"
#include "mvband/solver.hpp"

// Band-wise linear interpolation for the conjugate-operator coefficients rho:
// value and derivative constraints of G at both band-endpoint solutions form
// a dense (2n-1) x (2n-1) system after the rho_kappa = 1 normalization moves
// the first column to the right-hand side. Also the search over index sets.

namespace mvband::interp {

using gfun::ConjugateOperator;
using solver::ThresholdSolution;

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class RankDeficient : public std::runtime_error {
 public:
  RankDeficient(const std::string& what, int nullity_)
      : std::runtime_error(what), nullity(nullity_) {}
  int nullity = 0;
};

struct RowSpec {
  double energy = 0.0;
  double x = 0.0;
  bool derivative = false;
};

struct InterpolationSystem {
  int kappa = 0;
  int n = 0;  // band index
  std::vector<int> sigma;
  std::vector<RowSpec> rows;
  std::vector<std::vector<double>> matrix;  // (2n-1) x (|sigma|-1)
  std::vector<double> rhs;
  int rank_estimate = 0;
};

// left = band-n solution, right = band-(n-1) solution (n = 1 takes the
// trivial sup-J2 endpoint, which contributes no rows). |sigma| must be 2n.
InterpolationSystem build_system(int kappa, int n, const ThresholdSolution& left,
                                 const ThresholdSolution& right,
                                 const std::vector<int>& sigma);

// Pivoted dense solve; the returned operator satisfies every constraint to
// 1e-9 * matrix scale (values) and 1e-8 * scale (derivatives).
ConjugateOperator solve_rho(const InterpolationSystem& sys);

// Index sets used for the reported kappa = 4 and kappa = 6 tables (n <= 5).
std::vector<int> canonical_sigma(int kappa, int n);

struct CandidateOutcome {
  std::vector<int> sigma;
  bool accepted = false;
  std::string reason;
  scan::NegativeWitness witness;
  bool has_witness = false;
  double min_interior = 0.0;
};

struct SigmaSearchConfig {
  int n_energy = 25;
  int n_x = 801;
  double tol_sign = 1e-9;
  double inset_frac = 0.02;
};

struct SigmaSearchResult {
  std::vector<int> sigma;
  ConjugateOperator op;
  scan::BandCheck evidence;
  std::vector<CandidateOutcome> outcomes;  // everything evaluated, pool order
};

class NoValidSigma : public std::runtime_error {
 public:
  NoValidSigma(const std::string& what, std::vector<CandidateOutcome> outcomes_)
      : std::runtime_error(what), outcomes(std::move(outcomes_)) {}
  std::vector<CandidateOutcome> outcomes;
};

// Positivity screening of a single candidate against the band (E_n, E_{n-1}).
CandidateOutcome evaluate_sigma(int kappa, int n, const ThresholdSolution& left,
                                const ThresholdSolution& right,
                                const std::vector<int>& sigma,
                                const SigmaSearchConfig& cfg);

// First candidate, in (max multiplier, sum, lexicographic) order, whose
// solved operator scans strictly positive on the band interior.
SigmaSearchResult search_sigma(int kappa, int n,
                               std::vector<std::vector<int>> pool,
                               const SigmaSearchConfig& cfg = {});

}  // namespace mvband::interp
