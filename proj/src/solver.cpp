#include "mvband/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "mvband/cheb.hpp"
#include "mvband/linalg.hpp"
#include "quad_support.hpp"

namespace mvband::solver {

using cheb::cos_node;

std::string Family::name() const {
  switch (kind) {
    case FamilyKind::J2Decreasing:
      return "J2Decreasing";
    case FamilyKind::FIncreasing:
      return "FIncreasing";
    case FamilyKind::WellDecreasing:
      return "WellDecreasing(" + std::to_string(well_j) + ")";
    case FamilyKind::WellIncreasing:
      return "WellIncreasing(" + std::to_string(well_j) + ")";
    case FamilyKind::Alignment:
      return "Alignment(" + std::to_string(align_p) + ")";
  }
  return "?";
}

std::string assumption_name(Assumption a) {
  switch (a) {
    case Assumption::AO1: return "AO1";
    case Assumption::AO2: return "AO2";
    case Assumption::AO3: return "AO3";
    case Assumption::AE1: return "AE1";
    case Assumption::AE2: return "AE2";
    case Assumption::AE3: return "AE3";
    case Assumption::AlignmentSigns: return "AlignmentSigns";
    case Assumption::Unknown: return "Unknown";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Chain construction
// ---------------------------------------------------------------------------

PingPongSchedule PingPongSchedule::standard(int kappa, int n, const Family& fam) {
  if (kappa < 4 || kappa % 2 != 0)
    throw ScheduleInfeasible("standard schedule: kappa must be even >= 4");
  if (fam.kind == FamilyKind::Alignment)
    throw ScheduleInfeasible("standard schedule: alignment needs explicit data");
  const bool dec = fam.kind == FamilyKind::J2Decreasing ||
                   fam.kind == FamilyKind::WellDecreasing;
  const int j = fam.well_j;
  if (j < 1 || j > kappa / 2)
    throw ScheduleInfeasible("standard schedule: well index out of range");
  if (dec && j == kappa / 2)
    throw ScheduleInfeasible("standard schedule: decreasing family needs cos(j*pi/kappa) > 0");
  if (!dec && j + 1 >= kappa / 2 + 1)
    throw ScheduleInfeasible("standard schedule: increasing family needs cos((j+1)*pi/kappa) > 0");

  PingPongSchedule s;
  s.ordering = dec ? Ordering::Increasing : Ordering::Decreasing;
  if (n % 2 == 1) {
    s.start = Start::SqrtE;
  } else {
    s.start = Start::LevelCosine;
    s.start_level_j = j;
  }
  s.terminal = Terminal::LevelCosine;
  s.terminal_level_j = dec ? j - 1 : j + 1;
  s.branch_wells.assign(level_steps(n), dec ? j + 1 : j);
  return s;
}

ChainResult construct_chain(int kappa, int n, const PingPongSchedule& sched,
                            double E) {
  if (n < 1) throw ScheduleInfeasible("construct_chain: n must be >= 1");
  const int steps = PingPongSchedule::level_steps(n);
  if (static_cast<int>(sched.branch_wells.size()) != steps)
    throw ScheduleInfeasible("construct_chain: branch_wells length mismatch");
  if (sched.terminal == PingPongSchedule::Terminal::AlignTo &&
      (sched.align_p < 0 || sched.align_p > n))
    throw ScheduleInfeasible("construct_chain: align index out of range");

  ChainResult res;
  res.coords.assign(n + 2, 0.0);
  auto fail = [&](int step, const char* why) {
    res.ok = false;
    res.failed_step = step;
    res.reason = why;
    return res;
  };
  if (!(E > 0.0)) return fail(-1, "nonpositive energy");

  auto interior = [](double x) {
    return std::abs(x) < 1.0 && std::abs(x) > 1e-12;
  };

  auto& X = res.coords;
  const int mid = (n % 2 == 1) ? (n + 1) / 2 : n / 2;

  if (n % 2 == 1) {
    if (sched.start != PingPongSchedule::Start::SqrtE)
      throw ScheduleInfeasible("construct_chain: odd n starts at sqrt(E)");
    X[mid] = std::sqrt(E);
    if (!interior(X[mid])) return fail(0, "sqrt(E) outside (-1,1)");
    for (int k = 1; k <= mid; ++k) {
      double level = cheb::T(kappa, X[mid + k - 1]);
      try {
        X[mid - k] = cheb::inv_T_on_well(cheb::Well(kappa, sched.branch_wells[k - 1]), level);
      } catch (const cheb::BranchRangeError&) {
        return fail(k, "inverse level outside branch range");
      }
      if (!interior(X[mid - k])) return fail(k, "chain point left (-1,1)");
      X[mid + k] = E / X[mid - k];
      if (mid + k <= n && !interior(X[mid + k]))
        return fail(k, "multiplicative point left (-1,1)");
    }
  } else {
    if (sched.start != PingPongSchedule::Start::LevelCosine)
      throw ScheduleInfeasible("construct_chain: even n starts at a cosine level");
    X[mid] = cos_node(kappa, sched.start_level_j);
    if (!interior(X[mid])) return fail(0, "start level outside (-1,1)");
    X[mid + 1] = E / X[mid];
    if (mid + 1 <= n && !interior(X[mid + 1]))
      return fail(0, "multiplicative point left (-1,1)");
    for (int k = 1; k <= mid; ++k) {
      double level = cheb::T(kappa, X[mid + k]);
      try {
        X[mid - k] = cheb::inv_T_on_well(cheb::Well(kappa, sched.branch_wells[k - 1]), level);
      } catch (const cheb::BranchRangeError&) {
        return fail(k, "inverse level outside branch range");
      }
      if (!interior(X[mid - k])) return fail(k, "chain point left (-1,1)");
      X[mid + k + 1] = E / X[mid - k];
      if (mid + k + 1 <= n && !interior(X[mid + k + 1]))
        return fail(k, "multiplicative point left (-1,1)");
    }
  }

  constexpr double kOrderSlack = 1e-12;
  if (sched.ordering == PingPongSchedule::Ordering::Increasing) {
    for (int i = 0; i < n; ++i)
      if (!(X[i + 1] > X[i] - kOrderSlack)) return fail(i, "chain ordering broke");
  } else if (sched.ordering == PingPongSchedule::Ordering::Decreasing) {
    for (int i = 0; i < n; ++i)
      if (!(X[i + 1] < X[i] + kOrderSlack)) return fail(i, "chain ordering broke");
  }

  res.ok = true;
  return res;
}

// ---------------------------------------------------------------------------
// Energy calibration
// ---------------------------------------------------------------------------

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double terminal_residual(int kappa, const PingPongSchedule& sched,
                         const ChainResult& chain) {
  const auto& X = chain.coords;
  if (sched.terminal == PingPongSchedule::Terminal::LevelCosine)
    return X.back() - cos_node(kappa, sched.terminal_level_j);
  return cheb::T(kappa, X.back()) - cheb::T(kappa, X[sched.align_p]);
}

// Residual with construction failures mapped to +inf for decreasing families
// and -inf for increasing ones, matching the proofs' monotonicity direction.
double standard_residual(int kappa, int n, const PingPongSchedule& sched,
                         double E, bool decreasing) {
  ChainResult c = construct_chain(kappa, n, sched, E);
  if (!c.ok) return decreasing ? kInf : -kInf;
  return terminal_residual(kappa, sched, c);
}

double bisect_monotone(int kappa, int n, const PingPongSchedule& sched,
                       double lo, double hi, bool decreasing,
                       const SolveOptions& opts) {
  // The terminal residual is strictly increasing in E inside the admissible
  // set, and the failure conventions keep that orientation outside it, so
  // the sign predicate is monotone over the whole bracket.
  auto low_side = [&](double E) {
    return standard_residual(kappa, n, sched, E, decreasing) < 0.0;
  };
  double a = lo, b = hi;
  if (!low_side(a) || low_side(b)) {
    // fall back to a linear scan for an interior sign change
    const int N = std::max(opts.bracket_samples, 8);
    bool bracketed = false;
    double prevE = lo;
    bool prevLow = low_side(lo);
    for (int i = 1; i <= N; ++i) {
      double e = lo + (hi - lo) * static_cast<double>(i) / N;
      bool isLow = low_side(e);
      if (prevLow && !isLow) {
        a = prevE;
        b = e;
        bracketed = true;
        break;
      }
      prevE = e;
      prevLow = isLow;
    }
    if (!bracketed)
      throw NoConvergence("no terminal sign change in the family bracket");
  }
  for (int it = 0; it < opts.max_iter; ++it) {
    double midE = 0.5 * (a + b);
    if (midE <= a || midE >= b) break;  // interval at machine resolution
    if (low_side(midE))
      a = midE;
    else
      b = midE;
  }
  return 0.5 * (a + b);
}

std::pair<double, double> family_bracket(int kappa, const Family& fam) {
  const int j = fam.well_j;
  if (fam.kind == FamilyKind::J2Decreasing || fam.kind == FamilyKind::WellDecreasing) {
    double cj = cos_node(kappa, j);
    return {cj * cj, cos_node(kappa, j - 1) * cj};
  }
  double cjp = cos_node(kappa, j + 1);
  return {cos_node(kappa, j) * cjp, cos_node(kappa, j - 1) * cjp};
}

void tag_assumption(ThresholdSolution& sol) {
  // Sign patterns of X_q * X_{n-q} and T'(X_q) * T'(X_{n-q}) decide AO/AE
  // membership; computed, never assumed.
  if (sol.family.kind == FamilyKind::Alignment) {
    sol.assumption = Assumption::AlignmentSigns;
    return;
  }
  const int n = sol.n;
  const int m = sol.omega_count();
  const bool odd = n % 2 == 1;
  sol.mix_I1.clear();
  sol.mix_I2.clear();
  bool all_tagged = true;
  for (int q = 0; q < m; ++q) {
    double s1 = sol.coords[q] * sol.coords[n - q];
    double s2 = cheb::T_prime(sol.kappa, sol.coords[q]) *
                cheb::T_prime(sol.kappa, sol.coords[n - q]);
    if (s1 > 0.0 && s2 < 0.0)
      sol.mix_I1.push_back(q);
    else if (s1 < 0.0 && s2 > 0.0)
      sol.mix_I2.push_back(q);
    else
      all_tagged = false;
  }
  if (!all_tagged) {
    sol.assumption = Assumption::Unknown;
  } else if (sol.mix_I2.empty()) {
    sol.assumption = odd ? Assumption::AO1 : Assumption::AE1;
  } else if (sol.mix_I1.empty()) {
    sol.assumption = odd ? Assumption::AO2 : Assumption::AE2;
  } else {
    sol.assumption = odd ? Assumption::AO3 : Assumption::AE3;
  }
}

std::vector<double> oracle_with_fallback(const ThresholdSolution& sol) {
  // The omega weights are independent of the frequency multipliers, but a
  // particular choice can make the g-value matrix singular; walk a few sets.
  const int m = sol.omega_count();
  for (int offset = 0; offset < 4; ++offset) {
    std::vector<int> js(m);
    for (int i = 0; i < m; ++i) js[i] = 1 + offset + i * (offset < 2 ? 1 : 2);
    try {
      return omega_matrix_oracle(sol, js);
    } catch (const SingularSystem&) {
    }
  }
  throw SingularSystem("omega oracle singular for every probed index set");
}

void attach_omegas(ThresholdSolution& sol) {
  if (sol.n < 1) return;
  try {
    if (sol.family.kind == FamilyKind::Alignment) {
      const int p = sol.family.align_p;
      const bool has_closed_form =
          (sol.n == 1 && p == 0) || (sol.n == 2 && p == 0) ||
          (sol.n == 3 && (p == 0 || p == 1)) ||
          (sol.n == 4 && (p == 0 || p == 1));
      if (has_closed_form)
        sol.omegas = omega_alignment(sol, sol.n, p);
      else
        sol.omegas = oracle_with_fallback(sol);
    } else {
      sol.omegas = omega_closed_form(sol);
    }
    sol.omegas_all_negative =
        !sol.omegas.empty() &&
        std::all_of(sol.omegas.begin(), sol.omegas.end(),
                    [](double w) { return w < 0.0; });
  } catch (const DegenerateFactor&) {
    sol.omegas.clear();
    sol.omegas_all_negative = false;
  } catch (const SingularSystem&) {
    sol.omegas.clear();
    sol.omegas_all_negative = false;
  }
}

ThresholdSolution finish_solution(int kappa, int n, const Family& fam,
                                  const PingPongSchedule& sched, double E) {
  ChainResult chain = construct_chain(kappa, n, sched, E);
  if (!chain.ok)
    throw NoConvergence("calibrated energy fails to build a chain: " + chain.reason);
  ThresholdSolution sol;
  sol.kappa = kappa;
  sol.n = n;
  sol.family = fam;
  sol.energy = E;
  sol.coords = chain.coords;
  sol.residual = terminal_residual(kappa, sched, chain);
  tag_assumption(sol);
  attach_omegas(sol);
  return sol;
}

ThresholdSolution trivial_endpoint_solution(int kappa, const Family& fam) {
  // n = 0: the band's supremum with its two-point chain; no omega weights.
  ThresholdSolution sol;
  sol.kappa = kappa;
  sol.n = 0;
  sol.family = fam;
  const int j = fam.well_j;
  sol.coords = {cos_node(kappa, j), cos_node(kappa, j - 1)};
  sol.energy = sol.coords[0] * sol.coords[1];
  sol.residual = 0.0;
  sol.assumption = Assumption::Unknown;
  return sol;
}

ThresholdSolution solve_standard(int kappa, int n, const Family& fam,
                                 const SolveOptions& opts) {
  if (kappa < 4 || kappa % 2 != 0)
    throw std::invalid_argument("solver: kappa must be even >= 4");
  if (n == 0) return trivial_endpoint_solution(kappa, fam);
  if (n < 0) throw std::invalid_argument("solver: n must be >= 0");
  const bool dec = fam.kind == FamilyKind::J2Decreasing ||
                   fam.kind == FamilyKind::WellDecreasing;
  PingPongSchedule sched = PingPongSchedule::standard(kappa, n, fam);
  auto [lo, hi] = family_bracket(kappa, fam);
  // Shrink only a few ulps on the accumulation side: the increasing families
  // close in on sup of their bracket super-exponentially (F_6 for kappa = 6
  // sits ~8e-13 below it) and a 1e-9 margin would swallow those roots.
  const double acc = 8.0 * std::numeric_limits<double>::epsilon();
  if (dec) {
    lo += acc;
    hi -= 1e-9;
  } else {
    lo += 1e-9;
    hi -= acc;
  }
  if (!(lo < hi)) throw NoConvergence("empty family bracket");
  double E = bisect_monotone(kappa, n, sched, lo, hi, dec, opts);
  return finish_solution(kappa, n, fam, sched, E);
}

}  // namespace

ThresholdSolution solve_J2(int kappa, int n, const SolveOptions& opts) {
  return solve_standard(kappa, n, Family::j2(), opts);
}

ThresholdSolution solve_F(int kappa, int n, const SolveOptions& opts) {
  if (kappa < 6)
    throw std::invalid_argument("solve_F: kappa must be even >= 6");
  return solve_standard(kappa, n, Family::f(), opts);
}

ThresholdSolution solve_well(int kappa, int j, int n, Direction dir,
                             const SolveOptions& opts) {
  Family fam = (dir == Direction::Decreasing) ? Family::well_decreasing(j)
                                              : Family::well_increasing(j);
  return solve_standard(kappa, n, fam, opts);
}

// ---------------------------------------------------------------------------
// Alignment solutions
// ---------------------------------------------------------------------------

std::vector<ThresholdSolution> solve_alignment_all(const AlignmentProblem& prob,
                                                   const SolveOptions& opts) {
  if (prob.schedule.terminal != PingPongSchedule::Terminal::AlignTo)
    throw ScheduleInfeasible("solve_alignment: schedule terminal must be AlignTo");
  const int N = std::max(opts.bracket_samples, 16);
  const double lo = prob.bracket_lo, hi = prob.bracket_hi;
  if (!(lo < hi)) throw ScheduleInfeasible("solve_alignment: empty bracket");

  auto residual = [&](double E) -> double {
    ChainResult c = construct_chain(prob.kappa, prob.n, prob.schedule, E);
    if (!c.ok) return std::numeric_limits<double>::quiet_NaN();
    return terminal_residual(prob.kappa, prob.schedule, c);
  };

  std::vector<ThresholdSolution> found;
  double prevE = lo, prevR = residual(lo);
  for (int i = 1; i <= N; ++i) {
    double e = lo + (hi - lo) * static_cast<double>(i) / N;
    double r = residual(e);
    if (std::isfinite(prevR) && std::isfinite(r) &&
        (prevR == 0.0 || (prevR < 0.0) != (r < 0.0))) {
      double a = prevE, b = e, ra = prevR;
      for (int it = 0; it < opts.max_iter; ++it) {
        double midE = 0.5 * (a + b);
        if (midE <= a || midE >= b) break;
        double rm = residual(midE);
        if (!std::isfinite(rm)) break;
        if ((rm < 0.0) == (ra < 0.0)) {
          a = midE;
          ra = rm;
        } else {
          b = midE;
        }
      }
      double E = 0.5 * (a + b);
      Family fam = Family::alignment(prob.schedule.align_p);
      try {
        ThresholdSolution sol =
            finish_solution(prob.kappa, prob.n, fam, prob.schedule, E);
        // discard sign changes across residual jumps (no actual root there)
        if (std::abs(sol.residual) < 1e-6) found.push_back(std::move(sol));
      } catch (const NoConvergence&) {
        // root drifted outside the admissible set; skip it
      }
    }
    prevE = e;
    prevR = r;
  }
  return found;
}

ThresholdSolution solve_alignment(const AlignmentProblem& prob,
                                  double energy_hint, const SolveOptions& opts) {
  auto all = solve_alignment_all(prob, opts);
  if (all.empty())
    throw ScheduleInfeasible("solve_alignment: no calibrated energy in bracket");
  auto best = std::min_element(all.begin(), all.end(),
                               [&](const auto& s1, const auto& s2) {
                                 return std::abs(s1.energy - energy_hint) <
                                        std::abs(s2.energy - energy_hint);
                               });
  return *best;
}

// ---------------------------------------------------------------------------
// omega weights
//
// The increasing families accumulate super-exponentially, so their late
// chains sit within ~1e-12 of the well boundaries and the weights stop being
// computable in double. When the degeneracy indicators fire, the chain is
// re-solved in __float128 and the weights are evaluated there.
// ---------------------------------------------------------------------------

namespace {

using detail::q_abs;
using detail::q_solve_dense;
using detail::qreal;
using detail::r_g2;
using detail::r_m;
using detail::r_U;

// Quad re-solve of a standard family; empty result when the family metadata
// does not describe the stored dimension-2 solution.
std::vector<qreal> q_resolve_standard(const ThresholdSolution& sol) {
  if (sol.n < 1 || !sol.lift_factors.empty()) return {};
  detail::QuadChain c =
      detail::q_refine_standard(sol.kappa, sol.n, sol.family, sol.energy, sol.coords);
  if (!c.ok) return {};
  for (size_t i = 0; i < c.coords.size(); ++i)
    if (std::abs(static_cast<double>(c.coords[i]) - sol.coords[i]) > 1e-6) return {};
  return c.coords;
}

}  // namespace

double sol_g(const ThresholdSolution& sol, int j_mult, int q) {
  if (sol.lift_factors.empty())
    return gfun::g2(sol.energy, j_mult, sol.kappa, sol.coords[q]);
  if (sol.lift_factors.size() == 1)
    return gfun::g3(sol.energy, j_mult, sol.kappa, sol.coords[q],
                    sol.lift_factors[0]);
  throw std::invalid_argument("sol_g: dimensions above 3 are out of scope");
}

double sol_g_prime(const ThresholdSolution& sol, int j_mult, int q) {
  if (!sol.lift_factors.empty())
    throw std::invalid_argument("sol_g_prime: dimension-2 solutions only");
  return gfun::g2_prime(sol.energy, j_mult, sol.kappa, sol.coords[q]);
}

namespace {

// Product formulas for the odd/even systems over any real type.
template <typename Real>
std::vector<Real> closed_form_impl(int kappa, int n, const std::vector<Real>& X) {
  auto w = [&](int q) {
    Real v = r_m(X[q]) * r_U(kappa - 1, X[q]);
    if (q_abs(static_cast<qreal>(v)) < qreal(1e-12))
      throw DegenerateFactor(
          "omega_closed_form: m(X)*U_{kappa-1}(X) below 1e-12 at q=" +
          std::to_string(q));
    return v;
  };
  std::vector<Real> out;
  if (n % 2 == 1) {
    const int h = (n - 1) / 2;
    for (int q = 0; q <= h; ++q) {
      Real val = Real(2) * ((h - q) % 2 == 0 ? Real(1) : Real(-1));
      for (int p = q; p <= h; ++p) val *= X[p];
      for (int p = h + 1; p <= n - q; ++p) val /= X[p];
      for (int p = h + 1; p <= n - q; ++p) val *= w(p);
      for (int p = q; p <= h; ++p) val /= w(p);
      out.push_back(val);
    }
  } else {
    const int h = n / 2;
    for (int q = 0; q <= h - 1; ++q) {
      Real val = ((h - 1 - q) % 2 == 0 ? Real(1) : Real(-1));
      for (int p = q; p <= h - 1; ++p) val *= X[p];
      for (int p = h + 1; p <= n - q; ++p) val /= X[p];
      for (int p = h + 1; p <= n - q; ++p) val *= w(p);
      for (int p = q; p <= h - 1; ++p) val /= w(p);
      out.push_back(val);
    }
  }
  return out;
}

// A denominator factor this small wipes out double precision; the chain gets
// re-solved in quad when the family metadata allows it.
bool needs_escalation(const ThresholdSolution& sol) {
  const int m = sol.omega_count();
  for (int q = 0; q < m; ++q) {
    double v = gfun::m(sol.coords[q]) * cheb::U(sol.kappa - 1, sol.coords[q]);
    if (std::abs(v) < 1e-6) return true;
  }
  return false;
}

}  // namespace

std::vector<double> omega_closed_form(const ThresholdSolution& sol) {
  if (sol.n < 1) return {};
  if (needs_escalation(sol)) {
    auto qx = q_resolve_standard(sol);
    if (!qx.empty()) {
      auto qo = closed_form_impl<qreal>(sol.kappa, sol.n, qx);
      std::vector<double> out(qo.size());
      for (size_t i = 0; i < qo.size(); ++i) out[i] = static_cast<double>(qo[i]);
      return out;
    }
  }
  return closed_form_impl<double>(sol.kappa, sol.n, sol.coords);
}

std::vector<double> omega_matrix_oracle(const ThresholdSolution& sol,
                                        const std::vector<int>& j_indices) {
  const int m = sol.omega_count();
  if (m == 0) return {};
  if (static_cast<int>(j_indices.size()) != m)
    throw std::invalid_argument("omega_matrix_oracle: need exactly " +
                                std::to_string(m) + " frequency multipliers");
  std::set<int> uniq(j_indices.begin(), j_indices.end());
  if (static_cast<int>(uniq.size()) != m || *uniq.begin() < 1)
    throw std::invalid_argument("omega_matrix_oracle: multipliers must be distinct positives");

  const int mid = sol.relation_mid();
  std::vector<std::vector<double>> A(m, std::vector<double>(m));
  std::vector<double> b(m);
  for (int i = 0; i < m; ++i) {
    for (int c = 0; c < m; ++c) A[i][c] = sol_g(sol, j_indices[i], m - 1 - c);
    b[i] = sol_g(sol, j_indices[i], mid);
  }

  // Column scales differ by orders of magnitude when chain points approach
  // the well boundaries; equilibrate before the rank test, and escalate to a
  // quad re-solve when a column has essentially vanished.
  std::vector<double> colscale(m, 0.0);
  double worst_ratio = 1.0;
  {
    double biggest = 0.0;
    for (int c = 0; c < m; ++c) {
      for (int i = 0; i < m; ++i) colscale[c] = std::max(colscale[c], std::abs(A[i][c]));
      biggest = std::max(biggest, colscale[c]);
    }
    for (int c = 0; c < m; ++c)
      if (colscale[c] > 0.0)
        worst_ratio = std::min(worst_ratio, colscale[c] / biggest);
  }

  if (worst_ratio < 1e-6) {
    auto qx = q_resolve_standard(sol);
    if (!qx.empty()) {
      qreal E = static_cast<qreal>(0);
      // energy consistent with the refined chain: X_{n-q} X_{1+q} = E
      E = qx[0] * qx[sol.n + 1];
      std::vector<std::vector<qreal>> QA(m, std::vector<qreal>(m));
      std::vector<qreal> qb(m);
      for (int i = 0; i < m; ++i) {
        for (int c = 0; c < m; ++c)
          QA[i][c] = r_g2(E, j_indices[i], sol.kappa, qx[m - 1 - c]);
        qb[i] = r_g2(E, j_indices[i], sol.kappa, qx[mid]);
      }
      auto qx_sol = q_solve_dense(std::move(QA), std::move(qb));
      std::vector<double> omegas(m);
      for (int q = 0; q < m; ++q) omegas[q] = static_cast<double>(qx_sol[m - 1 - q]);
      return omegas;
    }
  }

  for (int c = 0; c < m; ++c) {
    if (colscale[c] <= 0.0) colscale[c] = 1.0;
    for (int i = 0; i < m; ++i) A[i][c] /= colscale[c];
  }
  auto res = detail::solve_dense(std::move(A), std::move(b), 1e-10);
  if (!res.ok)
    throw SingularSystem("omega_matrix_oracle: g-value matrix is singular (rank " +
                         std::to_string(res.rank) + " of " + std::to_string(m) + ")");
  std::vector<double> omegas(m);
  for (int q = 0; q < m; ++q) omegas[q] = res.x[m - 1 - q] / colscale[m - 1 - q];
  return omegas;
}

std::vector<double> omega_alignment(const ThresholdSolution& sol, int n, int p) {
  if (sol.n != n)
    throw std::invalid_argument("omega_alignment: n does not match the solution");
  const auto& X = sol.coords;
  const int kappa = sol.kappa;
  auto r = [&](int q) {
    return gfun::m(X[q]) * cheb::U(kappa - 1, X[q]) / X[q];
  };
  if (n == 1 && p == 0) return {2.0 * r(1) / (r(0) + r(2))};
  if (n == 2 && p == 0) return {r(2) / (r(0) + r(3))};
  if (n == 3 && p == 1) {
    double den = r(0) * r(1) - r(3) * r(4);
    return {-2.0 * r(2) * r(3) / den, 2.0 * r(0) * r(2) / den};
  }
  if (n == 3 && p == 0) {
    double den = r(0) * r(1) + r(1) * r(4);
    return {-2.0 * r(2) * r(3) / den, 2.0 * (r(0) * r(2) + r(2) * r(4)) / den};
  }
  if (n == 4 && p == 0) {
    double den = r(0) * r(1) + r(1) * r(5);
    return {-r(3) * r(4) / den, (r(0) * r(3) + r(3) * r(5)) / den};
  }
  if (n == 4 && p == 1) {
    double den = r(0) * r(1) - r(4) * r(5);
    return {-r(3) * r(4) / den, r(0) * r(3) / den};
  }
  throw UnsupportedPair("omega_alignment: no closed form for (n,p)=(" +
                        std::to_string(n) + "," + std::to_string(p) + ")");
}

std::vector<double> theta0_set(int kappa, int d) {
  if (kappa < 2 || kappa % 2 != 0)
    throw std::invalid_argument("theta0_set: kappa must be even >= 2");
  if (d != 2 && d != 3)
    throw std::invalid_argument("theta0_set: d must be 2 or 3");
  std::vector<double> vals;
  for (int j1 = 0; j1 <= kappa; ++j1) {
    for (int j2 = 0; j2 <= kappa; ++j2) {
      if (d == 2) {
        vals.push_back(cos_node(kappa, j1) * cos_node(kappa, j2));
      } else {
        for (int j3 = 0; j3 <= kappa; ++j3)
          vals.push_back(cos_node(kappa, j1) * cos_node(kappa, j2) *
                         cos_node(kappa, j3));
      }
    }
  }
  std::sort(vals.begin(), vals.end());
  std::vector<double> out;
  for (double v : vals)
    if (out.empty() || v - out.back() > 1e-12) out.push_back(v);
  return out;
}

ThresholdSolution lift_threshold(const ThresholdSolution& sol, int j) {
  if (j < 0 || j > sol.kappa)
    throw std::invalid_argument("lift_threshold: j out of range 0..kappa");
  if (2 * j == sol.kappa)
    throw ZeroFactor("lift_threshold: cos(j*pi/kappa) = 0 at j = kappa/2");
  ThresholdSolution lifted = sol;
  const double factor = cos_node(sol.kappa, j);
  lifted.energy = sol.energy * factor;
  lifted.dimension = sol.dimension + 1;
  lifted.lift_factors.push_back(factor);
  return lifted;
}

// ---------------------------------------------------------------------------
// Continued fractions and the convergence study
// ---------------------------------------------------------------------------

double continued_fraction_solve(int kappa, int n, Parity parity,
                                const SolveOptions& opts) {
  if (kappa != 4 && kappa != 6)
    throw std::invalid_argument("continued_fraction_solve: kappa must be 4 or 6");
  if (n < 1) throw std::invalid_argument("continued_fraction_solve: n must be >= 1");

  auto step = [kappa](double E, double x) -> double {
    double t = E / x;
    double s = 1.0 - t * t;
    if (s < 0.0) return std::numeric_limits<double>::quiet_NaN();
    if (kappa == 4) return std::sqrt(s);
    return 0.5 * (t + std::sqrt(3.0) * std::sqrt(s));
  };
  auto h = [&](double E) -> double {
    double x = (parity == Parity::Even) ? cos_node(kappa, 1) : std::sqrt(E);
    for (int k = 0; k < n; ++k) {
      x = step(E, x);
      if (!std::isfinite(x)) return std::numeric_limits<double>::quiet_NaN();
    }
    return x - E;
  };

  // Below the fixed point the descending orbit survives all n steps and lands
  // above E (h > 0); above it, h turns negative and eventually the orbit
  // leaves its domain. Bisection on that monotone predicate resolves the root
  // even when the surviving window is far narrower than any uniform scan.
  auto low_side = [&](double E) {
    double r = h(E);
    return std::isfinite(r) && r > 0.0;
  };

  const double c = cos_node(kappa, 1);
  double lo = c * c + 1e-12, hi = c - 1e-12;
  if (!low_side(lo) || low_side(hi))
    throw NoConvergence("continued_fraction_solve: no fixed point in the J2 bracket");
  for (int it = 0; it < opts.max_iter; ++it) {
    double midE = 0.5 * (lo + hi);
    if (midE <= lo || midE >= hi) break;
    if (low_side(midE))
      lo = midE;
    else
      hi = midE;
  }
  return 0.5 * (lo + hi);
}

ConvergenceStudy convergence_study(int kappa, int N, const SolveOptions& opts) {
  if (N < 10)
    throw std::invalid_argument("convergence_study: N must be >= 10");
  ConvergenceStudy study;
  const double limit = cos_node(kappa, 1) * cos_node(kappa, 1);
  for (int n = 10; n <= N; n += 10) {
    double e2n = continued_fraction_solve(kappa, n, Parity::Even, opts);
    study.points.emplace_back(std::log(static_cast<double>(n)), std::log(e2n - limit));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double cnt = static_cast<double>(study.points.size());
  for (auto [x, y] : study.points) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  study.slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  study.intercept = (sy - study.slope * sx) / cnt;
  return study;
}

// ---------------------------------------------------------------------------
// Documented alignment constructions, kappa = 6
// ---------------------------------------------------------------------------

namespace {

AlignmentCase make_case(int n, int p, double energy, int start_level_j,
                        std::vector<int> wells) {
  AlignmentCase c;
  c.n = n;
  c.p = p;
  c.energy = energy;
  c.problem.kappa = 6;
  c.problem.n = n;
  PingPongSchedule& s = c.problem.schedule;
  if (n % 2 == 1) {
    s.start = PingPongSchedule::Start::SqrtE;
  } else {
    s.start = PingPongSchedule::Start::LevelCosine;
    s.start_level_j = start_level_j;
  }
  s.terminal = PingPongSchedule::Terminal::AlignTo;
  s.align_p = p;
  s.branch_wells = std::move(wells);
  s.ordering = PingPongSchedule::Ordering::None;
  // second gap of kappa = 6: (cos^2(2pi/6), cos(2pi/6)) = (1/4, 1/2)
  c.problem.bracket_lo = 0.25 + 1e-6;
  c.problem.bracket_hi = 0.5 - 1e-6;
  return c;
}

}  // namespace

const std::vector<AlignmentCase>& alignment_catalog_k6() {
  static const std::vector<AlignmentCase> catalog = {
      make_case(1, 0, 0.375, 0, {1}),
      make_case(2, 0, 0.46353, 1, {1}),
      make_case(2, 0, 0.32569, 2, {1}),
      make_case(3, 1, 0.30227, 0, {1, 2}),
      make_case(3, 0, 0.30118, 0, {3, 1}),
      make_case(4, 0, 0.49898, 1, {1, 1}),
      make_case(4, 1, 0.28780, 2, {1, 2}),
      make_case(4, 0, 0.28709, 2, {3, 1}),
      make_case(5, 2, 0.27878, 0, {3, 3, 3}),
      make_case(5, 1, 0.27867, 0, {3, 3, 3}),
      make_case(5, 0, 0.27819, 0, {3, 3, 3}),
  };
  return catalog;
}

}  // namespace mvband::solver
