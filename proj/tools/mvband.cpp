// Command-line front end: reproducible threshold runs, coefficient
// interpolation, positivity scans, band extraction, profiles and the
// convergence regression. Records stream as JSON lines; grids land in CSV.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mvband/cheb.hpp"
#include "mvband/interp.hpp"
#include "mvband/io.hpp"
#include "mvband/scan.hpp"
#include "mvband/solver.hpp"

namespace {

using namespace mvband;
using nlohmann::ordered_json;

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitNegativeCertificate = 4;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::unique_ptr<std::ofstream> open_out(const std::string& path) {
  if (path.empty()) return nullptr;
  auto f = std::make_unique<std::ofstream>(path);
  if (!*f) throw UsageError("cannot open output file: " + path);
  return f;
}

std::ostream& pick(std::unique_ptr<std::ofstream>& file) {
  return file ? *file : std::cout;
}

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stoi(tok));
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stod(tok));
  }
  return out;
}

gfun::ConjugateOperator band_operator(int kappa, int n) {
  auto left = solver::solve_J2(kappa, n);
  auto right = solver::solve_J2(kappa, n - 1);
  auto sys = interp::build_system(kappa, n, left, right,
                                  interp::canonical_sigma(kappa, n));
  return interp::solve_rho(sys);
}

gfun::ConjugateOperator resolve_operator(int kappa, bool trivial, int band,
                                         const std::string& sigma_csv,
                                         const std::string& rho_csv) {
  if (trivial) return gfun::ConjugateOperator::trivial(kappa);
  if (!sigma_csv.empty() || !rho_csv.empty()) {
    if (sigma_csv.empty() || rho_csv.empty())
      throw UsageError("--sigma and --rho must be given together");
    return gfun::ConjugateOperator(kappa, parse_int_list(sigma_csv),
                                   parse_double_list(rho_csv));
  }
  if (band >= 1) return band_operator(kappa, band);
  throw UsageError("select an operator: --trivial, --band N, or --sigma/--rho");
}

// ---------------------------------------------------------------------------

struct ThresholdsArgs {
  std::string family = "j2";
  int kappa = 4;
  int n_max = 6;
  int well_j = 2;
  std::string out, csv;
};

int run_thresholds(const ThresholdsArgs& a) {
  auto out_file = open_out(a.out);
  std::ostream& os = pick(out_file);
  bool any_failure = false;
  std::vector<solver::ThresholdSolution> sols;

  auto emit = [&](const solver::ThresholdSolution& sol) {
    os << io::to_json(sol).dump() << '\n';
    sols.push_back(sol);
  };
  auto emit_error = [&](int n, const std::exception& e) {
    ordered_json j;
    j["n"] = n;
    j["error"] = e.what();
    os << j.dump() << '\n';
    any_failure = true;
  };

  double limit = 0.0;
  if (a.family == "align") {
    if (a.kappa != 6)
      throw UsageError("the documented alignment constructions are for kappa = 6");
    for (const auto& c : solver::alignment_catalog_k6()) {
      try {
        emit(solver::solve_alignment(c.problem, c.energy));
      } catch (const std::exception& e) {
        emit_error(c.n, e);
      }
    }
  } else {
    for (int n = 1; n <= a.n_max; ++n) {
      try {
        if (a.family == "j2") {
          emit(solver::solve_J2(a.kappa, n));
          limit = std::pow(cheb::cos_node(a.kappa, 1), 2);
        } else if (a.family == "f") {
          emit(solver::solve_F(a.kappa, n));
          limit = cheb::cos_node(a.kappa, 2);
        } else if (a.family == "well-dec") {
          emit(solver::solve_well(a.kappa, a.well_j, n, solver::Direction::Decreasing));
          limit = std::pow(cheb::cos_node(a.kappa, a.well_j), 2);
        } else if (a.family == "well-inc") {
          emit(solver::solve_well(a.kappa, a.well_j, n, solver::Direction::Increasing));
          limit = cheb::cos_node(a.kappa, a.well_j - 1) *
                  cheb::cos_node(a.kappa, a.well_j + 1);
        } else {
          throw UsageError("unknown family: " + a.family);
        }
      } catch (const UsageError&) {
        throw;
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      } catch (const std::exception& e) {
        emit_error(n, e);
      }
    }
  }
  if (!a.csv.empty()) {
    auto csv_file = open_out(a.csv);
    io::write_sequence_csv(*csv_file, sols, limit);
  }
  return any_failure ? kExitNumerical : 0;
}

// ---------------------------------------------------------------------------

struct InterpolateArgs {
  int kappa = 4;
  int n = 1;
  std::string sigma_csv;
  bool search = false;
  std::string pool;  // semicolon-separated candidate lists
  std::string out;
};

int run_interpolate(const InterpolateArgs& a) {
  auto out_file = open_out(a.out);
  std::ostream& os = pick(out_file);
  auto left = solver::solve_J2(a.kappa, a.n);
  auto right = solver::solve_J2(a.kappa, a.n - 1);

  if (a.search) {
    std::vector<std::vector<int>> pool;
    std::stringstream ss(a.pool);
    std::string tok;
    while (std::getline(ss, tok, ';'))
      if (!tok.empty()) pool.push_back(parse_int_list(tok));
    if (pool.empty()) throw UsageError("--search needs --pool \"1,2,3,4;1,2,3,5;...\"");
    try {
      auto res = interp::search_sigma(a.kappa, a.n, pool);
      ordered_json j;
      j["accepted"] = io::to_json(res.op);
      j["min_interior_G"] = res.evidence.min_interior;
      ordered_json outcomes = ordered_json::array();
      for (const auto& o : res.outcomes) {
        ordered_json jo;
        jo["sigma"] = o.sigma;
        jo["accepted"] = o.accepted;
        jo["reason"] = o.reason;
        if (o.has_witness)
          jo["witness"] = {{"energy", o.witness.energy},
                           {"x", o.witness.x},
                           {"G", o.witness.value}};
        outcomes.push_back(jo);
      }
      j["candidates"] = outcomes;
      os << j.dump(2) << '\n';
      return 0;
    } catch (const interp::NoValidSigma& e) {
      ordered_json j;
      j["error"] = e.what();
      ordered_json outcomes = ordered_json::array();
      for (const auto& o : e.outcomes) {
        ordered_json jo;
        jo["sigma"] = o.sigma;
        jo["reason"] = o.reason;
        if (o.has_witness)
          jo["witness"] = {{"energy", o.witness.energy},
                           {"x", o.witness.x},
                           {"G", o.witness.value}};
        outcomes.push_back(jo);
      }
      j["candidates"] = outcomes;
      os << j.dump(2) << '\n';
      return kExitNumerical;
    }
  }

  std::vector<int> sigma = a.sigma_csv.empty() ? interp::canonical_sigma(a.kappa, a.n)
                                               : parse_int_list(a.sigma_csv);
  auto sys = interp::build_system(a.kappa, a.n, left, right, sigma);
  auto op = interp::solve_rho(sys);
  ordered_json j = io::to_json(op);
  j["band"] = a.n;
  j["band_interval"] = {left.energy, right.energy};
  j["rank_estimate"] = sys.rank_estimate;
  ordered_json residuals = ordered_json::array();
  for (const auto& row : sys.rows) {
    double v = row.derivative ? gfun::G_prime(op, row.energy, row.x)
                              : gfun::G(op, row.energy, row.x);
    residuals.push_back(v);
  }
  j["constraint_residuals"] = residuals;
  os << j.dump(2) << '\n';
  return 0;
}

// ---------------------------------------------------------------------------

struct ScanArgs {
  int kappa = 4;
  int dim = 2;
  double energy = 0.6;
  bool trivial = false;
  int band = 0;
  std::string sigma_csv, rho_csv;
  int n_x = 4001, n_y = 801;
  bool full_domain = false;
  bool require_positive = false;
  double tol_sign = 1e-9;
  std::string out;
};

int run_scan(const ScanArgs& a) {
  auto op = resolve_operator(a.kappa, a.trivial, a.band, a.sigma_csv, a.rho_csv);
  auto out_file = open_out(a.out);
  std::ostream& os = pick(out_file);
  scan::MinResult m = (a.dim == 2)
                          ? scan::min_G_2d(op, a.energy, a.n_x)
                          : scan::min_G_3d(op, a.energy, a.n_x, a.n_y, a.full_domain);
  ordered_json j;
  j["kappa"] = a.kappa;
  j["dim"] = a.dim;
  j["energy"] = a.energy;
  j["min_G"] = m.value;
  j["argmin_x"] = m.x;
  if (a.dim == 3) j["argmin_y"] = m.y;
  os << j.dump() << '\n';
  if (a.require_positive && m.value < -a.tol_sign) return kExitNegativeCertificate;
  return 0;
}

// ---------------------------------------------------------------------------

struct BandsArgs {
  int kappa = 4;
  int dim = 2;
  bool trivial = false;
  int band = 0;
  std::string sigma_csv, rho_csv;
  double window_lo = 0.0005, window_hi = 0.9995;
  int n_E = 2001, n_x = 4001, n_y = 801;
  int jobs = 1;
  double tol_sign = 1e-9;
  bool full_domain = false;
  std::string out;
};

int run_bands(const BandsArgs& a) {
  auto op = resolve_operator(a.kappa, a.trivial, a.band, a.sigma_csv, a.rho_csv);
  scan::ScanGrids g;
  g.n_E = a.n_E;
  g.n_x = a.n_x;
  g.n_y = a.n_y;
  g.jobs = a.jobs;
  g.tol_sign = a.tol_sign;
  g.full_domain = a.full_domain;
  auto rep = scan::find_bands(op, a.dim, a.window_lo, a.window_hi, g);
  auto out_file = open_out(a.out);
  io::write_bands_csv(pick(out_file), op, a.dim, rep.bands);
  ordered_json j;
  j["bands"] = ordered_json::array();
  for (const auto& b : rep.bands)
    j["bands"].push_back({{"left", b.left},
                          {"right", b.right},
                          {"sign", b.sign},
                          {"min_interior_G", b.min_interior_G}});
  j["witness_count"] = rep.witnesses.size();
  std::cout << j.dump() << '\n';
  return 0;
}

// ---------------------------------------------------------------------------

struct ProfileArgs {
  int kappa = 4;
  int dim = 2;
  double energy = 0.66;
  bool trivial = false;
  int band = 0;
  std::string sigma_csv, rho_csv;
  int n_x = 2001, n_y = 201;
  std::string out;
};

int run_profile(const ProfileArgs& a) {
  auto op = resolve_operator(a.kappa, a.trivial, a.band, a.sigma_csv, a.rho_csv);
  auto out_file = open_out(a.out);
  std::ostream& os = pick(out_file);
  if (a.dim == 2)
    scan::emit_profile(op, a.energy, a.n_x, os);
  else
    scan::emit_profile_3d(op, a.energy, a.n_x, a.n_y, os);
  return 0;
}

// ---------------------------------------------------------------------------

struct ConvergeArgs {
  int kappa = 4;
  int N = 100;
  std::string out;
};

int run_converge(const ConvergeArgs& a) {
  auto study = solver::convergence_study(a.kappa, a.N);
  auto out_file = open_out(a.out);
  io::write_convergence_csv(pick(out_file), study);
  ordered_json j;
  j["kappa"] = a.kappa;
  j["slope"] = study.slope;
  j["intercept"] = study.intercept;
  std::cout << j.dump() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"threshold energies, conjugate-operator coefficients and "
               "commutator positivity scans for the Molchanov-Vainberg lattice "
               "Laplacian"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key = value configuration file")
      ->envname("MVBAND_CONFIG");

  ThresholdsArgs ta;
  auto* th = app.add_subcommand("thresholds", "solve a threshold family");
  th->add_option("--family", ta.family, "j2 | f | well-dec | well-inc | align")
      ->check(CLI::IsMember({"j2", "f", "well-dec", "well-inc", "align"}));
  th->add_option("--kappa", ta.kappa, "even kappa >= 4")->required();
  th->add_option("--n-max", ta.n_max, "solve n = 1..n_max");
  th->add_option("--well-j", ta.well_j, "well index for well families");
  th->add_option("--out", ta.out, "JSON-lines output path (default stdout)");
  th->add_option("--csv", ta.csv, "also write n,energy,gap_to_limit CSV");

  InterpolateArgs ia;
  auto* in = app.add_subcommand("interpolate", "solve band coefficients rho");
  in->add_option("--kappa", ia.kappa)->required();
  in->add_option("--n", ia.n, "band index")->required();
  in->add_option("--sigma", ia.sigma_csv, "multipliers, e.g. 1,2,3,7");
  in->add_flag("--search", ia.search, "search over --pool candidates");
  in->add_option("--pool", ia.pool, "semicolon-separated candidate lists");
  in->add_option("--out", ia.out);

  ScanArgs sa;
  auto* sc = app.add_subcommand("scan", "minimum of G at one energy");
  sc->add_option("--kappa", sa.kappa)->required();
  sc->add_option("--dim", sa.dim)->check(CLI::IsMember({2, 3}));
  sc->add_option("--energy", sa.energy)->required();
  sc->add_flag("--trivial", sa.trivial);
  sc->add_option("--band", sa.band, "use the band-N interpolated operator");
  sc->add_option("--sigma", sa.sigma_csv);
  sc->add_option("--rho", sa.rho_csv);
  sc->add_option("--nx", sa.n_x);
  sc->add_option("--ny", sa.n_y);
  sc->add_flag("--full-domain", sa.full_domain, "scan all d=3 sign quadrants");
  sc->add_flag("--require-positive", sa.require_positive,
               "exit 4 on a negative certificate");
  sc->add_option("--tol-sign", sa.tol_sign);
  sc->add_option("--out", sa.out);

  BandsArgs ba;
  auto* bd = app.add_subcommand("bands", "extract uniform-sign energy bands");
  bd->add_option("--kappa", ba.kappa)->required();
  bd->add_option("--dim", ba.dim)->check(CLI::IsMember({2, 3}));
  bd->add_flag("--trivial", ba.trivial);
  bd->add_option("--band", ba.band);
  bd->add_option("--sigma", ba.sigma_csv);
  bd->add_option("--rho", ba.rho_csv);
  bd->add_option("--window-lo", ba.window_lo);
  bd->add_option("--window-hi", ba.window_hi);
  bd->add_option("--ne", ba.n_E);
  bd->add_option("--nx", ba.n_x);
  bd->add_option("--ny", ba.n_y);
  bd->add_option("--jobs", ba.jobs, "worker threads for the energy grid");
  bd->add_option("--tol-sign", ba.tol_sign);
  bd->add_flag("--full-domain", ba.full_domain);
  bd->add_option("--out", ba.out, "bands CSV path (default stdout)");

  ProfileArgs pa;
  auto* pr = app.add_subcommand("profile", "emit G curve data at one energy");
  pr->add_option("--kappa", pa.kappa)->required();
  pr->add_option("--dim", pa.dim)->check(CLI::IsMember({2, 3}));
  pr->add_option("--energy", pa.energy)->required();
  pr->add_flag("--trivial", pa.trivial);
  pr->add_option("--band", pa.band);
  pr->add_option("--sigma", pa.sigma_csv);
  pr->add_option("--rho", pa.rho_csv);
  pr->add_option("--nx", pa.n_x);
  pr->add_option("--ny", pa.n_y);
  pr->add_option("--out", pa.out);

  ConvergeArgs ca;
  auto* cv = app.add_subcommand("converge", "log-log regression of the even-term gap");
  cv->add_option("--kappa", ca.kappa)->check(CLI::IsMember({4, 6}));
  cv->add_option("--N", ca.N, "largest composition count (points at 10,20,...,N)");
  cv->add_option("--out", ca.out, "points CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (th->parsed()) return run_thresholds(ta);
    if (in->parsed()) return run_interpolate(ia);
    if (sc->parsed()) return run_scan(sa);
    if (bd->parsed()) return run_bands(ba);
    if (pr->parsed()) return run_profile(pa);
    if (cv->parsed()) return run_converge(ca);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const gfun::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
