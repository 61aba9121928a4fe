#include "mvband/io.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace mvband::io {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

nlohmann::ordered_json to_json(const solver::ThresholdSolution& sol) {
  nlohmann::ordered_json j;
  j["kappa"] = sol.kappa;
  j["n"] = sol.n;
  j["family"] = sol.family.name();
  j["dimension"] = sol.dimension;
  j["energy"] = sol.energy;
  j["coords"] = sol.coords;
  if (!sol.lift_factors.empty()) j["lift_factors"] = sol.lift_factors;
  j["omegas"] = sol.omegas;
  j["residual"] = sol.residual;
  j["assumption"] = solver::assumption_name(sol.assumption);
  if (sol.assumption == solver::Assumption::AO3 ||
      sol.assumption == solver::Assumption::AE3) {
    j["I1"] = sol.mix_I1;
    j["I2"] = sol.mix_I2;
  }
  if (!sol.omegas.empty()) j["omegas_all_negative"] = sol.omegas_all_negative;
  return j;
}

nlohmann::ordered_json to_json(const gfun::ConjugateOperator& op) {
  nlohmann::ordered_json j;
  j["kappa"] = op.kappa;
  j["sigma"] = op.sigma;
  j["rho"] = op.rho;
  return j;
}

void write_sequence_csv(std::ostream& os,
                        const std::vector<solver::ThresholdSolution>& sols,
                        double limit) {
  os << "n,energy,gap_to_limit\n";
  for (const auto& sol : sols) {
    os << sol.n << ',' << format_double(sol.energy) << ','
       << format_double(std::abs(sol.energy - limit)) << '\n';
  }
}

void write_bands_csv(std::ostream& os, const gfun::ConjugateOperator& op,
                     int dimension, const std::vector<scan::Band>& bands) {
  os << "kappa,dim,sigma,left,right,min_interior_G\n";
  std::string sigma_field;
  for (size_t i = 0; i < op.sigma.size(); ++i) {
    if (i) sigma_field += ';';
    sigma_field += std::to_string(op.sigma[i]);
  }
  char buf[64];
  for (const auto& b : bands) {
    std::snprintf(buf, sizeof(buf), "%.4f,%.4f", b.left, b.right);
    os << op.kappa << ',' << dimension << ',' << sigma_field << ',' << buf
       << ',' << format_double(b.min_interior_G) << '\n';
  }
}

void write_convergence_csv(std::ostream& os,
                           const solver::ConvergenceStudy& study) {
  os << "log_n,log_gap\n";
  for (auto [x, y] : study.points)
    os << format_double(x) << ',' << format_double(y) << '\n';
  os << "# slope=" << format_double(study.slope)
     << ", intercept=" << format_double(study.intercept) << '\n';
}

}  // namespace mvband::io
