#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "mvband/scan.hpp"
#include "mvband/solver.hpp"

// JSON / CSV serialization of the record types. Formats are fixed-order and
// deterministic: identical inputs produce byte-identical output.

namespace mvband::io {

nlohmann::ordered_json to_json(const solver::ThresholdSolution& sol);
nlohmann::ordered_json to_json(const gfun::ConjugateOperator& op);

// CSV "n,energy,gap_to_limit" for a threshold sequence; gap_to_limit is the
// distance to the family's accumulation value, positive from either side.
void write_sequence_csv(std::ostream& os,
                        const std::vector<solver::ThresholdSolution>& sols,
                        double limit);

// CSV "kappa,dim,sigma,left,right,min_interior_G"; sigma entries are joined
// with ';' to keep the column count fixed.
void write_bands_csv(std::ostream& os, const gfun::ConjugateOperator& op,
                     int dimension, const std::vector<scan::Band>& bands);

// CSV "log_n,log_gap" plus a trailing "# slope=..., intercept=..." comment.
void write_convergence_csv(std::ostream& os, const solver::ConvergenceStudy& study);

std::string format_double(double v);

}  // namespace mvband::io
