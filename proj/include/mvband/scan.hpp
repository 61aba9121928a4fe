#pragma once

#include <iosfwd>
#include <vector>

#include "mvband/gfun.hpp"

// Grid scanning of G over the constant-energy surface, with local refinement
// around grid extrema, extraction of maximal uniform-sign bands over an
// energy window, and profile emission. An energy belongs to a band when G
// keeps one strict sign over the whole surface (a negative G certifies the
// estimate for the flipped operator). Evenness (kappa even) halves the d=2
// domain to x in [|E|, 1]; d=3 scans default to the positive quadrant with a
// full-domain mode for validating that reduction.

namespace mvband::scan {

using gfun::ConjugateOperator;

struct MinResult {
  double value = 0.0;
  double x = 0.0;
  double y = 0.0;  // unused in dimension 2
};

struct Extrema {
  MinResult min;
  MinResult max;
};

MinResult min_G_2d(const ConjugateOperator& op, double E, int n_x);
MinResult min_G_3d(const ConjugateOperator& op, double E, int n_x, int n_y,
                   bool full_domain = false);

Extrema extrema_2d(const ConjugateOperator& op, double E, int n_x);
Extrema extrema_3d(const ConjugateOperator& op, double E, int n_x, int n_y,
                   bool full_domain = false);

struct Band {
  double left = 0.0;
  double right = 0.0;
  int sign = +1;               // sign G keeps over the band
  bool verified = false;
  double min_interior_G = 0.0; // smallest sign-normalized margin sign*G seen
};

struct NegativeWitness {
  double energy = 0.0;
  double x = 0.0;
  double y = 0.0;
  double value = 0.0;
};

struct PositivityReport {
  ConjugateOperator op;
  int dimension = 2;
  std::vector<double> energy_grid;
  std::vector<double> min_G;
  std::vector<double> max_G;
  std::vector<MinResult> argmin;
  std::vector<Band> bands;
  std::vector<NegativeWitness> witnesses;  // grid energies with min_G < -tol
  int n_E = 0, n_x = 0, n_y = 0;
};

struct ScanGrids {
  int n_E = 2001;
  int n_x = 4001;
  int n_y = 801;
  double tol_sign = 1e-9;
  int jobs = 1;
  bool full_domain = false;
};

// Scans an energy window inside (0, 1); maximal runs of grid energies where G
// keeps a strict uniform sign become bands, endpoints refined by bisection on
// the sign classification to 1e-4.
PositivityReport find_bands(const ConjugateOperator& op, int dimension,
                            double window_lo, double window_hi,
                            const ScanGrids& grids);

// Strict positivity check over one band interior (used by the sigma search).
struct BandCheck {
  bool positive = false;
  double min_interior = 0.0;
  NegativeWitness witness;
  bool has_witness = false;
  std::vector<double> sample_energies;
  std::vector<double> sample_min;
};

BandCheck check_band(const ConjugateOperator& op, int dimension, double E_left,
                     double E_right, int n_energy, int n_x, double tol_sign,
                     double inset_frac = 0.02);

// CSV rows "E,x,G" over both symmetric components of the domain.
void emit_profile(const ConjugateOperator& op, double E, int n_x,
                  std::ostream& os);

// CSV rows "E,x,y,G" over the positive quadrant.
void emit_profile_3d(const ConjugateOperator& op, double E, int n_x, int n_y,
                     std::ostream& os);

}  // namespace mvband::scan
