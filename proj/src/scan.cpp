#include "mvband/scan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace mvband::scan {

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i)
    xs[i] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  xs.front() = lo;
  xs.back() = hi;
  return xs;
}

// Indices of grid local minima (boundaries included), lowest first.
std::vector<int> local_minima(const std::vector<double>& v, int keep) {
  std::vector<int> idx;
  const int n = static_cast<int>(v.size());
  for (int i = 0; i < n; ++i) {
    bool left_ok = (i == 0) || v[i] < v[i - 1];
    bool right_ok = (i == n - 1) || v[i] <= v[i + 1];
    if (left_ok && right_ok) idx.push_back(i);
  }
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return v[a] < v[b]; });
  if (static_cast<int>(idx.size()) > keep) idx.resize(keep);
  return idx;
}

template <typename F>
void refine_min_1d(F&& f, double lo, double hi, double& best_x, double& best_v) {
  // Repeated 9-point subdivision of the bracketing interval.
  double a = lo, b = hi;
  for (int round = 0; round < 24 && (b - a) > 1e-12; ++round) {
    const int pts = 9;
    double step = (b - a) / (pts - 1);
    double loc_x = a, loc_v = std::numeric_limits<double>::infinity();
    for (int i = 0; i < pts; ++i) {
      double x = (i == pts - 1) ? b : a + step * i;
      double v = f(x);
      if (v < loc_v) {
        loc_v = v;
        loc_x = x;
      }
    }
    if (loc_v < best_v) {
      best_v = loc_v;
      best_x = loc_x;
    }
    double na = std::max(a, loc_x - step);
    double nb = std::min(b, loc_x + step);
    a = na;
    b = nb;
  }
}

template <typename F>
void parallel_for(int n, int jobs, F&& body) {
  jobs = std::max(1, jobs);
  if (jobs == 1 || n < 2 * jobs) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&, w]() {
      for (int i = w; i < n; i += jobs) body(i);
    });
  }
  for (auto& t : workers) t.join();
}

// Minimum of f over [lo, hi]: full grid pass plus refinement around the
// lowest local minima.
template <typename F>
MinResult grid_min_1d(F&& f, double lo, double hi, int n) {
  auto xs = linspace(lo, hi, n);
  std::vector<double> vs(n);
  for (int i = 0; i < n; ++i) vs[i] = f(xs[i]);
  MinResult best;
  int imin = static_cast<int>(std::min_element(vs.begin(), vs.end()) - vs.begin());
  best.value = vs[imin];
  best.x = xs[imin];
  for (int i : local_minima(vs, 6)) {
    double a = xs[std::max(0, i - 1)];
    double b = xs[std::min(n - 1, i + 1)];
    refine_min_1d(f, a, b, best.x, best.value);
  }
  return best;
}

}  // namespace

Extrema extrema_2d(const ConjugateOperator& op, double E, int n_x) {
  if (!(std::abs(E) < 1.0)) throw std::invalid_argument("extrema_2d: need |E| < 1");
  if (n_x < 2) throw std::invalid_argument("extrema_2d: n_x >= 2");
  const double lo = std::abs(E), hi = 1.0;
  auto f = [&](double x) { return gfun::G(op, E, std::clamp(x, lo, hi)); };
  auto nf = [&](double x) { return -gfun::G(op, E, std::clamp(x, lo, hi)); };
  Extrema out;
  out.min = grid_min_1d(f, lo, hi, n_x);
  out.max = grid_min_1d(nf, lo, hi, n_x);
  out.max.value = -out.max.value;
  return out;
}

MinResult min_G_2d(const ConjugateOperator& op, double E, int n_x) {
  if (!(std::abs(E) < 1.0)) throw std::invalid_argument("min_G_2d: need |E| < 1");
  if (n_x < 2) throw std::invalid_argument("min_G_2d: n_x >= 2");
  const double lo = std::abs(E), hi = 1.0;
  auto f = [&](double x) { return gfun::G(op, E, std::clamp(x, lo, hi)); };
  return grid_min_1d(f, lo, hi, n_x);
}

namespace {

// Quadrant minimum of (sign-adjusted) G in dimension 3; sgn = -1 minimizes -G.
MinResult quadrant_min_3d(const ConjugateOperator& op, double E, int n_x,
                          int n_y, double sx, double sy, double sgn) {
  const double aE = std::abs(E);
  auto eval = [&](double x, double y) { return sgn * gfun::G(op, E, sx * x, sy * y); };

  MinResult best;
  best.value = std::numeric_limits<double>::infinity();

  auto ys = linspace(aE, 1.0, n_y);
  std::vector<double> col_min(n_y, std::numeric_limits<double>::infinity());
  std::vector<double> col_arg(n_y, aE);
  for (int jy = 0; jy < n_y; ++jy) {
    const double y = ys[jy];
    const double xlo = aE / y;
    auto xs = linspace(xlo, 1.0, n_x);
    for (int ix = 0; ix < n_x; ++ix) {
      double v = eval(xs[ix], y);
      if (v < col_min[jy]) {
        col_min[jy] = v;
        col_arg[jy] = xs[ix];
      }
    }
    if (col_min[jy] < best.value) {
      best.value = col_min[jy];
      best.x = col_arg[jy];
      best.y = y;
    }
  }

  // refine in y around column minima, minimizing over x at each probe
  auto col_f = [&](double y) {
    double yc = std::clamp(y, aE, 1.0);
    const double xlo = aE / yc;
    const int nx_probe = std::max(65, n_x / 4);
    MinResult m = grid_min_1d([&](double x) { return eval(std::clamp(x, xlo, 1.0), yc); },
                              xlo, 1.0, nx_probe);
    m.y = yc;
    return m;
  };

  for (int jy : local_minima(col_min, 4)) {
    double a = ys[std::max(0, jy - 1)];
    double b = ys[std::min(n_y - 1, jy + 1)];
    for (int round = 0; round < 14 && (b - a) > 1e-10; ++round) {
      const int pts = 7;
      double step = (b - a) / (pts - 1);
      MinResult loc;
      loc.value = std::numeric_limits<double>::infinity();
      for (int i = 0; i < pts; ++i) {
        double y = (i == pts - 1) ? b : a + step * i;
        MinResult probe = col_f(y);
        if (probe.value < loc.value) loc = probe;
      }
      if (loc.value < best.value) best = loc;
      a = std::max(a, loc.y - step);
      b = std::min(b, loc.y + step);
    }
  }
  best.x *= sx;
  best.y *= sy;
  best.value *= 1.0;  // sign restored by the caller
  return best;
}

MinResult min_3d_signed(const ConjugateOperator& op, double E, int n_x, int n_y,
                        bool full_domain, double sgn) {
  MinResult best;
  best.value = std::numeric_limits<double>::infinity();
  const int quadrants = full_domain ? 4 : 1;
  for (int quad = 0; quad < quadrants; ++quad) {
    const double sx = (quad & 1) ? -1.0 : 1.0;
    const double sy = (quad & 2) ? -1.0 : 1.0;
    MinResult q = quadrant_min_3d(op, E, n_x, n_y, sx, sy, sgn);
    if (q.value < best.value) best = q;
  }
  return best;
}

}  // namespace

MinResult min_G_3d(const ConjugateOperator& op, double E, int n_x, int n_y,
                   bool full_domain) {
  if (!(std::abs(E) < 1.0)) throw std::invalid_argument("min_G_3d: need |E| < 1");
  if (n_x < 2 || n_y < 2) throw std::invalid_argument("min_G_3d: grids >= 2");
  return min_3d_signed(op, E, n_x, n_y, full_domain, +1.0);
}

Extrema extrema_3d(const ConjugateOperator& op, double E, int n_x, int n_y,
                   bool full_domain) {
  if (!(std::abs(E) < 1.0)) throw std::invalid_argument("extrema_3d: need |E| < 1");
  if (n_x < 2 || n_y < 2) throw std::invalid_argument("extrema_3d: grids >= 2");
  Extrema out;
  out.min = min_3d_signed(op, E, n_x, n_y, full_domain, +1.0);
  out.max = min_3d_signed(op, E, n_x, n_y, full_domain, -1.0);
  out.max.value = -out.max.value;
  return out;
}

namespace {

Extrema extrema_dim(const ConjugateOperator& op, int dimension, double E,
                    const ScanGrids& grids) {
  if (dimension == 2) return extrema_2d(op, E, grids.n_x);
  return extrema_3d(op, E, grids.n_x, grids.n_y, grids.full_domain);
}

int classify(const Extrema& e, double tol) {
  if (e.min.value > tol) return +1;
  if (e.max.value < -tol) return -1;
  return 0;
}

}  // namespace

PositivityReport find_bands(const ConjugateOperator& op, int dimension,
                            double window_lo, double window_hi,
                            const ScanGrids& grids) {
  if (dimension != 2 && dimension != 3)
    throw std::invalid_argument("find_bands: dimension must be 2 or 3");
  if (!(0.0 < window_lo && window_lo < window_hi && window_hi < 1.0))
    throw std::invalid_argument("find_bands: window must sit inside (0, 1)");

  PositivityReport rep;
  rep.op = op;
  rep.dimension = dimension;
  rep.n_E = grids.n_E;
  rep.n_x = grids.n_x;
  rep.n_y = (dimension == 3) ? grids.n_y : 0;
  rep.energy_grid = linspace(window_lo, window_hi, grids.n_E);
  rep.min_G.assign(grids.n_E, 0.0);
  rep.max_G.assign(grids.n_E, 0.0);
  rep.argmin.assign(grids.n_E, {});
  std::vector<int> sign(grids.n_E, 0);

  parallel_for(grids.n_E, grids.jobs, [&](int i) {
    Extrema e = extrema_dim(op, dimension, rep.energy_grid[i], grids);
    rep.min_G[i] = e.min.value;
    rep.max_G[i] = e.max.value;
    rep.argmin[i] = e.min;
    sign[i] = classify(e, grids.tol_sign);
  });

  for (int i = 0; i < grids.n_E; ++i) {
    if (rep.min_G[i] < -grids.tol_sign)
      rep.witnesses.push_back({rep.energy_grid[i], rep.argmin[i].x,
                               rep.argmin[i].y, rep.min_G[i]});
  }

  auto margin = [&](int i) {
    return sign[i] > 0 ? rep.min_G[i] : -rep.max_G[i];
  };
  auto band_cross = [&](double e_in, double e_out, int s) {
    // bisection on the sign classification, refined to 1e-4 in energy
    double a = e_in, b = e_out;
    while (std::abs(b - a) > 1e-4) {
      double mid = 0.5 * (a + b);
      if (classify(extrema_dim(op, dimension, mid, grids), grids.tol_sign) == s)
        a = mid;
      else
        b = mid;
    }
    return 0.5 * (a + b);
  };

  int i = 0;
  while (i < grids.n_E) {
    if (sign[i] == 0) {
      ++i;
      continue;
    }
    const int s = sign[i];
    int j = i;
    while (j + 1 < grids.n_E && sign[j + 1] == s) ++j;
    Band band;
    band.sign = s;
    double interior = std::numeric_limits<double>::infinity();
    for (int k = i; k <= j; ++k) interior = std::min(interior, margin(k));
    band.min_interior_G = interior;
    band.left = (i == 0) ? window_lo
                         : band_cross(rep.energy_grid[i], rep.energy_grid[i - 1], s);
    band.right = (j == grids.n_E - 1)
                     ? window_hi
                     : band_cross(rep.energy_grid[j], rep.energy_grid[j + 1], s);
    band.verified = (j - i) >= 2;
    rep.bands.push_back(band);
    i = j + 1;
  }
  return rep;
}

BandCheck check_band(const ConjugateOperator& op, int dimension, double E_left,
                     double E_right, int n_energy, int n_x, double tol_sign,
                     double inset_frac) {
  if (!(E_left < E_right))
    throw std::invalid_argument("check_band: need E_left < E_right");
  BandCheck out;
  const double width = E_right - E_left;
  const double lo = E_left + inset_frac * width;
  const double hi = E_right - inset_frac * width;
  out.sample_energies = linspace(lo, hi, std::max(3, n_energy));
  out.min_interior = std::numeric_limits<double>::infinity();
  out.positive = true;
  ScanGrids g;
  g.n_x = n_x;
  for (double E : out.sample_energies) {
    MinResult m = (dimension == 2) ? min_G_2d(op, E, n_x)
                                   : min_G_3d(op, E, g.n_x, g.n_y, false);
    out.sample_min.push_back(m.value);
    if (m.value < out.min_interior) out.min_interior = m.value;
    if (m.value <= tol_sign && out.positive) {
      out.positive = false;
      out.witness = {E, m.x, m.y, m.value};
      out.has_witness = (m.value < -tol_sign);
    }
  }
  return out;
}

void emit_profile(const ConjugateOperator& op, double E, int n_x,
                  std::ostream& os) {
  os << "E,x,G\n";
  const double aE = std::abs(E);
  char buf[96];
  auto row = [&](double x) {
    double v = gfun::G(op, E, x);
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", E, x, v);
    os << buf;
  };
  for (double x : linspace(-1.0, -aE, n_x)) row(x);
  for (double x : linspace(aE, 1.0, n_x)) row(x);
}

void emit_profile_3d(const ConjugateOperator& op, double E, int n_x, int n_y,
                     std::ostream& os) {
  os << "E,x,y,G\n";
  const double aE = std::abs(E);
  char buf[128];
  for (double y : linspace(aE, 1.0, n_y)) {
    for (double x : linspace(aE / y, 1.0, n_x)) {
      double v = gfun::G(op, E, x, y);
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", E, x, y, v);
      os << buf;
    }
  }
}

}  // namespace mvband::scan
