#pragma once

#include <string_view>
#include <vector>

#include "nlpot/measure.hpp"
#include "nlpot/params.hpp"
#include "nlpot/point_set.hpp"
#include "nlpot/quadrature.hpp"

namespace nlpot {

/// lower_bound: a single feasible candidate. best_estimate: the best value
/// an optimizer found over the candidate simplex.
enum class BoundDirection { lower_bound, best_estimate };
enum class KappaMethod { point_mass, simplex_ascent };

std::string_view to_string(BoundDirection d);
std::string_view to_string(KappaMethod m);
BoundDirection parse_direction(std::string_view s);
KappaMethod parse_method(std::string_view s);

/// Estimate of the least constant in ||W nu||_{L^q(sigma restricted to E)}
/// <= kappa(E) nu(R^n)^{1/(p-1)}, for E = B(x, t).
struct KappaEstimate {
  double value = 0.0;
  BoundDirection direction = BoundDirection::lower_bound;
  KappaMethod method = KappaMethod::point_mass;
  PointSet candidate_grid;
  int iterations = 0;
  bool concave_regime = false;  // p >= 2
  // Last Frank-Wolfe gap relative to the objective, 0 for point masses.
  double duality_gap = 0.0;
};

/// Radial measures are localized to about this many quadrature atoms.
inline constexpr int kLocalAtoms = 240;

/// Shape of the default candidate grid: sigma's atoms in the ball, the
/// centre, and `shell_levels` log-spaced shells of directions_per_dim * n points.
struct GridOptions {
  int shell_levels = 4;
  int directions_per_dim = 2;

  /// Doubles both the shell count (old shells are kept) and the directions
  /// per shell (old directions are kept).
  GridOptions refined() const;
};

struct AscentOptions {
  int iters = 200;
  int restarts = 3;
  // Stops when the Frank-Wolfe gap falls below gap_tol times the objective.
  double gap_tol = 1e-6;
};

/// Atoms carrying sigma restricted to the closed ball B(x, t). Radial
/// measures are replaced by a quadrature whose atoms carry a cell size.
/// The kappa estimators truncate W nu below that cell size (or cfg's t_min
/// when larger).
Measure localized_atoms(const Measure& sigma, const Point& x, double t, int target_atoms = kLocalAtoms);

PointSet default_candidate_grid(const Measure& sigma, const Point& x, double t, const GridOptions& opts = {});

/// Best single point mass on the grid; direction is always lower_bound.
KappaEstimate kappa_point_mass(const Params& pr, const Measure& sigma, const Point& x, double t, const PointSet& grid,
                               const QuadratureConfig& cfg = {});

/// Conditional-gradient ascent of (integral over B(x,t) of (W nu)^q dsigma)^{1/q}
/// over probability vectors nu on the grid.
KappaEstimate kappa_simplex_ascent(const Params& pr, const Measure& sigma, const Point& x, double t,
                                   const PointSet& grid, int iters, int restarts, const QuadratureConfig& cfg = {},
                                   double gap_tol = 1e-6);

struct KappaProfile {
  Point center;
  std::vector<double> radii;
  std::vector<KappaEstimate> estimates;
  // |x| + support radius: B(x, t) contains supp sigma for t >= this.
  double saturation_radius = 0.0;
  // kappa vanishes on radii below this (distance from x to supp sigma).
  double zero_below = 0.0;

  std::vector<double> values() const;
  bool saturated() const { return !radii.empty() && radii.back() >= saturation_radius; }
  BoundDirection direction() const;
};

/// Distance from x to the support of sigma.
double distance_to_support(const Measure& sigma, const Point& x);

/// Ladder of `count` radii from the support distance (or a small fraction of
/// the saturation radius) up to and including the saturation radius, log-spaced
/// and denser towards the top.
std::vector<double> default_radii(const Measure& sigma, const Point& x, int count = 12);

/// Profile on a fixed candidate grid shared by all radii.
KappaProfile kappa_profile(const Params& pr, const Measure& sigma, const Point& x, const std::vector<double>& radii,
                           KappaMethod method, const PointSet& grid, const QuadratureConfig& cfg = {},
                           const AscentOptions& ascent = {});

/// Profile with the default candidate grid rebuilt at every radius.
KappaProfile kappa_profile(const Params& pr, const Measure& sigma, const Point& x, const std::vector<double>& radii,
                           KappaMethod method, const GridOptions& grid = {}, const QuadratureConfig& cfg = {},
                           const AscentOptions& ascent = {});

}  // namespace nlpot
