#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "nlpot/measure.hpp"

namespace nlpot {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Lower truncation of the t-integral: zero, or the generation cell size h of
/// an atomic surrogate for an absolutely continuous measure.
struct TMinPolicy {
  double h = 0.0;

  static TMinPolicy zero() { return {}; }
  static TMinPolicy cell(double h) { return {h}; }
  bool is_zero() const { return h == 0.0; }
};

struct QuadratureConfig {
  double rel_tol = 1e-8;
  int panels_per_decade = 32;
  TMinPolicy t_min_policy;
  // Constant and power-law pieces are integrated in closed form; when false
  // constant pieces below the split radius go through the Gauss panels too.
  bool closed_form_pieces = true;
  int max_depth = 30;

  /// Throws InvalidArgument unless rel_tol > 0 and panels_per_decade >= 4.
  void validate() const;
  double t_min() const { return t_min_policy.h; }

  /// Copy of `base` with the t_min policy taken from the measure:
  /// cell(h) for atoms carrying a cell size, zero otherwise.
  static QuadratureConfig for_measure(const Measure& m, const QuadratureConfig& base);
  static QuadratureConfig for_measure(const Measure& m);
  /// Same configuration with panels_per_decade doubled.
  QuadratureConfig refined() const;
};

enum class PieceShape { constant, power, smooth };

/// One piece of a nondecreasing function m(t) on [lo, hi):
/// constant m = coef, power m = coef (t/ref)^expo, smooth m = eval(t).
struct ProfilePiece {
  double lo = 0.0;
  double hi = kInf;
  PieceShape shape = PieceShape::constant;
  double coef = 0.0;
  double ref = 1.0;
  double expo = 0.0;
};

/// Piecewise description of t -> m(t) on [0, inf); the last piece is a
/// constant extending to infinity.
struct PiecewiseProfile {
  std::vector<ProfilePiece> pieces;
  std::function<double(double)> eval;

  double value_at(double t) const;
};

struct QuadResult {
  double value = 0.0;
  double abs_error = 0.0;
  bool converged = true;
};

/// Integral over [t_lo, inf) of m(t)^mass_power * t^{-decay} dt/t.
///
/// Breakpoints between pieces are panel boundaries. Smooth pieces use
/// composite Gauss-Legendre panels in log t with adaptive bisection until each
/// panel meets rel_tol. `t_split` only matters with closed_form_pieces off:
/// constant pieces below it are integrated numerically.
QuadResult integrate_power_kernel(const PiecewiseProfile& profile, double mass_power, double decay, double t_lo,
                                  double t_split, const QuadratureConfig& cfg);

/// t -> m(B(x, t)) as a piecewise profile: step function for atoms; exact
/// power law near 0 and smooth pieces between bin-edge tangencies for radial.
PiecewiseProfile ball_mass_profile(const Measure& m, const Point& x);

/// Integral of t^{-decay} dt/t over [lo, hi] (hi may be infinite).
double power_segment(double lo, double hi, double decay);

}  // namespace nlpot
