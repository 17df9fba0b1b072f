#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nlpot/point_set.hpp"

namespace nlpot {

/// Finite sum of weighted Dirac masses.
///
/// `cell_size` is set when the atoms are a quadrature of an absolutely
/// continuous measure; potentials of such measures are truncated below it.
struct AtomicRep {
  std::vector<Point> points;
  std::vector<double> weights;
  std::optional<double> cell_size;
};

/// Piecewise-constant radial density about the origin.
struct RadialRep {
  std::vector<double> bin_edges;  // strictly increasing, first edge 0
  std::vector<double> densities;  // one per bin, mass per unit volume
};

/// Nonnegative finite Radon measure on R^n, immutable after construction.
class Measure {
 public:
  static Measure atomic(int n, std::vector<Point> points, std::vector<double> weights,
                        std::optional<double> cell_size = std::nullopt);
  static Measure radial(int n, std::vector<double> bin_edges, std::vector<double> densities);
  static Measure zero(int n);

  int dim() const noexcept { return n_; }
  double total_mass() const noexcept { return total_mass_; }
  /// Smallest R with the full mass inside the closed ball B(0, R).
  double support_radius() const noexcept { return support_radius_; }
  bool is_atomic() const noexcept { return std::holds_alternative<AtomicRep>(rep_); }
  bool is_radial() const noexcept { return std::holds_alternative<RadialRep>(rep_); }
  bool is_zero() const noexcept { return total_mass_ == 0.0; }
  const AtomicRep& atoms() const;
  const RadialRep& bins() const;
  std::optional<double> cell_size() const;

  const std::string& tag() const noexcept { return tag_; }
  Measure with_tag(std::string tag) const;

 private:
  Measure(int n, std::variant<AtomicRep, RadialRep> rep);

  int n_ = 1;
  std::variant<AtomicRep, RadialRep> rep_;
  double total_mass_ = 0.0;
  double support_radius_ = 0.0;
  std::string tag_;
};

/// Volume of the unit ball in R^n.
double unit_ball_volume(int n);

/// Volume of B(c1, r1) ∩ B(c2, r2) for centres at distance d, in R^n.
double ball_intersection_volume(int n, double d, double r1, double r2);

/// sigma(B(x, t)) for the closed ball. Throws InvalidArgument for t < 0.
double ball_mass(const Measure& m, const Point& x, double t);

/// Multiplies all weights or densities by lambda >= 0.
Measure scale(const Measure& m, double lambda);

/// m1 + m2. Both must share dimension and representation kind.
Measure combine(const Measure& a, const Measure& b);

/// Atomic measure shifted by `offset`.
Measure translate(const Measure& m, const Point& offset);

/// The localization m|_{B(x, t)}.
///
/// Atomic: keeps atoms with |point - x| <= t. Radial with x at the origin:
/// clips the bins at t. Radial with x elsewhere: an atomic quadrature of the
/// clipped measure on a polar grid about x (about `target_atoms` nodes), whose
/// atoms carry the cell size and reproduce each bin's exact clipped mass.
Measure restrict(const Measure& m, const Point& x, double t, int target_atoms = 400);

/// Atomic quadrature of a radial measure over its whole support, centred at
/// the origin, with exact per-bin masses. Atomic input is returned unchanged.
Measure to_atomic(const Measure& m, int target_atoms = 400);

}  // namespace nlpot
