#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nlpot/embedding.hpp"
#include "nlpot/intrinsic.hpp"
#include "nlpot/solver.hpp"
#include "nlpot/wolff.hpp"

namespace nlpot {

/// The measure (W nu)^q dsigma on sigma's solver atoms; weights are
/// w_i (W nu)(a_i)^q and sigma's cell size is kept.
Measure nested_measure(const Params& pr, const Measure& sigma, const Measure& nu, const QuadratureConfig& cfg = {});

/// phi_nu(x) = W nu(x) (W[(W nu)^q dsigma](x) / W nu(x))^gamma.
/// Throws InvalidArgument when W nu(x) is 0 or infinite.
double phi_nu(const Params& pr, const Measure& sigma, const Measure& nu, const Point& x,
              const QuadratureConfig& cfg = {});

struct PhiReport {
  PointSet points;
  std::vector<double> phi_values;  // NaN where every candidate was rejected
  std::vector<std::string> best_nu_tag;
  std::vector<std::string> candidates;
};

/// Pointwise max of phi_nu over a finite family of candidate measures.
PhiReport phi_sup(const Params& pr, const Measure& sigma, const PointSet& points, const std::vector<Measure>& family,
                  const QuadratureConfig& cfg = {});

/// sigma, point masses at the probe points, u^q dsigma for a solver field
/// when given, and the truncations sigma restricted to B(0, R).
std::vector<Measure> default_phi_family(const Measure& sigma, const PointSet& probes,
                                        const std::vector<double>& truncation_radii,
                                        const SolveReport* solution = nullptr);

/// u^q dsigma for the sigma atoms of a solver report.
Measure solution_measure(const Params& pr, const Measure& sigma, const SolveReport& rep);

/// W[(W nu)^q dsigma](x) / ( (W nu(x))^{q/(p-1)} [W sigma(x) + K sigma(x)^{(p-1-q)/(p-1)}] ),
/// bounded by a constant depending only on (p, q, alpha, n).
/// Throws InvalidArgument on a zero denominator.
double nested_potential_ratio(const Params& pr, const Measure& sigma, const Measure& nu, const Point& x,
                              double K_sigma, const QuadratureConfig& cfg = {});

struct BoundTerms {
  double w_sigma_gamma = 0.0;  // (W sigma)^gamma
  double K = 0.0;
  double w_mu = 0.0;
  double R = 0.0;
  BoundDirection kappa_direction = BoundDirection::best_estimate;
  std::string infinite_term;  // empty unless R is infinite
};

/// R(x) = (W sigma(x))^gamma + K sigma(x) + W mu(x) with the terms kept apart.
BoundTerms bilateral_bound(const Params& pr, const Measure& sigma, const Measure& mu, const Point& x,
                           const KappaProfile& profile, const QuadratureConfig& cfg = {});

struct BoundField {
  PotentialField R;
  std::vector<BoundTerms> terms;
  BoundDirection kappa_direction = BoundDirection::best_estimate;
};

struct BoundOptions {
  KappaMethod method = KappaMethod::simplex_ascent;
  GridOptions grid;
  AscentOptions ascent;
  int radii = 12;
};

/// R on a point set, building one kappa profile per point.
BoundField bound_field(const Params& pr, const Measure& sigma, const Measure& mu, const PointSet& points,
                       const BoundOptions& opts = {}, const QuadratureConfig& cfg = {});

/// R on a point set from precomputed profiles (one per point, same order).
BoundField bound_field(const Params& pr, const Measure& sigma, const Measure& mu, const PointSet& points,
                       const std::vector<KappaProfile>& profiles, const QuadratureConfig& cfg = {});

struct BilateralReport {
  PotentialField R;
  std::vector<double> ratios;  // u / R, NaN where undefined
  double c1_emp = 0.0;
  double c2_emp = 0.0;
  std::vector<BoundTerms> terms;
  BoundDirection kappa_direction = BoundDirection::best_estimate;
  std::vector<std::size_t> flagged;  // ratios outside the plausibility window
};

struct SandwichOptions {
  double window_lo = 1e-3;
  double window_hi = 1e3;
};

/// Ratios u / R. Throws InvalidArgument unless u and R share the point set.
BilateralReport verify_sandwich(const PotentialField& u, const BoundField& bound, const SandwichOptions& opts = {});

/// The solver field restricted to the requested evaluation points.
PotentialField requested_field(const SolveReport& rep, const PointSet& points);

enum class Existence { exists, not_exists };
std::string_view to_string(Existence e);

struct ExistenceReport {
  Existence verdict = Existence::exists;
  TailClass sigma_tail = TailClass::finite;
  TailClass kappa_tail = TailClass::finite;
  TailClass mu_tail = TailClass::finite;
  std::string reason;
};

/// Nontrivial solutions exist iff the sigma, kappa and mu tails are all
/// finite, the data are not both zero, and the tuple is not the p-Laplace
/// case n <= p.
ExistenceReport existence_check(const Params& pr, const GrowthProfile& sigma, const GrowthProfile& mu,
                                const PowerLogGrowth& kappa_growth);

struct CapacityReport {
  bool passes = false;
  double constant = 0.0;          // sup over the ladder
  double refined_constant = 0.0;  // sup over the refined and extended ladder
  double argmax_radius = 0.0;
  std::string reason;
};

/// sup_r sigma(B(0,r)) / r^{n-p}, stable under ladder refinement within 10%.
/// Throws InvalidArgument unless alpha = 1 and p < n.
CapacityReport ball_capacity_check(const Params& pr, const Measure& sigma, const std::vector<double>& radii);

/// Smallest c with sigma(B_r) <= (c r^{n-p})^{q/(p-1)} (integral over B_r of u^q dsigma)^{(p-1-q)/(p-1)}
/// over the radii, for a converged solver field (centred at the origin).
double capacity_inequality_constant(const Params& pr, const Measure& sigma, const SolveReport& rep,
                                    const std::vector<double>& radii);

/// max over the points of u / ((W sigma)^gamma + W sigma).
double upper_constant_without_kappa(const Params& pr, const Measure& sigma, const PotentialField& u,
                                    const QuadratureConfig& cfg = {});

}  // namespace nlpot
