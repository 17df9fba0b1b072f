#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string_view>
#include <span>
#include <variant>
#include <vector>

#include "nlpot/measure.hpp"
#include "nlpot/params.hpp"
#include "nlpot/quadrature.hpp"

namespace nlpot {

struct Truncation {
  double t_min = 0.0;
  double t_max = kInf;
};

/// Values of a potential or solution on a point set; +inf is representable.
struct PotentialField {
  Params params;
  PointSet eval_points;
  std::vector<double> values;
  Truncation trunc;
};

/// W_{alpha,p} m (x) with its quadrature error estimate.
///
/// Integrates [m(B(x,t)) / t^s]^{1/(p-1)} dt/t over [t_min, T] with
/// T = |x| + support_radius (or `upper` when given, which must not be
/// smaller), then adds the exact tail (p-1)/s M^{1/(p-1)} T^{-s/(p-1)}.
QuadResult wolff_potential_detailed(const Params& pr, const Measure& m, const Point& x, const QuadratureConfig& cfg,
                                    std::optional<double> upper = std::nullopt);

/// As above; throws NumericalError when the quadrature misses rel_tol.
double wolff_potential(const Params& pr, const Measure& m, const Point& x, const QuadratureConfig& cfg = {});

PotentialField wolff_field(const Params& pr, const Measure& m, const PointSet& points, const QuadratureConfig& cfg = {});

/// I_beta m (x) = integral of |x - y|^{beta - n} dm(y), 0 < beta < n.
double riesz_potential(double beta, const Measure& m, const Point& x, const QuadratureConfig& cfg = {});

/// Wolff potentials of atomic measures on fixed supports, with sorted
/// distances and segment integrals precomputed once.
///
/// For target z_i and nonnegative source weights w_j,
///   W(sum_j w_j delta_{y_j})(z_i) = sum_k C_ik^{1/(p-1)} S_ik
/// where C_ik are cumulative weights in order of distance from z_i and S_ik
/// the integral of t^{-s/(p-1)} dt/t between consecutive distances (truncated
/// below at t_min).
class DiscreteWolffOperator {
 public:
  DiscreteWolffOperator(const Params& pr, std::span<const Point> targets, std::span<const Point> sources, double t_min);

  std::size_t num_targets() const noexcept { return nt_; }
  std::size_t num_sources() const noexcept { return ns_; }
  double t_min() const noexcept { return t_min_; }

  void apply(std::span<const double> weights, std::span<double> out) const;

  /// grad[j] = sum_i coeff[i] dW_i/dw_j over segments with positive cumulative
  /// weight. For p > 2 the derivative is infinite wherever a segment carries
  /// no weight yet; singular[j] collects coeff[i] times the length of such
  /// segments (zero for p <= 2).
  void gradient(std::span<const double> weights, std::span<const double> coeff, std::span<double> grad,
                std::span<double> singular) const;

 private:
  double delta_;
  double t_min_;
  std::size_t nt_;
  std::size_t ns_;
  std::vector<std::uint32_t> order_;
  std::vector<double> seg_;
};

/// t -> m(B(0, t)) for large t: either a finite total mass, or the symbolic
/// law C t^d (log t)^e.
struct FiniteMassGrowth {
  double total_mass = 0.0;
};
struct PowerLogGrowth {
  double C = 1.0;
  double d = 0.0;
  double e = 0.0;
};
using GrowthProfile = std::variant<FiniteMassGrowth, PowerLogGrowth>;

enum class TailClass { finite, infinite };
std::string_view to_string(TailClass c);

GrowthProfile growth_of(const Measure& m);

/// Convergence of the integral over [1, inf) of [m(B(0,t)) / t^s]^{1/(p-1)} dt/t.
TailClass tail_exists(const Params& pr, const GrowthProfile& profile);

/// Classifies the integral over [1, inf) of t^{lambda} (log t)^{mu} dt/t:
/// finite iff lambda < 0, or lambda = 0 and mu < -1.
TailClass classify_power_log_tail(double lambda, double mu);

namespace detail {
inline double pow_fast(double x, double e) {
  if (e == 1.0) return x;
  if (e == 0.5) return std::sqrt(x);
  if (e == 2.0) return x * x;
  return std::pow(x, e);
}
}  // namespace detail

}  // namespace nlpot
