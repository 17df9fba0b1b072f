#include "nlpot/wolff.hpp"

#include <cmath>

#include "nlpot/error.hpp"

namespace nlpot {

QuadResult wolff_potential_detailed(const Params& pr, const Measure& m, const Point& x, const QuadratureConfig& cfg,
                                    std::optional<double> upper) {
  cfg.validate();
  if (x.size() != static_cast<std::size_t>(m.dim()) || m.dim() != pr.n) {
    throw InvalidArgument("wolff_potential: dimension mismatch");
  }
  if (m.is_zero()) return {};
  if (pr.s <= 0.0) return {kInf, 0.0, true};
  double T = norm(x) + m.support_radius();
  if (upper) {
    if (*upper < T) throw InvalidArgument("wolff_potential: upper limit below |x| + support radius");
    T = *upper;
  }
  const PiecewiseProfile profile = ball_mass_profile(m, x);
  return integrate_power_kernel(profile, pr.delta, pr.s * pr.delta, cfg.t_min(), T, cfg);
}

double wolff_potential(const Params& pr, const Measure& m, const Point& x, const QuadratureConfig& cfg) {
  const QuadResult r = wolff_potential_detailed(pr, m, x, cfg);
  if (!r.converged) {
    throw NumericalError("wolff_potential: quadrature did not reach rel_tol (estimated abs error " +
                             std::to_string(r.abs_error) + ")",
                         r.abs_error);
  }
  return r.value;
}

PotentialField wolff_field(const Params& pr, const Measure& m, const PointSet& points, const QuadratureConfig& cfg) {
  PotentialField field{pr, points, {}, {cfg.t_min(), kInf}};
  field.values.reserve(points.size());
  for (const auto& x : points.points()) field.values.push_back(wolff_potential(pr, m, x, cfg));
  return field;
}

double riesz_potential(double beta, const Measure& m, const Point& x, const QuadratureConfig& cfg) {
  const int n = m.dim();
  if (!(beta > 0.0 && beta < n)) throw InvalidArgument("riesz_potential: beta must lie in (0, n)");
  if (x.size() != static_cast<std::size_t>(n)) throw InvalidArgument("riesz_potential: dimension mismatch");
  if (m.is_atomic()) {
    const auto& a = m.atoms();
    double sum = 0.0;
    for (std::size_t i = 0; i < a.points.size(); ++i) {
      if (a.weights[i] == 0.0) continue;
      const double r = distance(a.points[i], x);
      if (r == 0.0) return kInf;
      sum += a.weights[i] * std::pow(r, beta - n);
    }
    return sum;
  }
  // Layer-cake form: (n - beta) * integral of m(B(x,t)) t^{beta-n} dt/t.
  QuadratureConfig c = cfg;
  c.t_min_policy = TMinPolicy::zero();
  const QuadResult r = integrate_power_kernel(ball_mass_profile(m, x), 1.0, n - beta, 0.0, kInf, c);
  if (!r.converged) throw NumericalError("riesz_potential: quadrature did not reach rel_tol", r.abs_error);
  return (n - beta) * r.value;
}

}  // namespace nlpot
