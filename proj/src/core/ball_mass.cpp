#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/beta.hpp>

#include "nlpot/error.hpp"
#include "nlpot/measure.hpp"

namespace nlpot {

namespace {

// Volume of {y in B(0, r) : y_1 >= a}.
double cap_volume(int n, double r, double a) {
  if (a >= r) return 0.0;
  const double full = unit_ball_volume(n) * std::pow(r, n);
  if (a <= -r) return full;
  if (a < 0.0) return full - cap_volume(n, r, -a);
  const double x = (r - a) * (r + a) / (r * r);
  return 0.5 * full * boost::math::ibeta(0.5 * (n + 1), 0.5, x);
}

}  // namespace

double unit_ball_volume(int n) {
  return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

double ball_intersection_volume(int n, double d, double r1, double r2) {
  if (r1 <= 0.0 || r2 <= 0.0) return 0.0;
  if (d >= r1 + r2) return 0.0;
  if (d + r2 <= r1) return unit_ball_volume(n) * std::pow(r2, n);
  if (d + r1 <= r2) return unit_ball_volume(n) * std::pow(r1, n);
  const double a1 = (d * d + r1 * r1 - r2 * r2) / (2.0 * d);
  const double a2 = d - a1;
  return cap_volume(n, r1, a1) + cap_volume(n, r2, a2);
}

double ball_mass(const Measure& m, const Point& x, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("ball_mass: radius must be >= 0");
  if (x.size() != static_cast<std::size_t>(m.dim())) throw InvalidArgument("ball_mass: dimension mismatch");
  if (m.is_atomic()) {
    const auto& a = m.atoms();
    double mass = 0.0;
    for (std::size_t i = 0; i < a.points.size(); ++i) {
      if (distance(a.points[i], x) <= t) mass += a.weights[i];
    }
    return mass;
  }
  const auto& r = m.bins();
  const int n = m.dim();
  const double d = norm(x);
  if (t >= d + m.support_radius()) return m.total_mass();
  double mass = 0.0;
  double inner = 0.0;
  for (std::size_t k = 0; k < r.densities.size(); ++k) {
    const double outer = ball_intersection_volume(n, d, t, r.bin_edges[k + 1]);
    if (r.densities[k] > 0.0) mass += r.densities[k] * (outer - inner);
    inner = outer;
  }
  return std::max(0.0, mass);
}

}  // namespace nlpot
