#include "nlpot/intrinsic.hpp"

#include <cmath>
#include <sstream>

#include "nlpot/error.hpp"

namespace nlpot {

namespace {

struct Knot {
  double r;
  double kappa;
};

double log_slope(const Knot& a, const Knot& b) { return std::log(b.kappa / a.kappa) / std::log(b.r / a.r); }

}  // namespace

IntrinsicResult intrinsic_potential_detailed(const Params& pr, const KappaProfile& profile,
                                             const QuadratureConfig& cfg) {
  if (profile.radii.size() < 2 || profile.estimates.size() != profile.radii.size())
    throw InvalidArgument("intrinsic_potential: profile needs at least 2 radii");
  if (!profile.saturated())
    throw InvalidArgument("intrinsic_potential: profile not saturated (largest radius below |x| + support)");

  IntrinsicResult res;
  res.direction = profile.direction();
  const double T = profile.saturation_radius;

  std::vector<Knot> knots;
  double kappa_total = 0.0;
  for (std::size_t i = 0; i < profile.radii.size(); ++i) {
    const double r = profile.radii[i];
    const double k = profile.estimates[i].value;
    if (std::isinf(k)) {
      res.value = kInf;
      std::ostringstream os;
      os << "kappa is infinite at radius " << r;
      res.diagnostics.push_back(os.str());
      return res;
    }
    if (r < T) {
      knots.push_back({r, k});
    } else {
      kappa_total = k;
      break;
    }
  }
  if (kappa_total == 0.0) return res;
  if (!(T > 0.0)) {
    // All mass at x itself: kappa is constant and the integral diverges at 0.
    res.value = kInf;
    res.diagnostics.push_back("sigma is concentrated at the evaluation point");
    return res;
  }
  knots.push_back({T, kappa_total});

  std::size_t f = 0;
  while (knots[f].kappa == 0.0) ++f;

  PiecewiseProfile prof;
  auto add = [&prof](double lo, double hi, PieceShape shape, double coef, double ref = 1.0, double expo = 0.0) {
    if (hi > lo) prof.pieces.push_back({lo, hi, shape, coef, ref, expo});
  };

  const double mass_power = pr.kexp * pr.delta;
  const double decay = pr.s * pr.delta;
  const Knot& first = knots[f];
  // kappa vanishes below z.
  const double z = std::min(first.r, std::max(profile.zero_below, f > 0 ? knots[f - 1].r : 0.0));

  if (first.r > 0.0) {
    double a = f + 1 < knots.size() ? log_slope(first, knots[f + 1]) : 0.0;
    res.small_t_exponent = a;
    if (z > 0.0) {
      add(0.0, z, PieceShape::constant, 0.0);
    } else if (a * mass_power <= decay) {
      // The extrapolated integrand would not be integrable at 0.
      res.clamped = true;
      std::ostringstream os;
      os << "small-t exponent " << a << " clamped to " << 2.0 * pr.s / pr.kexp;
      res.diagnostics.push_back(os.str());
      a = 2.0 * pr.s / pr.kexp;
      res.small_t_exponent = a;
    }
    add(z, first.r, PieceShape::power, first.kappa, first.r, a);
  }
  for (std::size_t i = f; i + 1 < knots.size(); ++i) {
    const Knot& lo = knots[i];
    const Knot& hi = knots[i + 1];
    if (hi.kappa == lo.kappa) {
      add(lo.r, hi.r, PieceShape::constant, lo.kappa);
    } else {
      add(lo.r, hi.r, PieceShape::power, lo.kappa, lo.r, log_slope(lo, hi));
    }
  }
  add(std::max(T, knots.back().r), kInf, PieceShape::constant, kappa_total);
  prof.eval = [&prof](double t) { return prof.value_at(t); };

  const QuadResult q = integrate_power_kernel(prof, mass_power, decay, 0.0, kInf, cfg);
  if (!q.converged) throw NumericalError("intrinsic_potential: quadrature did not converge", q.abs_error);
  res.value = q.value;
  return res;
}

double intrinsic_potential(const Params& pr, const KappaProfile& profile, const QuadratureConfig& cfg) {
  return intrinsic_potential_detailed(pr, profile, cfg).value;
}

TailClass intrinsic_tail_finite(const Params& pr, const PowerLogGrowth& g) {
  if (!std::isfinite(g.C) || !std::isfinite(g.d) || !std::isfinite(g.e) || g.C < 0.0 || g.d < 0.0 ||
      (g.d == 0.0 && g.e < 0.0)) {
    throw InvalidArgument("intrinsic_tail_finite: unsupported kappa profile (need C >= 0, d >= 0, nondecreasing)");
  }
  if (g.C == 0.0) return TailClass::finite;
  return classify_power_log_tail((g.d * pr.kexp - pr.s) * pr.delta, g.e * pr.kexp * pr.delta);
}

}  // namespace nlpot
