#include "nlpot/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nlpot/error.hpp"

namespace nlpot {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double potential(const Params& pr, const Measure& m, const Point& x, const QuadratureConfig& cfg) {
  if (m.is_zero()) return 0.0;
  const QuadResult r = wolff_potential_detailed(pr, m, x, QuadratureConfig::for_measure(m, cfg));
  if (!r.converged) throw NumericalError("Wolff potential quadrature did not converge", r.abs_error);
  return r.value;
}

std::string point_label(const Point& y) {
  std::ostringstream os;
  os.precision(6);
  os << '(';
  for (std::size_t i = 0; i < y.size(); ++i) os << (i ? "," : "") << y[i];
  os << ')';
  return os.str();
}

}  // namespace

Measure nested_measure(const Params& pr, const Measure& sigma, const Measure& nu, const QuadratureConfig& cfg) {
  if (sigma.dim() != nu.dim()) throw InvalidArgument("nested_measure: dimension mismatch");
  const Measure atoms = solver_atoms(sigma);
  if (atoms.is_zero() || nu.is_zero()) return Measure::zero(sigma.dim());
  const auto& a = atoms.atoms();
  std::vector<Point> pts;
  std::vector<double> w;
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    if (a.weights[i] <= 0.0) continue;
    const double v = potential(pr, nu, a.points[i], cfg);
    if (!std::isfinite(v))
      throw NumericalError("nested_measure: W nu is infinite at a sigma atom " + point_label(a.points[i]), kInf);
    pts.push_back(a.points[i]);
    w.push_back(a.weights[i] * std::pow(v, pr.q));
  }
  return Measure::atomic(sigma.dim(), std::move(pts), std::move(w), a.cell_size);
}

double phi_nu(const Params& pr, const Measure& sigma, const Measure& nu, const Point& x, const QuadratureConfig& cfg) {
  const double wn = potential(pr, nu, x, cfg);
  if (!(wn > 0.0)) throw InvalidArgument("phi_nu: W nu(x) = 0");
  if (!std::isfinite(wn)) throw InvalidArgument("phi_nu: W nu(x) is infinite at " + point_label(x));
  const Measure inner = nested_measure(pr, sigma, nu, cfg);
  const double wi = potential(pr, inner, x, cfg);
  return wn * std::pow(wi / wn, pr.gamma);
}

PhiReport phi_sup(const Params& pr, const Measure& sigma, const PointSet& points, const std::vector<Measure>& family,
                  const QuadratureConfig& cfg) {
  if (family.empty()) throw InvalidArgument("phi_sup: empty candidate family");
  PhiReport rep;
  rep.points = points;
  rep.phi_values.assign(points.size(), kNaN);
  rep.best_nu_tag.assign(points.size(), "");
  for (const auto& nu : family) {
    rep.candidates.push_back(nu.tag());
    if (nu.is_zero()) continue;
    Measure inner = Measure::zero(sigma.dim());
    try {
      inner = nested_measure(pr, sigma, nu, cfg);
    } catch (const NumericalError&) {
      continue;
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double wn = potential(pr, nu, points[i], cfg);
      if (!(wn > 0.0) || !std::isfinite(wn)) continue;
      const double phi = wn * std::pow(potential(pr, inner, points[i], cfg) / wn, pr.gamma);
      if (std::isnan(rep.phi_values[i]) || phi > rep.phi_values[i]) {
        rep.phi_values[i] = phi;
        rep.best_nu_tag[i] = nu.tag();
      }
    }
  }
  return rep;
}

Measure solution_measure(const Params& pr, const Measure& sigma, const SolveReport& rep) {
  const Measure atoms = solver_atoms(sigma);
  if (atoms.is_zero()) return Measure::zero(sigma.dim()).with_tag("u^q sigma");
  const auto& a = atoms.atoms();
  std::vector<Point> pts;
  std::vector<double> w;
  std::size_t k = 0;
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    if (a.weights[i] <= 0.0) continue;
    if (k >= rep.sigma_atoms || rep.u.eval_points[k] != a.points[i])
      throw InvalidArgument("solution_measure: report does not match sigma");
    pts.push_back(a.points[i]);
    w.push_back(a.weights[i] * std::pow(rep.u.values[k], pr.q));
    ++k;
  }
  return Measure::atomic(sigma.dim(), std::move(pts), std::move(w), a.cell_size).with_tag("u^q sigma");
}

std::vector<Measure> default_phi_family(const Measure& sigma, const PointSet& probes,
                                        const std::vector<double>& truncation_radii, const SolveReport* solution) {
  std::vector<Measure> fam;
  fam.push_back(sigma.with_tag("sigma"));
  for (const auto& y : probes.points())
    fam.push_back(Measure::atomic(sigma.dim(), {y}, {1.0}).with_tag("delta" + point_label(y)));
  if (solution) fam.push_back(solution_measure(solution->u.params, sigma, *solution));
  for (double R : truncation_radii) {
    std::ostringstream os;
    os << "sigma|B(0," << R << ")";
    fam.push_back(restrict(sigma, origin(sigma.dim()), R).with_tag(os.str()));
  }
  return fam;
}

double nested_potential_ratio(const Params& pr, const Measure& sigma, const Measure& nu, const Point& x,
                              double K_sigma, const QuadratureConfig& cfg) {
  const double wn = potential(pr, nu, x, cfg);
  const double ws = potential(pr, sigma, x, cfg);
  if (!std::isfinite(wn) || !std::isfinite(ws) || !std::isfinite(K_sigma))
    throw InvalidArgument("nested_potential_ratio: W nu, W sigma and K sigma must be finite at x");
  const double denom = std::pow(wn, pr.q * pr.delta) * (ws + std::pow(K_sigma, (pr.p - 1.0 - pr.q) * pr.delta));
  if (!(denom > 0.0)) throw InvalidArgument("nested_potential_ratio: zero denominator");
  return potential(pr, nested_measure(pr, sigma, nu, cfg), x, cfg) / denom;
}

BoundTerms bilateral_bound(const Params& pr, const Measure& sigma, const Measure& mu, const Point& x,
                           const KappaProfile& profile, const QuadratureConfig& cfg) {
  BoundTerms t;
  t.w_sigma_gamma = std::pow(potential(pr, sigma, x, cfg), pr.gamma);
  t.w_mu = potential(pr, mu, x, cfg);
  if (sigma.is_zero()) {
    t.K = 0.0;
  } else {
    if (profile.center != x) throw InvalidArgument("bilateral_bound: profile centre differs from x");
    const IntrinsicResult k = intrinsic_potential_detailed(pr, profile, cfg);
    t.K = k.value;
    t.kappa_direction = k.direction;
  }
  t.R = t.w_sigma_gamma + t.K + t.w_mu;
  if (std::isinf(t.w_sigma_gamma)) t.infinite_term = "W sigma";
  else if (std::isinf(t.K)) t.infinite_term = "K sigma";
  else if (std::isinf(t.w_mu)) t.infinite_term = "W mu";
  return t;
}

BoundField bound_field(const Params& pr, const Measure& sigma, const Measure& mu, const PointSet& points,
                       const std::vector<KappaProfile>& profiles, const QuadratureConfig& cfg) {
  if (profiles.size() != points.size()) throw InvalidArgument("bound_field: one profile per point required");
  BoundField bf;
  bf.R.params = pr;
  bf.R.eval_points = points;
  for (std::size_t i = 0; i < points.size(); ++i) {
    BoundTerms t = bilateral_bound(pr, sigma, mu, points[i], profiles[i], cfg);
    if (t.kappa_direction == BoundDirection::lower_bound) bf.kappa_direction = BoundDirection::lower_bound;
    bf.R.values.push_back(t.R);
    bf.terms.push_back(std::move(t));
  }
  return bf;
}

BoundField bound_field(const Params& pr, const Measure& sigma, const Measure& mu, const PointSet& points,
                       const BoundOptions& opts, const QuadratureConfig& cfg) {
  std::vector<KappaProfile> profiles;
  const QuadratureConfig kcfg = QuadratureConfig::for_measure(sigma, cfg);
  for (const auto& x : points.points()) {
    if (sigma.is_zero()) {
      profiles.push_back(KappaProfile{x, {1.0}, {KappaEstimate{}}, 0.0, kInf});
      continue;
    }
    profiles.push_back(
        kappa_profile(pr, sigma, x, default_radii(sigma, x, opts.radii), opts.method, opts.grid, kcfg, opts.ascent));
  }
  return bound_field(pr, sigma, mu, points, profiles, cfg);
}

PotentialField requested_field(const SolveReport& rep, const PointSet& points) {
  if (points.size() != rep.eval_index.size()) throw InvalidArgument("requested_field: point count mismatch");
  PotentialField f;
  f.params = rep.u.params;
  f.eval_points = points;
  f.trunc = rep.u.trunc;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (rep.u.eval_points[rep.eval_index[i]] != points[i])
      throw InvalidArgument("requested_field: points differ from the solve request");
    f.values.push_back(rep.u.values[rep.eval_index[i]]);
  }
  return f;
}

BilateralReport verify_sandwich(const PotentialField& u, const BoundField& bound, const SandwichOptions& opts) {
  if (!(u.eval_points == bound.R.eval_points)) throw InvalidArgument("verify_sandwich: u and R are on different point sets");
  BilateralReport rep;
  rep.R = bound.R;
  rep.terms = bound.terms;
  rep.kappa_direction = bound.kappa_direction;
  double lo = kInf, hi = 0.0;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    const double a = u.values[i];
    const double b = bound.R.values[i];
    double r = kNaN;
    if (std::isfinite(a) && b > 0.0 && std::isfinite(b)) r = a / b;
    rep.ratios.push_back(r);
    if (std::isnan(r)) continue;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
    if (r < opts.window_lo || r > opts.window_hi) rep.flagged.push_back(i);
  }
  rep.c1_emp = std::isfinite(lo) ? lo : kNaN;
  rep.c2_emp = std::isfinite(lo) ? hi : kNaN;
  return rep;
}

std::string_view to_string(Existence e) { return e == Existence::exists ? "exists" : "not_exists"; }

namespace {

bool is_zero_growth(const GrowthProfile& g) {
  if (const auto* f = std::get_if<FiniteMassGrowth>(&g)) return f->total_mass == 0.0;
  return std::get<PowerLogGrowth>(g).C == 0.0;
}

}  // namespace

ExistenceReport existence_check(const Params& pr, const GrowthProfile& sigma, const GrowthProfile& mu,
                                const PowerLogGrowth& kappa_growth) {
  ExistenceReport rep;
  rep.sigma_tail = tail_exists(pr, sigma);
  rep.kappa_tail = intrinsic_tail_finite(pr, kappa_growth);
  rep.mu_tail = tail_exists(pr, mu);
  if (pr.no_nontrivial_solutions) {
    rep.verdict = Existence::not_exists;
    rep.reason = "p-Laplace case with n <= p";
    return rep;
  }
  if (is_zero_growth(sigma) && is_zero_growth(mu)) {
    rep.verdict = Existence::not_exists;
    rep.reason = "sigma and mu are both zero";
    return rep;
  }
  std::string failed;
  if (rep.sigma_tail == TailClass::infinite) failed += " sigma-tail";
  if (rep.kappa_tail == TailClass::infinite) failed += " kappa-tail";
  if (rep.mu_tail == TailClass::infinite) failed += " mu-tail";
  rep.verdict = failed.empty() ? Existence::exists : Existence::not_exists;
  rep.reason = failed.empty() ? "all tails finite" : "infinite:" + failed;
  return rep;
}

CapacityReport ball_capacity_check(const Params& pr, const Measure& sigma, const std::vector<double>& radii) {
  if (std::abs(pr.alpha - 1.0) > 1e-12) throw InvalidArgument("ball_capacity_check: requires alpha = 1");
  if (!(pr.p < pr.n)) throw InvalidArgument("ball_capacity_check: requires p < n");
  if (radii.empty()) throw InvalidArgument("ball_capacity_check: empty ladder");
  const Point o = origin(sigma.dim());
  const double e = pr.n - pr.p;
  auto sup_over = [&](const std::vector<double>& rs, double* arg) {
    double best = 0.0;
    for (double r : rs) {
      if (!(r > 0.0)) throw InvalidArgument("ball_capacity_check: radii must be positive");
      const double v = ball_mass(sigma, o, r) / std::pow(r, e);
      if (v > best) {
        best = v;
        if (arg) *arg = r;
      }
    }
    return best;
  };
  CapacityReport rep;
  rep.constant = sup_over(radii, &rep.argmax_radius);

  std::vector<double> sorted = radii;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> fine{sorted.front() / 4.0, sorted.front() / 2.0};
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    fine.push_back(sorted[i]);
    if (i + 1 < sorted.size()) fine.push_back(std::sqrt(sorted[i] * sorted[i + 1]));
  }
  fine.push_back(2.0 * sorted.back());
  fine.push_back(4.0 * sorted.back());
  rep.refined_constant = sup_over(fine, nullptr);

  if (!std::isfinite(rep.constant)) {
    rep.reason = "infinite ratio";
  } else if (rep.refined_constant > 1.1 * rep.constant) {
    rep.reason = "ratio grows under ladder refinement";
  } else {
    rep.passes = true;
    rep.reason = "stable";
  }
  return rep;
}

double capacity_inequality_constant(const Params& pr, const Measure& sigma, const SolveReport& rep,
                                    const std::vector<double>& radii) {
  const Measure uq = solution_measure(pr, sigma, rep);
  const Measure atoms = solver_atoms(sigma);
  if (atoms.is_zero()) return 0.0;
  const Point o = origin(sigma.dim());
  double c = 0.0;
  for (double r : radii) {
    const double mass = ball_mass(atoms, o, r);
    if (mass <= 0.0) continue;
    const double integral = uq.is_zero() ? 0.0 : ball_mass(uq, o, r);
    if (!(integral > 0.0)) return kInf;
    const double ratio = mass / std::pow(integral, (pr.p - 1.0 - pr.q) * pr.delta);
    c = std::max(c, std::pow(ratio, (pr.p - 1.0) / pr.q) / std::pow(r, pr.n - pr.p));
  }
  return c;
}

double upper_constant_without_kappa(const Params& pr, const Measure& sigma, const PotentialField& u,
                                    const QuadratureConfig& cfg) {
  double c = 0.0;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    const double ws = potential(pr, sigma, u.eval_points[i], cfg);
    const double denom = std::pow(ws, pr.gamma) + ws;
    if (denom > 0.0 && std::isfinite(u.values[i])) c = std::max(c, u.values[i] / denom);
  }
  return c;
}

}  // namespace nlpot
