#include "nlpot/embedding.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>

#include "nlpot/error.hpp"
#include "nlpot/wolff.hpp"

namespace nlpot {

std::string_view to_string(BoundDirection d) {
  return d == BoundDirection::lower_bound ? "lower_bound" : "best_estimate";
}

std::string_view to_string(KappaMethod m) { return m == KappaMethod::point_mass ? "pointmass" : "ascent"; }

BoundDirection parse_direction(std::string_view s) {
  if (s == "lower_bound") return BoundDirection::lower_bound;
  if (s == "best_estimate") return BoundDirection::best_estimate;
  throw InvalidArgument("unknown bound direction '" + std::string(s) + "'");
}

KappaMethod parse_method(std::string_view s) {
  if (s == "pointmass" || s == "point_mass") return KappaMethod::point_mass;
  if (s == "ascent" || s == "simplex_ascent") return KappaMethod::simplex_ascent;
  throw InvalidArgument("unknown kappa method '" + std::string(s) + "'");
}

GridOptions GridOptions::refined() const {
  GridOptions r = *this;
  r.shell_levels = 2 * shell_levels - 1;
  r.directions_per_dim = 2 * directions_per_dim;
  return r;
}

namespace {

void check_ball(const Measure& sigma, const Point& x, double t) {
  if (!(t > 0.0) || std::isnan(t)) throw InvalidArgument("kappa: radius must be > 0");
  if (x.size() != static_cast<std::size_t>(sigma.dim())) throw InvalidArgument("kappa: centre dimension mismatch");
}

// Positive-weight atoms of sigma on B(x, t) and the truncation radius to use
// for potentials evaluated on them.
struct Local {
  std::vector<Point> points;
  std::vector<double> weights;
  double t_min = 0.0;
};

Local local_atoms(const Measure& sigma, const Point& x, double t, const QuadratureConfig& cfg, int target) {
  Local out;
  out.t_min = cfg.t_min();
  if (sigma.is_zero()) return out;
  const Measure loc = localized_atoms(sigma, x, t, target);
  if (loc.is_zero()) return out;
  const auto& a = loc.atoms();
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    if (a.weights[i] > 0.0) {
      out.points.push_back(a.points[i]);
      out.weights.push_back(a.weights[i]);
    }
  }
  if (a.cell_size) out.t_min = std::max(out.t_min, *a.cell_size);
  return out;
}

// Truncated point-mass potential: integral of t^{-s/(p-1)} dt/t over [max(r, h), inf).
double point_mass_potential(const Params& pr, double r, double h) {
  return power_segment(std::max(r, h), kInf, pr.s * pr.delta);
}

// Integral of (W delta_y)^q d(sigma_local) for each grid point y.
std::vector<double> vertex_objectives(const Params& pr, const Local& loc, const PointSet& grid) {
  std::vector<double> g(grid.size(), 0.0);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < loc.points.size(); ++i) {
      const double w = point_mass_potential(pr, distance(loc.points[i], grid[j]), loc.t_min);
      acc += loc.weights[i] * std::pow(w, pr.q);
    }
    g[j] = acc;
  }
  return g;
}

// Exact layer-cake value for radial sigma localized at the origin:
// integral of g(|z - y|) dsigma_E with g(r) = W_h delta_y at distance r,
// equal to c lambda * integral over [h, inf) of sigma_E(B(y, r)) r^{-lambda} dr/r.
double radial_point_mass_objective(const Params& pr, const Measure& sigma_e, const Point& y, double h,
                                   const QuadratureConfig& cfg) {
  if (sigma_e.is_zero()) return 0.0;
  const double sd = pr.s * pr.delta;
  const double lambda = sd * pr.q;
  const double c = std::pow(sd, -pr.q);
  QuadratureConfig qc = cfg;
  qc.t_min_policy = TMinPolicy::cell(h);
  const PiecewiseProfile prof = ball_mass_profile(sigma_e, y);
  const QuadResult r = integrate_power_kernel(prof, 1.0, lambda, h, kInf, qc);
  if (!r.converged) throw NumericalError("kappa_point_mass: layer-cake quadrature did not converge", r.abs_error);
  return c * lambda * r.value;
}

}  // namespace

Measure localized_atoms(const Measure& sigma, const Point& x, double t, int target_atoms) {
  check_ball(sigma, x, t);
  if (sigma.is_zero()) return Measure::zero(sigma.dim());
  if (sigma.is_atomic()) return restrict(sigma, x, t);
  if (norm(x) == 0.0) return to_atomic(restrict(sigma, x, t), target_atoms);
  return restrict(sigma, x, t, target_atoms);
}

PointSet default_candidate_grid(const Measure& sigma, const Point& x, double t, const GridOptions& opts) {
  check_ball(sigma, x, t);
  const int n = sigma.dim();
  std::vector<Point> pts;
  if (!sigma.is_zero()) {
    const Measure loc = localized_atoms(sigma, x, t, kLocalAtoms);
    if (!loc.is_zero()) {
      const auto& a = loc.atoms();
      for (std::size_t i = 0; i < a.points.size(); ++i)
        if (a.weights[i] > 0.0) pts.push_back(a.points[i]);
    }
  }
  pts.push_back(x);
  const double t_eff = std::min(t, norm(x) + sigma.support_radius());
  const int levels = std::max(opts.shell_levels, 1);
  const int dirs = std::max(opts.directions_per_dim, 1) * n;
  if (t_eff > 0.0) {
    const double r_in = t_eff / 64.0;
    for (int k = 0; k < levels; ++k) {
      const double frac = levels == 1 ? 1.0 : static_cast<double>(k) / (levels - 1);
      const double r = r_in * std::pow(t_eff / r_in, frac);
      for (const auto& dir : direction_sequence(n, dirs, std::bit_cast<std::uint64_t>(frac))) {
        Point y = x;
        for (int i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] += r * dir[static_cast<std::size_t>(i)];
        pts.push_back(std::move(y));
      }
    }
  }
  return PointSet(unique_points(std::move(pts)), "default");
}

KappaEstimate kappa_point_mass(const Params& pr, const Measure& sigma, const Point& x, double t, const PointSet& grid,
                               const QuadratureConfig& cfg) {
  check_ball(sigma, x, t);
  if (grid.empty()) throw InvalidArgument("kappa_point_mass: empty candidate grid");
  KappaEstimate est;
  est.method = KappaMethod::point_mass;
  est.direction = BoundDirection::lower_bound;
  est.candidate_grid = grid;
  est.concave_regime = pr.p >= 2.0;
  if (sigma.is_zero()) return est;

  double best = 0.0;
  if (sigma.is_radial() && norm(x) == 0.0) {
    const Measure sigma_e = restrict(sigma, x, t);
    for (const auto& y : grid.points())
      best = std::max(best, radial_point_mass_objective(pr, sigma_e, y, cfg.t_min(), cfg));
  } else {
    const Local loc = local_atoms(sigma, x, t, cfg, kLocalAtoms);
    for (double g : vertex_objectives(pr, loc, grid)) best = std::max(best, g);
  }
  est.value = std::pow(best, 1.0 / pr.q);
  est.iterations = static_cast<int>(grid.size());
  return est;
}

namespace {

// Ascent on G(nu) = sum_i w_i (W nu)(z_i)^q over the probability simplex:
// Frank-Wolfe steps grow the support, exponentiated-gradient steps rebalance
// it. The Frank-Wolfe gap is the stopping rule.
class Ascent {
 public:
  Ascent(const DiscreteWolffOperator& op, std::span<const double> w, double q, double gap_tol)
      : op_(op), w_(w), q_(q), gap_tol_(gap_tol) {
    W_.resize(op.num_targets());
    Wt_.resize(op.num_targets());
    coeff_.resize(op.num_targets());
    grad_.resize(op.num_sources());
    sing_.resize(op.num_sources());
    trial_.resize(op.num_sources());
  }

  struct Outcome {
    double objective = 0.0;
    int iterations = 0;
    double gap = 0.0;
  };

  Outcome run(std::vector<double> nu, int iters) {
    Outcome out;
    double G = objective(nu, W_);
    step_ = 1.0;
    out.gap = kInf;
    for (int it = 0; it < iters; ++it) {
      out.iterations = it + 1;
      for (std::size_t i = 0; i < W_.size(); ++i)
        coeff_[i] = W_[i] > 0.0 ? w_[i] * q_ * std::pow(W_[i], q_ - 1.0) : 0.0;
      op_.gradient(nu, coeff_, grad_, sing_);

      const auto js = static_cast<std::size_t>(std::distance(sing_.begin(), std::max_element(sing_.begin(), sing_.end())));
      const bool singular = sing_[js] > 0.0;
      std::size_t j = js;
      double gap = 0.0;
      if (!singular) {
        j = static_cast<std::size_t>(std::distance(grad_.begin(), std::max_element(grad_.begin(), grad_.end())));
        gap = grad_[j] - std::inner_product(grad_.begin(), grad_.end(), nu.begin(), 0.0);
        out.gap = G > 0.0 ? gap / G : 0.0;
        if (gap <= gap_tol_ * G) break;
      }

      bool accepted = false;
      if (singular) {
        // Infinite slope towards every vertex with a positive singular
        // coefficient; move towards all of them at once.
        const double total = std::accumulate(sing_.begin(), sing_.end(), 0.0);
        accepted = line_search(nu, G, std::min(1.0, 2.0 * step_), 1.0, kInf, [&](double g) {
          for (std::size_t k = 0; k < nu.size(); ++k) trial_[k] = (1.0 - g) * nu[k] + g * sing_[k] / total;
        });
      } else if (nu[j] > 0.0) {
        // Best vertex already in the support: exponentiated-gradient step.
        const double mean = grad_[j] - gap;
        double eta = 2.0 * eta_;
        accepted = line_search(nu, G, 1.0, 1.0, 0.0, [&](double g) {
          eta_ = eta * g;
          double z = 0.0;
          for (std::size_t k = 0; k < nu.size(); ++k) {
            trial_[k] = nu[k] * std::exp(eta_ * (grad_[k] - grad_[j]) / mean);
            z += trial_[k];
          }
          for (auto& v : trial_) v /= z;
        }, false);
      }
      if (!accepted) {
        accepted = line_search(nu, G, std::min(1.0, 2.0 * step_), 1.0, singular ? kInf : gap, [&](double g) {
          for (std::size_t k = 0; k < nu.size(); ++k) trial_[k] = (1.0 - g) * nu[k];
          trial_[j] += g;
        });
      }
      if (!accepted) break;
    }
    out.objective = G;
    return out;
  }

 private:
  // Backtracks from gamma0 until the Armijo condition with constant 1/2
  // holds with strict increase (plain increase for an infinite slope); on
  // success nu, W and G
  // hold the new iterate.
  template <class Build>
  bool line_search(std::vector<double>& nu, double& G, double gamma0, double gamma_max, double slope, Build build,
                   bool record_step = true) {
    double gamma = std::min(gamma0, gamma_max);
    if (!(gamma > 0.0)) gamma = gamma_max;
    while (gamma > 1e-14) {
      build(gamma);
      const double Gt = objective(trial_, Wt_);
      if (Gt > G && (std::isinf(slope) || Gt >= G + 0.5 * gamma * slope)) {
        nu.swap(trial_);
        W_.swap(Wt_);
        G = Gt;
        if (record_step) step_ = gamma;
        return true;
      }
      gamma *= 0.5;
    }
    return false;
  }

  double objective(std::span<const double> nu, std::vector<double>& W) const {
    op_.apply(nu, W);
    double g = 0.0;
    for (std::size_t i = 0; i < W.size(); ++i) g += w_[i] * std::pow(W[i], q_);
    return g;
  }

  const DiscreteWolffOperator& op_;
  std::span<const double> w_;
  double q_;
  double gap_tol_;
  double step_ = 1.0;
  double eta_ = 1.0;
  std::vector<double> W_, Wt_, coeff_, grad_, sing_, trial_;
};

}  // namespace

KappaEstimate kappa_simplex_ascent(const Params& pr, const Measure& sigma, const Point& x, double t,
                                   const PointSet& grid, int iters, int restarts, const QuadratureConfig& cfg,
                                   double gap_tol) {
  check_ball(sigma, x, t);
  if (grid.empty()) throw InvalidArgument("kappa_simplex_ascent: empty candidate grid");
  if (iters < 1) throw InvalidArgument("kappa_simplex_ascent: iters must be >= 1");
  if (restarts < 1) throw InvalidArgument("kappa_simplex_ascent: restarts must be >= 1");
  KappaEstimate est;
  est.method = KappaMethod::simplex_ascent;
  est.direction = BoundDirection::best_estimate;
  est.candidate_grid = grid;
  est.concave_regime = pr.p >= 2.0;
  if (sigma.is_zero()) return est;

  const Local loc = local_atoms(sigma, x, t, cfg, kLocalAtoms);
  if (loc.points.empty()) return est;

  const std::vector<double> vertex = vertex_objectives(pr, loc, grid);
  std::vector<std::size_t> ranked(grid.size());
  std::iota(ranked.begin(), ranked.end(), std::size_t{0});
  std::stable_sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) { return vertex[a] > vertex[b]; });

  const DiscreteWolffOperator op(pr, loc.points, grid.points(), loc.t_min);
  Ascent ascent(op, loc.weights, pr.q, gap_tol);

  // Starting points: the sigma-proportional vector (uniform when no grid
  // point carries sigma mass) and the best vertices.
  std::vector<std::vector<double>> starts;
  {
    std::map<Point, std::size_t> index;
    for (std::size_t j = 0; j < grid.size(); ++j) index.emplace(grid[j], j);
    std::vector<double> prop(grid.size(), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < loc.points.size(); ++i) {
      if (auto it = index.find(loc.points[i]); it != index.end()) {
        prop[it->second] += loc.weights[i];
        total += loc.weights[i];
      }
    }
    if (total > 0.0) {
      for (double& v : prop) v /= total;
    } else {
      std::fill(prop.begin(), prop.end(), 1.0 / static_cast<double>(grid.size()));
    }
    starts.push_back(std::move(prop));
  }
  // With a concave objective one vertex start suffices.
  const bool certified = pr.p >= 2.0 && pr.q <= 1.0;
  const std::size_t vertex_starts = std::min<std::size_t>(certified ? 1 : static_cast<std::size_t>(restarts), grid.size());
  for (std::size_t r = 0; r < vertex_starts; ++r) {
    std::vector<double> e(grid.size(), 0.0);
    e[ranked[r]] = 1.0;
    starts.push_back(std::move(e));
  }

  double best = vertex[ranked.front()];
  int total_iters = 0;
  double best_gap = 0.0;
  for (auto& s : starts) {
    const auto out = ascent.run(std::move(s), iters);
    total_iters += out.iterations;
    if (out.objective > best) {
      best = out.objective;
      best_gap = out.gap;
    }
  }
  est.value = std::pow(best, 1.0 / pr.q);
  est.iterations = total_iters;
  est.duality_gap = best_gap;
  return est;
}

std::vector<double> KappaProfile::values() const {
  std::vector<double> v;
  v.reserve(estimates.size());
  for (const auto& e : estimates) v.push_back(e.value);
  return v;
}

BoundDirection KappaProfile::direction() const {
  for (const auto& e : estimates)
    if (e.direction == BoundDirection::lower_bound) return BoundDirection::lower_bound;
  return BoundDirection::best_estimate;
}

double distance_to_support(const Measure& sigma, const Point& x) {
  if (sigma.is_zero()) return kInf;
  double best = kInf;
  if (sigma.is_atomic()) {
    const auto& a = sigma.atoms();
    for (std::size_t i = 0; i < a.points.size(); ++i)
      if (a.weights[i] > 0.0) best = std::min(best, distance(a.points[i], x));
    return best;
  }
  const auto& b = sigma.bins();
  const double r = norm(x);
  for (std::size_t k = 0; k < b.densities.size(); ++k) {
    if (b.densities[k] <= 0.0) continue;
    const double lo = b.bin_edges[k], hi = b.bin_edges[k + 1];
    best = std::min(best, r < lo ? lo - r : (r > hi ? r - hi : 0.0));
  }
  return best;
}

std::vector<double> default_radii(const Measure& sigma, const Point& x, int count) {
  if (count < 2) throw InvalidArgument("default_radii: need at least 2 radii");
  const double T = norm(x) + sigma.support_radius();
  const double d0 = distance_to_support(sigma, x);
  if (!(T > 0.0)) return {1.0, 2.0};
  if (!std::isfinite(d0)) return {T, 2.0 * T};
  const double lo = d0 > 0.0 ? d0 : T / 200.0;
  if (lo >= T * (1.0 - 1e-12)) return {T, 1.5 * T};
  std::vector<double> radii;
  // Log-radius fraction 1 - (1-u)^2: spacing shrinks towards T, where the
  // kappa profile bends over to its saturated value.
  for (int k = 0; k < count; ++k) {
    const double u = 1.0 - static_cast<double>(k) / (count - 1);
    radii.push_back(lo * std::pow(T / lo, 1.0 - u * u));
  }
  radii.back() = T;
  return radii;
}

namespace {

template <class GridFor>
KappaProfile build_profile(const Params& pr, const Measure& sigma, const Point& x, const std::vector<double>& radii,
                           KappaMethod method, GridFor grid_for, const QuadratureConfig& cfg,
                           const AscentOptions& ascent) {
  if (radii.empty()) throw InvalidArgument("kappa_profile: empty radius ladder");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || !std::isfinite(radii[i])) throw InvalidArgument("kappa_profile: radii must be positive");
    if (i > 0 && !(radii[i] > radii[i - 1])) throw InvalidArgument("kappa_profile: radii must be increasing");
  }
  if (x.size() != static_cast<std::size_t>(sigma.dim())) throw InvalidArgument("kappa_profile: centre dimension mismatch");
  KappaProfile prof;
  prof.center = x;
  prof.radii = radii;
  prof.saturation_radius = norm(x) + sigma.support_radius();
  prof.zero_below = sigma.is_zero() ? kInf : distance_to_support(sigma, x);

  std::optional<KappaEstimate> saturated;
  double running = 0.0;
  for (double r : radii) {
    KappaEstimate est;
    if (saturated) {
      est = *saturated;
    } else {
      const PointSet grid = grid_for(r);
      est = method == KappaMethod::point_mass
                ? kappa_point_mass(pr, sigma, x, r, grid, cfg)
                : kappa_simplex_ascent(pr, sigma, x, r, grid, ascent.iters, ascent.restarts, cfg, ascent.gap_tol);
      if (!std::isfinite(est.value)) running = est.value;
      running = std::max(running, est.value);
      est.value = running;
      if (r >= prof.saturation_radius) saturated = est;
    }
    prof.estimates.push_back(std::move(est));
  }
  return prof;
}

}  // namespace

KappaProfile kappa_profile(const Params& pr, const Measure& sigma, const Point& x, const std::vector<double>& radii,
                           KappaMethod method, const PointSet& grid, const QuadratureConfig& cfg,
                           const AscentOptions& ascent) {
  return build_profile(pr, sigma, x, radii, method, [&](double) { return grid; }, cfg, ascent);
}

KappaProfile kappa_profile(const Params& pr, const Measure& sigma, const Point& x, const std::vector<double>& radii,
                           KappaMethod method, const GridOptions& grid, const QuadratureConfig& cfg,
                           const AscentOptions& ascent) {
  return build_profile(
      pr, sigma, x, radii, method, [&](double r) { return default_candidate_grid(sigma, x, r, grid); }, cfg, ascent);
}

}  // namespace nlpot
