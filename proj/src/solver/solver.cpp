#include "nlpot/solver.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

#include "nlpot/error.hpp"

namespace nlpot {

std::string_view to_string(U0Mode m) { return m == U0Mode::zero ? "zero" : "seeded"; }

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged:
      return "converged";
    case SolveStatus::max_iter:
      return "max_iter";
    case SolveStatus::diverged_to_infinity:
      return "diverged_to_infinity";
  }
  return "?";
}

std::string_view to_string(PointClass c) {
  switch (c) {
    case PointClass::sub:
      return "sub";
    case PointClass::super:
      return "super";
    case PointClass::solution:
      return "solution";
    case PointClass::neither:
      return "neither";
  }
  return "?";
}

U0Mode parse_u0_mode(std::string_view s) {
  if (s == "zero") return U0Mode::zero;
  if (s == "seeded") return U0Mode::seeded;
  throw InvalidArgument("unknown u0 mode '" + std::string(s) + "' (expected zero|seeded)");
}

Measure solver_atoms(const Measure& sigma) {
  if (sigma.is_atomic()) return sigma;
  return to_atomic(sigma, 240);
}

PointSet coupled_points(const Measure& sigma, const PointSet& points) {
  const Measure atoms = solver_atoms(sigma);
  std::vector<Point> pts;
  if (!atoms.is_zero()) {
    const auto& a = atoms.atoms();
    for (std::size_t i = 0; i < a.points.size(); ++i)
      if (a.weights[i] > 0.0) pts.push_back(a.points[i]);
  }
  for (const auto& x : points.points()) {
    if (x.size() != static_cast<std::size_t>(sigma.dim())) throw InvalidArgument("solver: point dimension mismatch");
    pts.push_back(x);
  }
  if (pts.empty()) throw InvalidArgument("solver: empty point set");
  return PointSet(unique_points(std::move(pts)), "coupled");
}

namespace {

// T on a fixed point set: the sigma part as a discrete operator, W mu cached.
class Engine {
 public:
  Engine(const Params& pr, const Measure& sigma, const Measure& mu, const PointSet& pts, const QuadratureConfig& cfg)
      : q_(pr.q) {
    if (sigma.dim() != pr.n || mu.dim() != pr.n || pts.dim() != pr.n)
      throw InvalidArgument("solver: sigma, mu and points must live in R^n");
    const Measure atoms = solver_atoms(sigma);
    std::vector<Point> src;
    if (!atoms.is_zero()) {
      std::map<Point, std::size_t> index;
      for (std::size_t i = 0; i < pts.size(); ++i) index.emplace(pts[i], i);
      const auto& a = atoms.atoms();
      for (std::size_t i = 0; i < a.points.size(); ++i) {
        if (a.weights[i] <= 0.0) continue;
        const auto it = index.find(a.points[i]);
        if (it == index.end()) throw InvalidArgument("apply_T: u is not defined at every sigma atom");
        src.push_back(a.points[i]);
        w_.push_back(a.weights[i]);
        at_.push_back(it->second);
      }
      const double t_min = std::max(cfg.t_min(), atoms.cell_size().value_or(0.0));
      op_.emplace(pr, pts.points(), src, t_min);
    }
    wmu_.assign(pts.size(), 0.0);
    if (!mu.is_zero()) {
      const QuadratureConfig mcfg = QuadratureConfig::for_measure(mu, cfg);
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const QuadResult r = wolff_potential_detailed(pr, mu, pts[i], mcfg);
        if (!r.converged) throw NumericalError("solver: W mu quadrature did not converge", r.abs_error);
        wmu_[i] = r.value;
      }
    }
    weights_.resize(w_.size());
  }

  std::size_t size() const { return wmu_.size(); }
  const std::vector<double>& w_mu() const { return wmu_; }

  /// W sigma at the points (u = 1 in the sigma part, no mu).
  std::vector<double> w_sigma() const {
    std::vector<double> out(size(), 0.0);
    if (op_) op_->apply(w_, out);
    return out;
  }

  void apply(const std::vector<double>& u, std::vector<double>& out) {
    out.assign(size(), 0.0);
    if (op_) {
      for (std::size_t j = 0; j < w_.size(); ++j) {
        const double v = u[at_[j]];
        if (std::isinf(v)) {
          std::fill(out.begin(), out.end(), kInf);
          return;
        }
        weights_[j] = w_[j] * std::pow(v, q_);
      }
      op_->apply(weights_, out);
    }
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += wmu_[i];
  }

 private:
  double q_;
  std::vector<double> w_;
  std::vector<std::size_t> at_;
  std::vector<double> weights_;
  std::optional<DiscreteWolffOperator> op_;
  std::vector<double> wmu_;
};


}  // namespace

PotentialField apply_T(const Params& pr, const Measure& sigma, const Measure& mu, const PotentialField& u,
                       const QuadratureConfig& cfg) {
  if (u.values.size() != u.eval_points.size()) throw InvalidArgument("apply_T: field size mismatch");
  Engine eng(pr, sigma, mu, u.eval_points, cfg);
  PotentialField out = u;
  out.params = pr;
  eng.apply(u.values, out.values);
  out.trunc = {std::max(cfg.t_min(), solver_atoms(sigma).cell_size().value_or(0.0)), kInf};
  return out;
}

double SolveReport::fixed_point_residual() const {
  double s = 0.0, r = 0.0;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    if (std::isinf(u.values[i]) && pointwise_residual[i] == 0.0) continue;  // pinned at infinity
    s = std::max(s, u.values[i]);
    r = std::max(r, pointwise_residual[i]);
  }
  return r == 0.0 ? 0.0 : r / std::max(s, 1e-300);
}

std::vector<double> SolveReport::values_at_requested() const {
  std::vector<double> v;
  v.reserve(eval_index.size());
  for (std::size_t i : eval_index) v.push_back(u.values[i]);
  return v;
}

SolveReport solve_monotone(const Params& pr, const Measure& sigma, const Measure& mu, const PointSet& points,
                           U0Mode mode, const SolveOptions& opts, const QuadratureConfig& cfg) {
  if (!(opts.tol > 0.0)) throw InvalidArgument("solve: tol must be > 0");
  if (opts.max_iter < 1) throw InvalidArgument("solve: max_iter must be >= 1");
  if (points.empty()) throw InvalidArgument("solve: empty point set");

  SolveReport rep;
  rep.u0_mode = mode;
  const PointSet pts = coupled_points(sigma, points);
  Engine eng(pr, sigma, mu, pts, cfg);
  const std::size_t N = pts.size();
  {
    std::map<Point, std::size_t> index;
    for (std::size_t i = 0; i < N; ++i) index.emplace(pts[i], i);
    for (const auto& x : points.points()) rep.eval_index.push_back(index.at(x));
    const Measure atoms = solver_atoms(sigma);
    if (!atoms.is_zero())
      for (double w : atoms.atoms().weights) rep.sigma_atoms += w > 0.0 ? 1 : 0;
  }

  // Points off sigma where W mu is infinite: u is infinite there for every
  // iterate and never feeds back, so they take no part in the stopping tests.
  std::vector<char> pinned(N, 0);
  for (std::size_t i = rep.sigma_atoms; i < N; ++i) pinned[i] = std::isinf(eng.w_mu()[i]) ? 1 : 0;
  const auto live_sup = [&](const std::vector<double>& v) {
    double m = 0.0;
    for (std::size_t i = 0; i < N; ++i)
      if (!pinned[i]) m = std::max(m, v[i]);
    return m;
  };

  std::vector<double> cur(N, 0.0), next(N, 0.0);
  if (mode == U0Mode::seeded) {
    std::vector<double> base = eng.w_sigma();
    for (double& v : base) v = std::pow(v, pr.gamma);
    double c = 1.0;
    bool ok = false;
    for (int k = 0; k <= 200 && !ok; ++k) {
      for (std::size_t i = 0; i < N; ++i) cur[i] = c * base[i];
      eng.apply(cur, next);
      ok = true;
      for (std::size_t i = 0; i < N; ++i) {
        if (next[i] < cur[i] * (1.0 - 1e-12)) {
          ok = false;
          break;
        }
      }
      if (!ok) c *= 0.5;
    }
    if (!ok) rep.note = "seed constant search exhausted; iterates may not be monotone";
    rep.seed_constant = c;
  } else {
    eng.apply(cur, next);
  }

  const double scale = std::max(live_sup(next), live_sup(cur));
  const double ceiling = opts.ceiling_factor * std::max(scale, 1e-300);
  rep.status = SolveStatus::max_iter;
  rep.iterations = opts.max_iter;
  for (int j = 0; j < opts.max_iter; ++j) {
    if (opts.keep_iterates) rep.iterates.push_back(cur);
    double diff = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      if (pinned[i]) continue;
      if (next[i] < cur[i] - 1e-12 * (1.0 + std::abs(cur[i]))) rep.monotone = false;
      diff = std::max(diff, std::abs(next[i] - cur[i]));
    }
    const double top = live_sup(next);
    if (!std::isfinite(top) || top > ceiling) {
      rep.residual_history.push_back(kInf);
      rep.status = SolveStatus::diverged_to_infinity;
      rep.iterations = j + 1;
      cur = next;
      break;
    }
    const double res = diff == 0.0 ? 0.0 : diff / std::max(top, 1e-300);
    rep.residual_history.push_back(res);
    if (res < opts.tol) {
      rep.status = SolveStatus::converged;
      rep.iterations = j;
      break;
    }
    if (j + 1 == opts.max_iter) break;
    cur.swap(next);
    eng.apply(cur, next);
  }

  rep.pointwise_residual.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    const double d = next[i] - cur[i];
    rep.pointwise_residual[i] = pinned[i] && std::isinf(cur[i]) && std::isinf(next[i]) ? 0.0
                                : std::isnan(d)                                        ? kInf
                                                                                       : std::abs(d);
  }
  if (rep.status == SolveStatus::diverged_to_infinity && rep.note.empty())
    rep.note = "iterates exceeded the divergence ceiling";
  rep.u.params = pr;
  rep.u.eval_points = pts;
  rep.u.values = std::move(cur);
  rep.u.trunc = {std::max(cfg.t_min(), solver_atoms(sigma).cell_size().value_or(0.0)), kInf};
  return rep;
}

std::vector<PointClass> classify_sub_super(const Params& pr, const Measure& sigma, const Measure& mu,
                                           const PotentialField& u, double tol, const QuadratureConfig& cfg) {
  if (!(tol > 0.0)) throw InvalidArgument("classify_sub_super: tol must be > 0");
  const PotentialField Tu = apply_T(pr, sigma, mu, u, cfg);
  std::vector<PointClass> out(u.values.size(), PointClass::neither);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double a = u.values[i];
    const double b = Tu.values[i];
    if (!std::isfinite(a) || !std::isfinite(b)) continue;
    const double band = tol * (1.0 + std::abs(b));
    if (std::abs(a - b) <= band) {
      out[i] = PointClass::solution;
    } else {
      out[i] = a < b ? PointClass::sub : PointClass::super;
    }
  }
  return out;
}

}  // namespace nlpot
