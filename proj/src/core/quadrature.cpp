#include "nlpot/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "nlpot/error.hpp"

namespace nlpot {

namespace {

constexpr int kGaussOrder = 10;

struct GaussRule {
  std::array<double, kGaussOrder> nodes{};
  std::array<double, kGaussOrder> weights{};
};

GaussRule make_gauss_rule() {
  GaussRule rule;
  const int m = kGaussOrder;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[static_cast<std::size_t>(i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

const GaussRule& gauss_rule() {
  static const GaussRule rule = make_gauss_rule();
  return rule;
}

template <class F>
double gauss(const F& f, double a, double b) {
  const auto& rule = gauss_rule();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (int i = 0; i < kGaussOrder; ++i) {
    sum += rule.weights[static_cast<std::size_t>(i)] * f(mid + half * rule.nodes[static_cast<std::size_t>(i)]);
  }
  return sum * half;
}

struct Accumulator {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
};

template <class F>
void adapt(const F& f, double a, double b, double whole, int depth, const QuadratureConfig& cfg, Accumulator& acc) {
  const double m = 0.5 * (a + b);
  const double left = gauss(f, a, m);
  const double right = gauss(f, m, b);
  const double refined = left + right;
  const double err = std::abs(refined - whole);
  if (err <= cfg.rel_tol * std::abs(refined) || err <= 1e-300 || !std::isfinite(refined)) {
    acc.value += refined;
    acc.error += err;
    return;
  }
  if (depth >= cfg.max_depth) {
    acc.value += refined;
    acc.error += err;
    acc.converged = false;
    return;
  }
  adapt(f, a, m, left, depth + 1, cfg, acc);
  adapt(f, m, b, right, depth + 1, cfg, acc);
}

// Integral over [lo, hi] of coef^a (t/ref)^{expo a} t^{-b} dt/t.
double power_piece(double lo, double hi, double coef, double ref, double expo, double a, double b) {
  if (coef == 0.0) return 0.0;
  const double lambda = expo * a - b;
  const double ca = std::pow(coef, a);
  if (lambda == 0.0) {
    if (lo == 0.0 || std::isinf(hi)) return kInf;
    return ca * std::pow(ref, -expo * a) * std::log(hi / lo);
  }
  if (lo == 0.0) {
    if (lambda < 0.0) return kInf;
    if (std::isinf(hi)) return kInf;
    return ca * std::pow(hi / ref, expo * a) * std::pow(hi, -b) / lambda;
  }
  if (std::isinf(hi)) {
    if (lambda > 0.0) return kInf;
    return ca * std::pow(lo / ref, expo * a) * std::pow(lo, -b) / (-lambda);
  }
  return ca * std::pow(lo / ref, expo * a) * std::pow(lo, -b) * std::expm1(lambda * std::log(hi / lo)) / lambda;
}

double constant_piece(double lo, double hi, double c, double a, double b) {
  if (c == 0.0) return 0.0;
  return std::pow(c, a) * power_segment(lo, hi, b);
}

}  // namespace

double power_segment(double lo, double hi, double decay) {
  if (!(hi > lo)) return 0.0;
  if (lo == 0.0) return kInf;
  if (std::isinf(hi)) return std::pow(lo, -decay) / decay;
  return std::pow(lo, -decay) * -std::expm1(-decay * std::log(hi / lo)) / decay;
}

void QuadratureConfig::validate() const {
  if (!(rel_tol > 0.0)) throw InvalidArgument("quadrature: rel_tol must be > 0");
  if (panels_per_decade < 4) throw InvalidArgument("quadrature: panels_per_decade must be >= 4");
  if (!(t_min_policy.h >= 0.0)) throw InvalidArgument("quadrature: t_min must be >= 0");
}

QuadratureConfig QuadratureConfig::for_measure(const Measure& m, const QuadratureConfig& base) {
  QuadratureConfig cfg = base;
  const auto h = m.cell_size();
  cfg.t_min_policy = h ? TMinPolicy::cell(*h) : TMinPolicy::zero();
  return cfg;
}

QuadratureConfig QuadratureConfig::for_measure(const Measure& m) { return for_measure(m, QuadratureConfig{}); }

QuadratureConfig QuadratureConfig::refined() const {
  QuadratureConfig cfg = *this;
  cfg.panels_per_decade *= 2;
  return cfg;
}

double PiecewiseProfile::value_at(double t) const {
  for (const auto& pc : pieces) {
    if (t >= pc.lo && t < pc.hi) {
      switch (pc.shape) {
        case PieceShape::constant:
          return pc.coef;
        case PieceShape::power:
          return pc.coef * std::pow(t / pc.ref, pc.expo);
        case PieceShape::smooth:
          return eval(t);
      }
    }
  }
  return pieces.empty() ? 0.0 : pieces.back().coef;
}

QuadResult integrate_power_kernel(const PiecewiseProfile& profile, double a, double b, double t_lo, double t_split,
                                  const QuadratureConfig& cfg) {
  cfg.validate();
  if (!(b > 0.0)) throw InvalidArgument("integrate_power_kernel: decay must be > 0");
  Accumulator acc;
  const double panel_width = std::log(10.0) / cfg.panels_per_decade;

  auto numeric = [&](double lo, double hi, auto&& mass) {
    const double ulo = std::log(lo);
    const double uhi = std::log(hi);
    const auto f = [&](double u) {
      const double t = std::exp(u);
      const double mv = mass(t);
      return mv > 0.0 ? std::pow(mv, a) * std::exp(-b * u) : 0.0;
    };
    const int panels = std::max(1, static_cast<int>(std::ceil((uhi - ulo) / panel_width)));
    for (int k = 0; k < panels; ++k) {
      const double u0 = ulo + (uhi - ulo) * k / panels;
      const double u1 = k + 1 == panels ? uhi : ulo + (uhi - ulo) * (k + 1) / panels;
      adapt(f, u0, u1, gauss(f, u0, u1), 0, cfg, acc);
    }
  };

  for (const auto& pc : profile.pieces) {
    const double lo = std::max(pc.lo, t_lo);
    const double hi = pc.hi;
    if (!(hi > lo)) continue;
    switch (pc.shape) {
      case PieceShape::power:
        acc.value += power_piece(lo, hi, pc.coef, pc.ref, pc.expo, a, b);
        break;
      case PieceShape::constant: {
        if (cfg.closed_form_pieces || lo == 0.0 || pc.coef == 0.0) {
          acc.value += constant_piece(lo, hi, pc.coef, a, b);
          break;
        }
        const double cut = std::min(hi, std::max(lo, t_split));
        if (cut > lo) numeric(lo, cut, [&](double) { return pc.coef; });
        if (hi > cut) acc.value += constant_piece(cut, hi, pc.coef, a, b);
        break;
      }
      case PieceShape::smooth:
        if (lo == 0.0 || std::isinf(hi)) throw InvalidArgument("integrate_power_kernel: smooth piece must be bounded away from 0 and infinity");
        numeric(lo, hi, profile.eval);
        break;
    }
  }
  if (!std::isfinite(acc.value)) return {kInf, 0.0, true};
  const bool within = acc.error <= cfg.rel_tol * std::abs(acc.value) || acc.error == 0.0;
  return {acc.value, acc.error, acc.converged || within};
}

PiecewiseProfile ball_mass_profile(const Measure& m, const Point& x) {
  PiecewiseProfile prof;
  if (m.is_zero()) {
    prof.pieces.push_back({0.0, kInf, PieceShape::constant, 0.0});
    return prof;
  }
  if (m.is_atomic()) {
    const auto& rep = m.atoms();
    std::vector<std::pair<double, double>> dw;
    dw.reserve(rep.points.size());
    for (std::size_t i = 0; i < rep.points.size(); ++i) {
      if (rep.weights[i] > 0.0) dw.emplace_back(distance(rep.points[i], x), rep.weights[i]);
    }
    std::sort(dw.begin(), dw.end());
    double lo = 0.0;
    double cum = 0.0;
    std::size_t i = 0;
    while (i < dw.size()) {
      const double d = dw[i].first;
      if (d > lo) prof.pieces.push_back({lo, d, PieceShape::constant, cum});
      while (i < dw.size() && dw[i].first == d) cum += dw[i++].second;
      lo = d;
    }
    prof.pieces.push_back({lo, kInf, PieceShape::constant, cum});
    return prof;
  }

  const auto& rep = m.bins();
  const int n = m.dim();
  const double d = norm(x);
  const double outer = d + m.support_radius();
  std::vector<double> breaks;
  for (std::size_t k = 1; k < rep.bin_edges.size(); ++k) {
    const double e = rep.bin_edges[k];
    if (rep.bin_edges[k - 1] >= m.support_radius()) break;
    breaks.push_back(std::abs(e - d));
    breaks.push_back(e + d);
  }
  breaks.push_back(outer);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  while (!breaks.empty() && breaks.back() > outer) breaks.pop_back();

  prof.eval = [m, x](double t) { return ball_mass(m, x, t); };
  double lo = 0.0;
  std::size_t b = 0;
  if (!breaks.empty() && breaks.front() == 0.0) {
    // x sits on a bin edge: start from a tiny radius with the local power law.
    const double eps = 1e-10 * std::max(outer, 1e-300);
    const double mass = ball_mass(m, x, eps);
    prof.pieces.push_back({0.0, eps, PieceShape::power, mass, eps, static_cast<double>(n)});
    lo = eps;
    b = 1;
  } else if (!breaks.empty()) {
    double rho = 0.0;
    for (std::size_t k = 0; k < rep.densities.size(); ++k) {
      if (d >= rep.bin_edges[k] && d < rep.bin_edges[k + 1]) rho = rep.densities[k];
    }
    prof.pieces.push_back({0.0, breaks.front(), PieceShape::power, rho * unit_ball_volume(n), 1.0, static_cast<double>(n)});
    lo = breaks.front();
    b = 1;
  }
  for (; b < breaks.size(); ++b) {
    if (breaks[b] > lo) prof.pieces.push_back({lo, breaks[b], PieceShape::smooth});
    lo = breaks[b];
  }
  prof.pieces.push_back({lo, kInf, PieceShape::constant, m.total_mass()});
  return prof;
}

}  // namespace nlpot
