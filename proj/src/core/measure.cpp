#include "nlpot/measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>

#include "nlpot/error.hpp"

namespace nlpot {

namespace {

double ball_volume(int n, double r) { return unit_ball_volume(n) * std::pow(r, n); }

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double unit_uniform(std::uint64_t& state) {
  return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

// Quasi-uniform unit directions; `shell` rotates the pattern between shells.
std::vector<Point> directions(int n, int count, int shell) {
  std::vector<Point> dirs;
  dirs.reserve(static_cast<std::size_t>(count));
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  if (n == 1) {
    for (int k = 0; k < count; ++k) dirs.push_back({k % 2 == 0 ? 1.0 : -1.0});
  } else if (n == 2) {
    const double offset = std::fmod(shell * golden, 1.0);
    for (int k = 0; k < count; ++k) {
      const double th = 2.0 * std::numbers::pi * (k + offset) / count;
      dirs.push_back({std::cos(th), std::sin(th)});
    }
  } else if (n == 3) {
    const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
    const double offset = 2.0 * std::numbers::pi * std::fmod(shell * golden, 1.0);
    for (int k = 0; k < count; ++k) {
      const double z = 1.0 - (2.0 * k + 1.0) / count;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double ph = k * golden_angle + offset;
      dirs.push_back({r * std::cos(ph), r * std::sin(ph), z});
    }
  } else {
    std::uint64_t state = 0x5EEDULL * static_cast<std::uint64_t>(n) + static_cast<std::uint64_t>(shell) * 7919ULL;
    for (int k = 0; k < count; ++k) {
      Point v(static_cast<std::size_t>(n));
      double len = 0.0;
      do {
        for (int i = 0; i < n; i += 2) {
          const double u1 = std::max(unit_uniform(state), 1e-300);
          const double u2 = unit_uniform(state);
          const double rad = std::sqrt(-2.0 * std::log(u1));
          v[static_cast<std::size_t>(i)] = rad * std::cos(2.0 * std::numbers::pi * u2);
          if (i + 1 < n) v[static_cast<std::size_t>(i + 1)] = rad * std::sin(2.0 * std::numbers::pi * u2);
        }
        len = norm(v);
      } while (len < 1e-12);
      for (double& c : v) c /= len;
      dirs.push_back(std::move(v));
    }
  }
  return dirs;
}

struct Node {
  Point y;
  double volume;
};

// Polar grid on B(center, radius): shells of equal thickness, node counts
// proportional to shell volume. Returns the nodes and the cell size.
std::pair<std::vector<Node>, double> polar_nodes(int n, const Point& center, double radius, int target) {
  target = std::max(target, 1);
  const double h = std::pow(ball_volume(n, radius) / target, 1.0 / n);
  const int shells = std::max(1, static_cast<int>(std::lround(radius / h)));
  const double cell_volume = std::pow(h, n);
  std::vector<Node> nodes;
  for (int j = 0; j < shells; ++j) {
    const double r_lo = radius * j / shells;
    const double r_hi = radius * (j + 1) / shells;
    const double vol = ball_volume(n, r_hi) - ball_volume(n, r_lo);
    int count = std::max(1, static_cast<int>(std::lround(vol / cell_volume)));
    if (n == 1 && j > 0) count = 2;
    if (j == 0 && count == 1) {
      nodes.push_back({center, vol});
      continue;
    }
    if (n == 1) count = 2;
    const double r_mid = std::pow(0.5 * (std::pow(r_lo, n) + std::pow(r_hi, n)), 1.0 / n);
    for (const auto& dir : directions(n, count, j)) {
      Point y = center;
      for (int i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] += r_mid * dir[static_cast<std::size_t>(i)];
      nodes.push_back({std::move(y), vol / count});
    }
  }
  return {std::move(nodes), h};
}

// Bin index k with e_k <= r < e_{k+1}; bins.size() when outside.
std::size_t bin_of(const RadialRep& rep, double r) {
  const auto it = std::upper_bound(rep.bin_edges.begin(), rep.bin_edges.end(), r);
  const auto k = static_cast<std::size_t>(std::distance(rep.bin_edges.begin(), it));
  if (k == 0 || k > rep.densities.size()) return rep.densities.size();
  return k - 1;
}

// Atomic quadrature of m|_{B(center, radius)} for radial m with exact per-bin masses.
Measure radial_quadrature(const Measure& m, const Point& center, double radius, int target) {
  const RadialRep& rep = m.bins();
  const int n = m.dim();
  const double d = norm(center);
  // Grid the smaller of B(center, radius) and the support ball.
  const bool around_center = radius <= m.support_radius();
  auto [nodes, h] = polar_nodes(n, around_center ? center : origin(n), around_center ? radius : m.support_radius(), target);

  const std::size_t nbins = rep.densities.size();
  std::vector<double> exact(nbins, 0.0);
  for (std::size_t k = 0; k < nbins; ++k) {
    if (rep.densities[k] == 0.0) continue;
    const double outer = ball_intersection_volume(n, d, radius, rep.bin_edges[k + 1]);
    const double inner = rep.bin_edges[k] > 0.0 ? ball_intersection_volume(n, d, radius, rep.bin_edges[k]) : 0.0;
    exact[k] = rep.densities[k] * std::max(0.0, outer - inner);
  }

  std::vector<Point> points;
  std::vector<double> weights;
  std::vector<std::size_t> owner;
  std::vector<double> bin_sum(nbins, 0.0);
  for (auto& node : nodes) {
    if (!around_center && distance(node.y, center) > radius) continue;
    const std::size_t k = bin_of(rep, norm(node.y));
    if (k >= nbins || rep.densities[k] == 0.0) continue;
    const double w = rep.densities[k] * node.volume;
    bin_sum[k] += w;
    owner.push_back(k);
    points.push_back(std::move(node.y));
    weights.push_back(w);
  }
  for (std::size_t i = 0; i < weights.size(); ++i) weights[i] *= exact[owner[i]] / bin_sum[owner[i]];

  Point axis = origin(n);
  if (d > 0.0) {
    for (int i = 0; i < n; ++i) axis[static_cast<std::size_t>(i)] = center[static_cast<std::size_t>(i)] / d;
  } else {
    axis[0] = 1.0;
  }
  for (std::size_t k = 0; k < nbins; ++k) {
    if (exact[k] <= 0.0 || bin_sum[k] > 0.0) continue;
    // Closest point of the annulus to the centre lies inside the ball.
    const double r = std::clamp(d, rep.bin_edges[k], rep.bin_edges[k + 1]);
    Point y = axis;
    for (double& c : y) c *= r;
    points.push_back(std::move(y));
    weights.push_back(exact[k]);
  }
  return Measure::atomic(n, std::move(points), std::move(weights), h);
}

}  // namespace

Measure::Measure(int n, std::variant<AtomicRep, RadialRep> rep) : n_(n), rep_(std::move(rep)) {
  if (n < 1) throw InvalidArgument("measure dimension must be >= 1");
  if (auto* a = std::get_if<AtomicRep>(&rep_)) {
    if (a->points.size() != a->weights.size()) throw InvalidArgument("atomic measure: points/weights length mismatch");
    for (std::size_t i = 0; i < a->points.size(); ++i) {
      if (a->points[i].size() != static_cast<std::size_t>(n)) {
        throw InvalidArgument("atomic measure: point " + std::to_string(i) + " has wrong dimension");
      }
      for (double c : a->points[i]) {
        if (!std::isfinite(c)) throw InvalidArgument("atomic measure: non-finite coordinate");
      }
      const double w = a->weights[i];
      if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("atomic measure: weights must be finite and >= 0");
      total_mass_ += w;
      if (w > 0.0) support_radius_ = std::max(support_radius_, norm(a->points[i]));
    }
    if (a->cell_size && !(*a->cell_size > 0.0)) throw InvalidArgument("atomic measure: cell_size must be > 0");
  } else {
    auto& r = std::get<RadialRep>(rep_);
    if (r.bin_edges.size() != r.densities.size() + 1 || r.densities.empty()) {
      throw InvalidArgument("radial measure: need k+1 bin edges for k >= 1 densities");
    }
    if (r.bin_edges.front() != 0.0) throw InvalidArgument("radial measure: first bin edge must be 0");
    for (std::size_t k = 1; k < r.bin_edges.size(); ++k) {
      if (!(r.bin_edges[k] > r.bin_edges[k - 1]) || !std::isfinite(r.bin_edges[k])) {
        throw InvalidArgument("radial measure: bin edges must be strictly increasing and finite");
      }
    }
    for (std::size_t k = 0; k < r.densities.size(); ++k) {
      const double rho = r.densities[k];
      if (!(rho >= 0.0) || !std::isfinite(rho)) throw InvalidArgument("radial measure: densities must be finite and >= 0");
      total_mass_ += rho * (ball_volume(n, r.bin_edges[k + 1]) - ball_volume(n, r.bin_edges[k]));
      if (rho > 0.0) support_radius_ = r.bin_edges[k + 1];
    }
  }
}

Measure Measure::atomic(int n, std::vector<Point> points, std::vector<double> weights, std::optional<double> cell_size) {
  return Measure(n, AtomicRep{std::move(points), std::move(weights), cell_size});
}

Measure Measure::radial(int n, std::vector<double> bin_edges, std::vector<double> densities) {
  return Measure(n, RadialRep{std::move(bin_edges), std::move(densities)});
}

Measure Measure::zero(int n) { return Measure(n, AtomicRep{}); }

const AtomicRep& Measure::atoms() const {
  if (const auto* a = std::get_if<AtomicRep>(&rep_)) return *a;
  throw InvalidArgument("measure is not atomic");
}

const RadialRep& Measure::bins() const {
  if (const auto* r = std::get_if<RadialRep>(&rep_)) return *r;
  throw InvalidArgument("measure is not radial");
}

std::optional<double> Measure::cell_size() const {
  if (const auto* a = std::get_if<AtomicRep>(&rep_)) return a->cell_size;
  return std::nullopt;
}

Measure Measure::with_tag(std::string tag) const {
  Measure m = *this;
  m.tag_ = std::move(tag);
  return m;
}

Measure scale(const Measure& m, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidArgument("scale: lambda must be finite and >= 0");
  if (m.is_atomic()) {
    AtomicRep a = m.atoms();
    for (double& w : a.weights) w *= lambda;
    return Measure::atomic(m.dim(), std::move(a.points), std::move(a.weights), a.cell_size).with_tag(m.tag());
  }
  RadialRep r = m.bins();
  for (double& rho : r.densities) rho *= lambda;
  return Measure::radial(m.dim(), std::move(r.bin_edges), std::move(r.densities)).with_tag(m.tag());
}

Measure combine(const Measure& a, const Measure& b) {
  if (a.dim() != b.dim()) throw InvalidArgument("combine: dimension mismatch");
  if (a.is_atomic() && b.is_atomic()) {
    std::map<Point, double> merged;
    std::vector<Point> order;
    for (const Measure* m : {&a, &b}) {
      const auto& rep = m->atoms();
      for (std::size_t i = 0; i < rep.points.size(); ++i) {
        auto [it, inserted] = merged.try_emplace(rep.points[i], 0.0);
        if (inserted) order.push_back(rep.points[i]);
        it->second += rep.weights[i];
      }
    }
    std::vector<double> weights;
    weights.reserve(order.size());
    for (const auto& p : order) weights.push_back(merged[p]);
    std::optional<double> cell = a.cell_size();
    if (b.cell_size()) cell = cell ? std::min(*cell, *b.cell_size()) : b.cell_size();
    return Measure::atomic(a.dim(), std::move(order), std::move(weights), cell);
  }
  if (a.is_radial() && b.is_radial()) {
    const auto& ra = a.bins();
    const auto& rb = b.bins();
    std::vector<double> edges = ra.bin_edges;
    edges.insert(edges.end(), rb.bin_edges.begin(), rb.bin_edges.end());
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    auto density_at = [](const RadialRep& r, double mid) {
      const std::size_t k = bin_of(r, mid);
      return k < r.densities.size() ? r.densities[k] : 0.0;
    };
    std::vector<double> dens;
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
      const double mid = 0.5 * (edges[k] + edges[k + 1]);
      dens.push_back(density_at(ra, mid) + density_at(rb, mid));
    }
    return Measure::radial(a.dim(), std::move(edges), std::move(dens));
  }
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  throw InvalidArgument("combine: cannot add an atomic and a radial measure");
}

Measure translate(const Measure& m, const Point& offset) {
  if (offset.size() != static_cast<std::size_t>(m.dim())) throw InvalidArgument("translate: dimension mismatch");
  AtomicRep a = m.atoms();
  for (auto& p : a.points) {
    for (std::size_t i = 0; i < p.size(); ++i) p[i] += offset[i];
  }
  return Measure::atomic(m.dim(), std::move(a.points), std::move(a.weights), a.cell_size).with_tag(m.tag());
}

Measure restrict(const Measure& m, const Point& x, double t, int target_atoms) {
  if (!(t > 0.0)) throw InvalidArgument("restrict: radius must be > 0");
  if (x.size() != static_cast<std::size_t>(m.dim())) throw InvalidArgument("restrict: dimension mismatch");
  if (m.is_atomic()) {
    const auto& a = m.atoms();
    std::vector<Point> pts;
    std::vector<double> w;
    for (std::size_t i = 0; i < a.points.size(); ++i) {
      if (distance(a.points[i], x) <= t) {
        pts.push_back(a.points[i]);
        w.push_back(a.weights[i]);
      }
    }
    return Measure::atomic(m.dim(), std::move(pts), std::move(w), a.cell_size).with_tag(m.tag());
  }
  const auto& r = m.bins();
  if (norm(x) == 0.0) {
    std::vector<double> edges{0.0};
    std::vector<double> dens;
    for (std::size_t k = 0; k < r.densities.size() && r.bin_edges[k] < t; ++k) {
      edges.push_back(std::min(r.bin_edges[k + 1], t));
      dens.push_back(r.densities[k]);
    }
    return Measure::radial(m.dim(), std::move(edges), std::move(dens)).with_tag(m.tag());
  }
  if (m.is_zero()) return Measure::zero(m.dim());
  return radial_quadrature(m, x, std::min(t, norm(x) + m.support_radius()), target_atoms).with_tag(m.tag());
}

Measure to_atomic(const Measure& m, int target_atoms) {
  if (m.is_atomic()) return m;
  if (m.is_zero()) return Measure::zero(m.dim());
  return radial_quadrature(m, origin(m.dim()), m.support_radius(), target_atoms).with_tag(m.tag());
}

}  // namespace nlpot
