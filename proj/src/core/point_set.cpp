#include "nlpot/point_set.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nlpot/error.hpp"

namespace nlpot {

double norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double distance(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return std::sqrt(s);
}

Point origin(int n) { return Point(static_cast<std::size_t>(n), 0.0); }

PointSet::PointSet(std::vector<Point> points, std::string tag) : points_(std::move(points)), tag_(std::move(tag)) {
  if (points_.empty()) throw InvalidArgument("point set '" + tag_ + "' is empty");
  const std::size_t n = points_.front().size();
  if (n == 0) throw InvalidArgument("point set '" + tag_ + "' has zero-dimensional points");
  for (const auto& p : points_) {
    if (p.size() != n) throw InvalidArgument("point set '" + tag_ + "' mixes dimensions");
    for (double c : p) {
      if (!std::isfinite(c)) throw InvalidArgument("point set '" + tag_ + "' has a non-finite coordinate");
    }
  }
  std::vector<std::size_t> idx(points_.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return points_[a] < points_[b]; });
  for (std::size_t i = 1; i < idx.size(); ++i) {
    if (points_[idx[i]] == points_[idx[i - 1]]) {
      throw InvalidArgument("point set '" + tag_ + "' has duplicate points");
    }
  }
}

std::vector<Point> direction_sequence(int n, int count, std::uint64_t seed) {
  std::vector<Point> dirs;
  if (n == 1) {
    for (int k = 0; k < count; ++k) dirs.push_back({k % 2 == 0 ? 1.0 : -1.0});
    return dirs;
  }
  std::uint64_t state = seed ^ 0xA5A5A5A5DEADBEEFULL;
  auto next = [&state] {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return static_cast<double>((z ^ (z >> 31)) >> 11) * 0x1.0p-53;
  };
  for (int k = 0; k < count; ++k) {
    Point v(static_cast<std::size_t>(n));
    double len = 0.0;
    do {
      for (int i = 0; i < n; ++i) {
        const double u1 = std::max(next(), 1e-300);
        const double u2 = next();
        v[static_cast<std::size_t>(i)] = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
      }
      len = norm(v);
    } while (len < 1e-12);
    for (double& c : v) c /= len;
    dirs.push_back(std::move(v));
  }
  return dirs;
}

std::vector<Point> unique_points(std::vector<Point> points) {
  std::vector<std::size_t> idx(points.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });
  std::vector<bool> keep(points.size(), true);
  for (std::size_t i = 1; i < idx.size(); ++i) {
    if (points[idx[i]] == points[idx[i - 1]]) keep[idx[i]] = false;
  }
  std::vector<Point> out;
  out.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (keep[i]) out.push_back(std::move(points[i]));
  }
  return out;
}

}  // namespace nlpot
