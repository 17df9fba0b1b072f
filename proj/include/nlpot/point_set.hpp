#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace nlpot {

using Point = std::vector<double>;

double norm(std::span<const double> x);
double distance(std::span<const double> x, std::span<const double> y);
Point origin(int n);

/// Finite, non-empty, duplicate-free set of points in R^n.
class PointSet {
 public:
  PointSet() = default;
  /// Throws InvalidArgument on an empty list, mixed dimensions or duplicates.
  PointSet(std::vector<Point> points, std::string tag = {});

  const std::vector<Point>& points() const noexcept { return points_; }
  const Point& operator[](std::size_t i) const { return points_[i]; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  int dim() const { return points_.empty() ? 0 : static_cast<int>(points_.front().size()); }
  const std::string& tag() const noexcept { return tag_; }

  friend bool operator==(const PointSet& a, const PointSet& b) { return a.points_ == b.points_; }

 private:
  std::vector<Point> points_;
  std::string tag_;
};

/// Unit directions in R^n from a seeded Gaussian sequence. The sequence is
/// prefix-stable: the first k directions do not depend on `count`.
std::vector<Point> direction_sequence(int n, int count, std::uint64_t seed);

/// Removes exact duplicates, keeping first occurrences in order.
std::vector<Point> unique_points(std::vector<Point> points);

}  // namespace nlpot
