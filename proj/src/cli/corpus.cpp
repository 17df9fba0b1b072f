#include "nlpot/cli/corpus.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "nlpot/error.hpp"

namespace nlpot::cli {

namespace {

// Uniform doubles from the raw mt19937_64 stream, which the standard pins
// down exactly (the library distributions are implementation-defined).
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo, double hi) { return lo + (hi - lo) * static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  int integer(int lo, int hi) { return lo + static_cast<int>(rng_() % static_cast<std::uint64_t>(hi - lo + 1)); }
  std::uint64_t bits() { return rng_(); }

 private:
  std::mt19937_64 rng_;
};

std::uint64_t entry_seed(std::uint64_t seed, int k) {
  return seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(k) * 0xD1B54A32D192ED03ULL + 1;
}

Point scaled(const Point& d, double r) {
  Point p = d;
  for (double& c : p) c *= r;
  return p;
}

Measure atomic_ball(int n, double radius, double mass, int atoms) {
  const double rho = mass / (unit_ball_volume(n) * std::pow(radius, n));
  return to_atomic(Measure::radial(n, {0.0, radius}, {rho}), atoms);
}

Measure radial_bump(int n, Stream& s) {
  const double R = s.uniform(0.7, 1.3);
  const double A = s.uniform(0.5, 2.0);
  const int bins = 6;
  std::vector<double> edges, dens;
  for (int k = 0; k <= bins; ++k) edges.push_back(R * k / bins);
  for (int k = 0; k < bins; ++k) {
    const double mid = (edges[k] + edges[k + 1]) / (2.0 * R);
    dens.push_back(A * (1.0 - mid * mid));
  }
  return Measure::radial(n, edges, dens);
}

Measure annulus(int n, Stream& s) {
  const double R = s.uniform(0.8, 1.3);
  const double a = R * s.uniform(0.3, 0.6);
  return Measure::radial(n, {0.0, a, R}, {0.0, s.uniform(0.5, 2.0)});
}

Measure separated_balls(int n, Stream& s) {
  const int k = s.integer(2, 3);
  const auto dirs = direction_sequence(n, k, s.bits());
  Measure out = Measure::zero(n);
  bool first = true;
  for (int i = 0; i < k; ++i) {
    const double b = s.uniform(0.2, 0.3);
    const double mass = s.uniform(0.3, 0.8);
    const Measure ball = translate(atomic_ball(n, b, mass, 80), scaled(dirs[static_cast<std::size_t>(i)], s.uniform(0.6, 1.0)));
    out = first ? ball : combine(out, ball);
    first = false;
  }
  return out;
}

Measure atomic_cloud(int n, Stream& s) {
  const int m = s.integer(20, 40);
  const auto dirs = direction_sequence(n, m, s.bits());
  std::vector<Point> pts;
  std::vector<double> w;
  for (int i = 0; i < m; ++i) {
    pts.push_back(scaled(dirs[static_cast<std::size_t>(i)], std::pow(s.uniform(0.0, 1.0), 1.0 / n)));
    w.push_back(s.uniform(0.5, 1.5) / m);
  }
  return Measure::atomic(n, std::move(pts), std::move(w), 0.08);
}

}  // namespace

std::vector<CorpusEntry> generate_corpus(int n, int count, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("generate_corpus: n must be >= 1");
  if (count < 0) throw InvalidArgument("generate_corpus: count must be >= 0");
  static const char* families[] = {"radial_bump", "annulus", "separated_balls", "atomic_cloud"};
  std::vector<CorpusEntry> out;
  for (int k = 0; k < count; ++k) {
    Stream s(entry_seed(seed, k));
    const std::string family = families[k % 4];
    Measure m = Measure::zero(n);
    switch (k % 4) {
      case 0:
        m = radial_bump(n, s);
        break;
      case 1:
        m = annulus(n, s);
        break;
      case 2:
        m = separated_balls(n, s);
        break;
      default:
        m = atomic_cloud(n, s);
        break;
    }
    char name[64];
    std::snprintf(name, sizeof name, "m%02d_%s", k, family.c_str());
    out.push_back({name, family, m.with_tag(name)});
  }
  return out;
}

Measure corpus_mu(int n, std::uint64_t seed) {
  const auto d = direction_sequence(n, 1, entry_seed(seed, -1));
  return translate(atomic_ball(n, 0.3, 0.5, 60), scaled(d[0], 1.8)).with_tag("mu");
}

PointSet corpus_probes(int n, std::uint64_t seed) {
  const auto d = direction_sequence(n, 3, entry_seed(seed, -2));
  return PointSet({origin(n), scaled(d[0], 0.5), scaled(d[1], 1.0), scaled(d[2], 2.5)}, "probes");
}

}  // namespace nlpot::cli
