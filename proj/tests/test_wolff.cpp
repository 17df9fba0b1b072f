#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "nlpot/error.hpp"
#include "nlpot/wolff.hpp"

using namespace nlpot;
using doctest::Approx;

namespace {

Measure point_mass(const Point& y, double w = 1.0) { return Measure::atomic(static_cast<int>(y.size()), {y}, {w}); }

Measure random_atomic(std::mt19937_64& rng, int n, int count, double spread = 1.0) {
  std::uniform_real_distribution<double> c(-spread, spread), w(0.1, 2.0);
  std::vector<Point> pts;
  std::vector<double> ws;
  for (int k = 0; k < count; ++k) {
    Point y(static_cast<std::size_t>(n));
    for (auto& v : y) v = c(rng);
    pts.push_back(y);
    ws.push_back(w(rng));
  }
  return Measure::atomic(n, pts, ws);
}

Point along(int n, double r) {
  Point x = origin(n);
  x[0] = r;
  return x;
}

double closed_form_point_mass(const Params& pr, double r) {
  return (pr.p - 1.0) / pr.s * std::pow(r, -pr.s / (pr.p - 1.0));
}

}  // namespace

TEST_CASE("point-mass examples") {
  const Params a = validate_params(2.0, 0.5, 1.0, 3);
  CHECK(wolff_potential(a, point_mass(origin(3)), along(3, 1.0)) == Approx(1.0).epsilon(1e-12));
  const Params b = validate_params(3.0, 1.0, 1.0, 5);
  CHECK(wolff_potential(b, point_mass(origin(5)), along(5, 2.0)) == Approx(0.5).epsilon(1e-12));
  CHECK(wolff_potential(a, Measure::zero(3), origin(3)) == 0.0);
  CHECK(std::isinf(wolff_potential(a, point_mass(origin(3)), origin(3))));
}

TEST_CASE("point-mass closed form with quadrature forced on constant pieces") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> P(1.3, 4.0), R(0.05, 20.0);
  QuadratureConfig cfg;
  cfg.closed_form_pieces = false;
  for (int k = 0; k < 20; ++k) {
    const double p = P(rng);
    const int n = 2 + static_cast<int>(rng() % 5);
    const double alpha = std::uniform_real_distribution<double>(0.1, 0.95 * n / p)(rng);
    const Params pr = validate_params(p, 0.4 * (p - 1.0), alpha, n);
    const double r = R(rng);
    // A tail start beyond r sends the constant piece through the panels.
    const QuadResult w = wolff_potential_detailed(pr, point_mass(origin(n)), along(n, r), cfg, 40.0 * r);
    CHECK(w.converged);
    CHECK(w.value == Approx(closed_form_point_mass(pr, r)).epsilon(1e-8));
  }
}

TEST_CASE("truncated point-mass potential") {
  const Params pr = validate_params(2.0, 0.5, 1.0, 3);
  QuadratureConfig cfg;
  cfg.t_min_policy = TMinPolicy::cell(0.5);
  // Inside the cell the integral starts at h.
  CHECK(wolff_potential(pr, point_mass(origin(3)), origin(3), cfg) == Approx(2.0).epsilon(1e-12));
  CHECK(wolff_potential(pr, point_mass(origin(3)), along(3, 2.0), cfg) == Approx(0.5).epsilon(1e-12));
}

TEST_CASE("uniform ball potentials match frozen extended-precision references") {
  // Reference: the radial dt/t integral of the exact lens volume, evaluated
  // to 25 digits with breakpoints at |R - d| and R + d.
  struct Case {
    int n;
    double p, alpha, d, ref;
  };
  const Case cases[] = {
      {3, 2.0, 1.0, 0.0, 6.283185307179586476925287},  {3, 2.0, 1.0, 0.5, 5.75958653158128760384818},
      {3, 2.0, 1.0, 2.0, 2.094395102393195492308429},  {3, 1.5, 1.0, 0.5, 8.486449799451555023108526},
      {3, 2.0, 0.75, 0.5, 5.048935490345536435826095}, {3, 3.0, 0.8, 0.5, 8.375246912518556686625187},
      {5, 3.0, 1.0, 0.5, 3.648184772823642818063785},  {5, 3.0, 1.0, 1.5, 1.773098924610268854326709},
  };
  for (const auto& c : cases) {
    const Params pr = validate_params(c.p, 0.25 * (c.p - 1.0), c.alpha, c.n);
    const Measure ball = Measure::radial(c.n, {0.0, 1.0}, {1.0});
    const QuadResult r = wolff_potential_detailed(pr, ball, along(c.n, c.d), QuadratureConfig{});
    CHECK(r.converged);
    CHECK(r.value == Approx(c.ref).epsilon(1e-8));
  }
}

TEST_CASE("homogeneity in the measure") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> L(-3.0, 3.0);
  const Measure m = Measure::radial(3, {0.0, 0.4, 1.0}, {1.0, 0.3});
  for (double p : {1.5, 2.0, 3.0}) {
    const Params pr = validate_params(p, 0.3 * (p - 1.0), 0.8, 3);
    for (int k = 0; k < 5; ++k) {
      const double lam = std::pow(10.0, L(rng));
      const Point x{0.3, 0.2, -0.5};
      CHECK(wolff_potential(pr, scale(m, lam), x) == Approx(std::pow(lam, 1.0 / (p - 1.0)) * wolff_potential(pr, m, x)).epsilon(1e-9));
    }
  }
}

TEST_CASE("monotone in the measure") {
  std::mt19937_64 rng(13);
  const Params pr = validate_params(1.7, 0.3, 1.0, 3);
  const Measure a = random_atomic(rng, 3, 10);
  const Measure b = combine(a, random_atomic(rng, 3, 5));
  for (int k = 0; k < 10; ++k) {
    const Point x{0.1 * k, 0.5, -0.3};
    CHECK(wolff_potential(pr, a, x) <= wolff_potential(pr, b, x));
  }
}

TEST_CASE("p = 2 additivity and the Riesz ratio") {
  std::mt19937_64 rng(21);
  const Params pr = validate_params(2.0, 0.5, 0.8, 3);
  const Measure a = random_atomic(rng, 3, 8);
  const Measure b = random_atomic(rng, 3, 8);
  std::vector<double> ratios;
  for (int k = 0; k < 10; ++k) {
    const Point x{std::uniform_real_distribution<double>(-1.5, 1.5)(rng), 0.37, 0.11};
    const double wa = wolff_potential(pr, a, x);
    CHECK(wolff_potential(pr, combine(a, b), x) == Approx(wa + wolff_potential(pr, b, x)).epsilon(1e-9));
    ratios.push_back(wa / riesz_potential(2.0 * pr.alpha, a, x));
  }
  for (double r : ratios) CHECK(r == Approx(ratios.front()).epsilon(1e-9));
  CHECK(ratios.front() == Approx(1.0 / pr.s).epsilon(1e-9));
}

TEST_CASE("riesz examples") {
  CHECK(riesz_potential(2.0, point_mass(origin(3)), along(3, 1.0)) == Approx(1.0));
  const Measure two = Measure::atomic(3, {along(3, 1.0), along(3, -1.0)}, {1.0, 1.0});
  CHECK(riesz_potential(2.0, two, origin(3)) == Approx(2.0));
  CHECK(std::isinf(riesz_potential(2.0, two, along(3, 1.0))));
  CHECK_THROWS_AS(riesz_potential(3.0, two, origin(3)), InvalidArgument);
  CHECK_THROWS_AS(riesz_potential(0.0, two, origin(3)), InvalidArgument);
  // Newtonian potential of the unit ball at its centre: 2 pi.
  CHECK(riesz_potential(2.0, Measure::radial(3, {0.0, 1.0}, {1.0}), origin(3)) == Approx(2.0 * M_PI).epsilon(1e-8));
}

TEST_CASE("tail exactness: a larger split radius changes nothing") {
  const Params pr = validate_params(2.5, 0.5, 1.0, 3);
  const Measure m = Measure::radial(3, {0.0, 0.5, 1.0}, {1.0, 2.0});
  const Point x{0.2, 0.1, 0.0};
  const double base = wolff_potential(pr, m, x);
  for (double T : {1.5, 3.0, 10.0}) {
    const QuadResult r = wolff_potential_detailed(pr, m, x, QuadratureConfig{}, T);
    CHECK(r.value == Approx(base).epsilon(1e-9));
  }
  CHECK_THROWS_AS(wolff_potential_detailed(pr, m, x, QuadratureConfig{}, 0.5), InvalidArgument);
}

TEST_CASE("refinement changes radial potentials below tolerance") {
  const Params pr = validate_params(1.6, 0.3, 1.0, 3);
  const Measure m = Measure::radial(3, {0.0, 0.3, 0.8, 1.5}, {2.0, 0.0, 0.7});
  QuadratureConfig cfg;
  for (double d : {0.0, 0.3, 0.55, 1.0, 2.0}) {
    const Point x = along(3, d);
    CHECK(wolff_potential(pr, m, x, cfg.refined()) == Approx(wolff_potential(pr, m, x, cfg)).epsilon(1e-8));
  }
}

TEST_CASE("discrete operator agrees with the direct potential") {
  std::mt19937_64 rng(33);
  for (double p : {1.5, 2.0, 3.0}) {
    const Params pr = validate_params(p, 0.3 * (p - 1.0), 0.8, 3);
    const Measure src = random_atomic(rng, 3, 12);
    std::vector<Point> targets;
    for (int k = 0; k < 6; ++k) targets.push_back({0.2 * k, -0.1, 0.3});
    const double h = 0.05;
    DiscreteWolffOperator op(pr, targets, src.atoms().points, h);
    std::vector<double> out(targets.size());
    op.apply(src.atoms().weights, out);
    QuadratureConfig cfg;
    cfg.t_min_policy = TMinPolicy::cell(h);
    for (std::size_t i = 0; i < targets.size(); ++i)
      CHECK(out[i] == Approx(wolff_potential(pr, src, targets[i], cfg)).epsilon(1e-12));
  }
}

TEST_CASE("discrete operator gradient matches finite differences") {
  std::mt19937_64 rng(34);
  for (double p : {1.5, 2.0, 3.0}) {
    const Params pr = validate_params(p, 0.3 * (p - 1.0), 0.8, 3);
    const Measure src = random_atomic(rng, 3, 7);
    std::vector<Point> targets;
    for (int k = 0; k < 5; ++k) targets.push_back({0.3 * k - 0.5, 0.2, 0.1});
    DiscreteWolffOperator op(pr, targets, src.atoms().points, 0.01);
    const std::vector<double> w = src.atoms().weights;
    const std::vector<double> coeff{1.0, 0.5, 2.0, 0.3, 1.1};
    std::vector<double> grad(w.size()), sing(w.size()), out(targets.size());
    op.gradient(w, coeff, grad, sing);
    for (double v : sing) CHECK(v == 0.0);
    auto f = [&](const std::vector<double>& ww) {
      op.apply(ww, out);
      double acc = 0.0;
      for (std::size_t i = 0; i < out.size(); ++i) acc += coeff[i] * out[i];
      return acc;
    };
    for (std::size_t j = 0; j < w.size(); ++j) {
      auto up = w, dn = w;
      const double eps = 1e-6 * w[j];
      up[j] += eps;
      dn[j] -= eps;
      CHECK(grad[j] == Approx((f(up) - f(dn)) / (2.0 * eps)).epsilon(1e-5));
    }
  }
}

TEST_CASE("tail classifier") {
  const Params pr = validate_params(2.0, 0.5, 1.0, 3);
  CHECK(tail_exists(pr, FiniteMassGrowth{1.0}) == TailClass::finite);
  CHECK(tail_exists(pr, PowerLogGrowth{1.0, pr.s, 0.0}) == TailClass::infinite);
  CHECK(tail_exists(pr, PowerLogGrowth{1.0, pr.s, -2.0}) == TailClass::finite);
  CHECK(tail_exists(pr, PowerLogGrowth{1.0, pr.s, -1.0}) == TailClass::infinite);
  CHECK(tail_exists(pr, PowerLogGrowth{1.0, 0.5, 3.0}) == TailClass::finite);
  CHECK(tail_exists(pr, PowerLogGrowth{1.0, 2.0, 0.0}) == TailClass::infinite);
  CHECK_THROWS_AS(tail_exists(pr, PowerLogGrowth{-1.0, 0.0, 0.0}), InvalidArgument);
  // p-Laplace with n = p: s = 0 makes every nonzero finite mass critical.
  const Params crit = validate_params(2.0, 0.5, 1.0, 2, Preset::p_laplace);
  CHECK(tail_exists(crit, FiniteMassGrowth{1.0}) == TailClass::infinite);
  CHECK(tail_exists(crit, growth_of(Measure::atomic(2, {{0.0, 0.0}}, {1.0}))) == TailClass::infinite);
}
