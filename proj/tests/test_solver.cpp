#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "nlpot/error.hpp"
#include "nlpot/solver.hpp"

using namespace nlpot;
using doctest::Approx;

namespace {

Measure cloud(std::uint64_t seed, int count = 30, double lam = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.6, 0.6), w(0.2, 1.0);
  std::vector<Point> pts;
  std::vector<double> wts;
  for (int i = 0; i < count; ++i) {
    pts.push_back({u(rng), u(rng), u(rng)});
    wts.push_back(lam * w(rng) / count);
  }
  return Measure::atomic(3, pts, wts, 0.05);
}

PointSet probes() {
  return PointSet({Point{1.5, 0.0, 0.0}, Point{0.0, 2.0, 0.0}, Point{0.1, 0.1, 0.1}, Point{-1.0, -1.0, 0.5}});
}

double point_mass_potential(const Params& pr, double r) { return (pr.p - 1.0) / pr.s * std::pow(r, -pr.s / (pr.p - 1.0)); }

}  // namespace

TEST_CASE("no sigma, point-mass mu: one iteration to W mu") {
  const Params pr = validate_params(2.5, 0.6, 1.0, 3);
  const Measure mu = Measure::atomic(3, {origin(3)}, {1.0});
  const PointSet pts({Point{1.0, 0.0, 0.0}, Point{0.0, 0.5, 0.0}, Point{2.0, 2.0, 1.0}});
  const SolveReport rep = solve_monotone(pr, Measure::zero(3), mu, pts, U0Mode::zero);
  CHECK(rep.status == SolveStatus::converged);
  CHECK(rep.iterations == 1);
  const auto u = rep.values_at_requested();
  for (std::size_t i = 0; i < pts.size(); ++i) CHECK(u[i] == Approx(point_mass_potential(pr, norm(pts[i]))).epsilon(1e-8));
  CHECK(rep.fixed_point_residual() == 0.0);
}

TEST_CASE("no mu, zero start: stays at zero") {
  const Params pr = validate_params(2.0, 0.5, 1.0, 3);
  const SolveReport rep = solve_monotone(pr, cloud(1), Measure::zero(3), probes(), U0Mode::zero);
  CHECK(rep.status == SolveStatus::converged);
  for (double v : rep.u.values) CHECK(v == 0.0);
}

TEST_CASE("apply_T: sigma = 0 returns W mu for any u; zero u returns W mu") {
  const Params pr = validate_params(2.0, 0.5, 1.0, 3);
  const Measure mu = Measure::atomic(3, {origin(3)}, {2.0});
  PotentialField u;
  u.params = pr;
  u.eval_points = PointSet({Point{1.0, 0.0, 0.0}, Point{0.0, 3.0, 0.0}});
  u.values = {5.0, 7.0};
  const PotentialField Tu = apply_T(pr, Measure::zero(3), mu, u);
  CHECK(Tu.values[0] == Approx(2.0 * point_mass_potential(pr, 1.0)).epsilon(1e-8));
  CHECK(Tu.values[1] == Approx(2.0 * point_mass_potential(pr, 3.0)).epsilon(1e-8));

  const Measure sigma = cloud(2);
  PotentialField z;
  z.params = pr;
  z.eval_points = coupled_points(sigma, probes());
  z.values.assign(z.eval_points.size(), 0.0);
  const PotentialField Tz = apply_T(pr, sigma, mu, z);
  for (std::size_t i = 0; i < Tz.values.size(); ++i)
    CHECK(Tz.values[i] == Approx(wolff_potential(pr, mu, z.eval_points[i])).epsilon(1e-10));
}

TEST_CASE("apply_T is monotone on random ordered fields") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 3.0);
  for (double p : {1.7, 2.0, 3.0}) {
    const Params pr = validate_params(p, 0.4 * (p - 1.0), 0.9, 3);
    const Measure sigma = cloud(3);
    const Measure mu = Measure::atomic(3, {Point{0.3, 0.2, 0.1}}, {0.5}, 0.05);
    PotentialField u;
    u.params = pr;
    u.eval_points = coupled_points(sigma, probes());
    for (int trial = 0; trial < 5; ++trial) {
      PotentialField v = u;
      u.values.clear();
      v.values.clear();
      for (std::size_t i = 0; i < u.eval_points.size(); ++i) {
        const double a = U(rng);
        u.values.push_back(a);
        v.values.push_back(a + U(rng));
      }
      const auto Tu = apply_T(pr, sigma, mu, u);
      const auto Tv = apply_T(pr, sigma, mu, v);
      for (std::size_t i = 0; i < Tu.values.size(); ++i) CHECK(Tu.values[i] <= Tv.values[i]);
    }
  }
}

TEST_CASE("apply_T: infinite u at a sigma atom spreads everywhere; undefined atoms rejected") {
  const Params pr = validate_params(2.0, 0.5, 1.0, 3);
  const Measure sigma = cloud(4, 5);
  PotentialField u;
  u.params = pr;
  u.eval_points = coupled_points(sigma, probes());
  u.values.assign(u.eval_points.size(), 1.0);
  u.values[0] = std::numeric_limits<double>::infinity();
  for (double v : apply_T(pr, sigma, Measure::zero(3), u).values) CHECK(std::isinf(v));
  PotentialField partial;
  partial.params = pr;
  partial.eval_points = probes();
  partial.values.assign(partial.eval_points.size(), 1.0);
  CHECK_THROWS_AS(apply_T(pr, sigma, Measure::zero(3), partial), InvalidArgument);
}

TEST_CASE("seeded solve without mu: nontrivial, monotone, small residual") {
  for (double p : {1.8, 2.0, 3.0}) {
    const Params pr = validate_params(p, 0.5 * (p - 1.0), 0.9, 3);
    SolveOptions opts;
    opts.keep_iterates = true;
    const SolveReport rep = solve_monotone(pr, cloud(5), Measure::zero(3), probes(), U0Mode::seeded, opts);
    CHECK(rep.status == SolveStatus::converged);
    CHECK(rep.seed_constant > 0.0);
    CHECK(rep.monotone);
    double top = 0.0;
    for (double v : rep.u.values) top = std::max(top, v);
    CHECK(top > 0.0);
    CHECK(rep.fixed_point_residual() < 2.0 * opts.tol);
    for (std::size_t j = 1; j < rep.iterates.size(); ++j)
      for (std::size_t i = 0; i < rep.iterates[j].size(); ++i)
        CHECK(rep.iterates[j][i] >= rep.iterates[j - 1][i] * (1.0 - 1e-12));
    for (std::size_t j = 2; j < rep.residual_history.size(); ++j)
      CHECK(rep.residual_history[j] <= rep.residual_history[j - 1] * (1.0 + 1e-9));
  }
}

TEST_CASE("scaling sigma scales the solution by lambda^(1/(p-1-q))") {
  const Params pr = validate_params(2.5, 0.7, 0.9, 3);
  const SolveReport base = solve_monotone(pr, cloud(6), Measure::zero(3), probes(), U0Mode::seeded);
  for (double lam : {0.01, 3.0, 250.0}) {
    const SolveReport sc = solve_monotone(pr, cloud(6, 30, lam), Measure::zero(3), probes(), U0Mode::seeded);
    const double f = std::pow(lam, 1.0 / (pr.p - 1.0 - pr.q));
    const auto a = base.values_at_requested();
    const auto b = sc.values_at_requested();
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(b[i] == Approx(f * a[i]).epsilon(2e-6));
  }
}

TEST_CASE("comparison: larger data give larger solutions") {
  const Params pr = validate_params(2.0, 0.5, 1.0, 3);
  const Measure s1 = cloud(7);
  const Measure s2 = cloud(7, 30, 1.5);
  const Measure mu1 = Measure::atomic(3, {Point{0.0, 0.0, 1.0}}, {0.2});
  const Measure mu2 = Measure::atomic(3, {Point{0.0, 0.0, 1.0}}, {0.4});
  const SolveReport a = solve_monotone(pr, s1, mu1, probes(), U0Mode::zero);
  const SolveReport b = solve_monotone(pr, s2, mu2, probes(), U0Mode::zero);
  const auto ua = a.values_at_requested();
  const auto ub = b.values_at_requested();
  for (std::size_t i = 0; i < ua.size(); ++i) CHECK(ua[i] <= ub[i] * (1.0 + 1e-6));
}

TEST_CASE("p = 2: the solution satisfies the Riesz form off the atoms") {
  const Params pr = validate_params(2.0, 0.5, 1.0, 3);
  const Measure sigma = cloud(8);
  const PointSet far({Point{1.5, 0.0, 0.0}, Point{0.0, -2.0, 1.0}, Point{1.0, 1.0, 1.0}});
  SolveOptions opts;
  opts.tol = 1e-10;
  const SolveReport rep = solve_monotone(pr, sigma, Measure::zero(3), far, U0Mode::seeded, opts);
  REQUIRE(rep.status == SolveStatus::converged);
  const auto& at = sigma.atoms();
  std::vector<double> w;
  for (std::size_t i = 0; i < at.points.size(); ++i) w.push_back(at.weights[i] * std::pow(rep.u.values[i], pr.q));
  const Measure nu = Measure::atomic(3, at.points, w);
  const auto u = rep.values_at_requested();
  for (std::size_t k = 0; k < far.size(); ++k)
    CHECK(u[k] == Approx(riesz_potential(2.0, nu, far[k]) / pr.s).epsilon(1e-8));
}

TEST_CASE("classification of solutions, zero and doubled fields") {
  const Params pr = validate_params(2.0, 0.5, 1.0, 3);
  const Measure sigma = cloud(9);
  const Measure mu = Measure::atomic(3, {Point{0.0, 0.0, 0.9}}, {0.3}, 0.05);
  const SolveReport rep = solve_monotone(pr, sigma, mu, probes(), U0Mode::zero);
  REQUIRE(rep.status == SolveStatus::converged);
  const auto cls = classify_sub_super(pr, sigma, mu, rep.u, 1e-6);
  std::size_t sol = 0;
  for (auto c : cls) sol += c == PointClass::solution ? 1 : 0;
  CHECK(static_cast<double>(sol) >= 0.99 * static_cast<double>(cls.size()));

  PotentialField zero = rep.u;
  for (double& v : zero.values) v = 0.0;
  for (auto c : classify_sub_super(pr, sigma, mu, zero, 1e-6)) CHECK(c == PointClass::sub);

  PotentialField twice = rep.u;
  for (double& v : twice.values) v *= 2.0;
  for (auto c : classify_sub_super(pr, sigma, mu, twice, 1e-6)) CHECK(c == PointClass::super);
}

TEST_CASE("divergence ceiling, iteration cap and preconditions") {
  const Params pr = validate_params(2.0, 0.5, 1.0, 3);
  SolveOptions tiny;
  tiny.ceiling_factor = 1e-3;
  CHECK(solve_monotone(pr, cloud(10), Measure::zero(3), probes(), U0Mode::seeded, tiny).status ==
        SolveStatus::diverged_to_infinity);
  SolveOptions one;
  one.max_iter = 1;
  const SolveReport r1 = solve_monotone(pr, cloud(10), Measure::zero(3), probes(), U0Mode::seeded, one);
  CHECK(r1.status == SolveStatus::max_iter);
  CHECK(r1.final_residual() > 0.0);
  SolveOptions bad;
  bad.tol = 0.0;
  CHECK_THROWS_AS(solve_monotone(pr, cloud(10), Measure::zero(3), probes(), U0Mode::zero, bad), InvalidArgument);
  bad = SolveOptions{};
  bad.max_iter = 0;
  CHECK_THROWS_AS(solve_monotone(pr, cloud(10), Measure::zero(3), probes(), U0Mode::zero, bad), InvalidArgument);
  CHECK_THROWS_AS(parse_u0_mode("warm"), InvalidArgument);
}
