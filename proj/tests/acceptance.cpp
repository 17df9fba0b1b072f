// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nlpot/cli/corpus.hpp"
#include "nlpot/exponents.hpp"
#include "nlpot/verify.hpp"
#include "oracles.hpp"

using namespace nlpot;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool pass = true;
  std::string detail;
};

struct Triple {
  double p, q, alpha;
  int n;
  Params params() const { return validate_params(p, q, alpha, n); }
  std::string label() const {
    std::ostringstream os;
    os << "(" << p << "," << q << "," << alpha << "," << n << ")";
    return os.str();
  }
};

const Triple kTriples[] = {{2.0, 0.5, 1.0, 3}, {3.0, 1.0, 1.0, 5}, {2.0, 0.5, 0.75, 3}};
constexpr std::uint64_t kSeed = 7;
constexpr int kCorpusSize = 10;
constexpr double kTol = 1e-6;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double sup(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

Point along(int n, double r) {
  Point x = origin(n);
  x[0] = r;
  return x;
}

Point random_point(std::mt19937_64& rng, int n, double radius) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Point x(static_cast<std::size_t>(n));
  for (double& c : x) c = g(rng);
  const double r = radius * std::pow(u(rng), 1.0 / n) / norm(x);
  for (double& c : x) c *= r;
  return x;
}

Measure random_atomic(std::mt19937_64& rng, int n, int count, double radius, std::optional<double> cell) {
  std::uniform_real_distribution<double> w(0.1, 1.0);
  std::vector<Point> pts;
  std::vector<double> ws;
  for (int k = 0; k < count; ++k) {
    pts.push_back(random_point(rng, n, radius));
    ws.push_back(w(rng) / count);
  }
  return Measure::atomic(n, pts, ws, cell);
}

// Off-atom test points: keep only points at least `gap` from every atom.
Point off_atoms(std::mt19937_64& rng, int n, double radius, const std::vector<const Measure*>& ms, double gap) {
  for (;;) {
    const Point x = random_point(rng, n, radius);
    bool ok = true;
    for (const Measure* m : ms)
      for (const auto& y : m->atoms().points) ok = ok && distance(x, y) >= gap;
    if (ok) return x;
  }
}

// ------------------------------------------------------------- criterion 1

Verdict point_mass_closed_form() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> P(1.3, 4.0), R(0.01, 50.0);
  QuadratureConfig cfg;
  cfg.closed_form_pieces = false;
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const double p = P(rng);
    const int n = 2 + static_cast<int>(rng() % 6);
    const double alpha = std::uniform_real_distribution<double>(0.05, 0.97 * n / p)(rng);
    const Params pr = validate_params(p, 0.5 * (p - 1.0), alpha, n);
    const double r = R(rng);
    const double exact = (p - 1.0) / pr.s * std::pow(r, -pr.s / (p - 1.0));
    // Moving the tail start to 40 r puts [r, 40 r] through the Gauss panels.
    const QuadResult w = wolff_potential_detailed(pr, Measure::atomic(n, {origin(n)}, {1.0}), along(n, r), cfg, 40.0 * r);
    worst = std::max(worst, w.converged ? rel(w.value, exact) : kInf);
  }
  const double t = seconds_since(t0);
  std::ostringstream os;
  os << "max rel error " << worst << " over 20 draws, " << t << " s";
  return {worst <= 1e-8 && t < 1.0, os.str()};
}

// ------------------------------------------------------------- criterion 2

Verdict homogeneity() {
  const Triple tr = kTriples[0];
  const Params pr = tr.params();
  const auto corpus = cli::generate_corpus(tr.n, 5, kSeed);
  const PointSet probes = cli::corpus_probes(tr.n, kSeed);
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> L(-1.5, 1.5);
  double w_err = 0.0, k_err = 0.0, K_err = 0.0, u_err = 0.0;
  for (const auto& e : corpus) {
    const double lam = std::pow(10.0, L(rng));
    const Measure& s = e.measure;
    const Measure ls = scale(s, lam);
    for (const auto& x : probes.points())
      w_err = std::max(w_err, rel(wolff_potential(pr, ls, x), std::pow(lam, pr.delta) * wolff_potential(pr, s, x)));

    const Point x0 = probes[1];
    const double t = 0.5 * (norm(x0) + s.support_radius());
    const PointSet grid = default_candidate_grid(s, x0, t);
    const double k1 = kappa_simplex_ascent(pr, s, x0, t, grid, 200, 3).value;
    const double k2 = kappa_simplex_ascent(pr, ls, x0, t, grid, 200, 3).value;
    k_err = std::max(k_err, rel(k2, std::pow(lam, 1.0 / pr.q) * k1));

    const auto radii = default_radii(s, x0);
    const double K1 = intrinsic_potential(pr, kappa_profile(pr, s, x0, radii, KappaMethod::simplex_ascent));
    const double K2 = intrinsic_potential(pr, kappa_profile(pr, ls, x0, radii, KappaMethod::simplex_ascent));
    K_err = std::max(K_err, rel(K2, std::pow(lam, 1.0 / (pr.p - 1.0 - pr.q)) * K1));

    const SolveReport a = solve_monotone(pr, s, Measure::zero(tr.n), probes, U0Mode::seeded);
    const SolveReport b = solve_monotone(pr, ls, Measure::zero(tr.n), probes, U0Mode::seeded);
    const auto ua = a.values_at_requested(), ub = b.values_at_requested();
    for (std::size_t i = 0; i < ua.size(); ++i)
      u_err = std::max(u_err, rel(ub[i], std::pow(lam, 1.0 / (pr.p - 1.0 - pr.q)) * ua[i]));
  }
  std::ostringstream os;
  os << "5 measures: W " << w_err << " (1e-6), kappa " << k_err << " (1%), K " << K_err << " (2%), solve " << u_err
     << " (2%)";
  return {w_err <= 1e-6 && k_err <= 0.01 && K_err <= 0.02 && u_err <= 0.02, os.str()};
}

// ------------------------------------------------------------- criterion 3

Verdict linear_consistency() {
  std::mt19937_64 rng(303);
  double add = 0.0, ratio = 0.0;
  for (int k = 0; k < 10; ++k) {
    const int n = 3 + static_cast<int>(rng() % 3);
    const double alpha = std::uniform_real_distribution<double>(0.3, 0.95 * n / 2.0)(rng);
    const Params pr = validate_params(2.0, 0.5, alpha, n);
    const Measure a = random_atomic(rng, n, 12, 1.0, std::nullopt);
    const Measure b = random_atomic(rng, n, 12, 1.0, std::nullopt);
    const Measure ab = combine(a, b);
    std::vector<double> r;
    for (int j = 0; j < 5; ++j) {
      const Point x = off_atoms(rng, n, 1.5, {&a, &b}, 0.02);
      const double wa = wolff_potential(pr, a, x);
      add = std::max(add, rel(wolff_potential(pr, ab, x), wa + wolff_potential(pr, b, x)));
      r.push_back(wa / riesz_potential(2.0 * alpha, a, x));
    }
    // The ratio is the same constant at every point, namely 1/s.
    for (double v : r) ratio = std::max(ratio, rel(v, 1.0 / pr.s));
  }
  std::ostringstream os;
  os << "10 measures: additivity " << add << ", Riesz ratio " << ratio << " (1e-6)";
  return {add <= 1e-6 && ratio <= 1e-6, os.str()};
}

// ------------------------------------------------------------- criterion 4

Verdict monotone_iteration() {
  int runs = 0, failures = 0;
  double worst_res = 0.0;
  std::string first_failure;
  for (const auto& tr : kTriples) {
    const Params pr = tr.params();
    const auto corpus = cli::generate_corpus(tr.n, kCorpusSize, kSeed);
    const Measure mu = cli::corpus_mu(tr.n, kSeed);
    const PointSet probes = cli::corpus_probes(tr.n, kSeed);
    const Measure zero = Measure::zero(tr.n);
    for (const auto& e : corpus)
      for (const Measure* m : {&zero, &mu})
        for (U0Mode mode : {U0Mode::seeded, U0Mode::zero}) {
          SolveOptions so;
          so.tol = kTol;
          so.keep_iterates = true;
          const SolveReport rep = solve_monotone(pr, e.measure, *m, probes, mode, so);
          ++runs;
          bool ok = rep.status == SolveStatus::converged;
          // Recorded iterates, then the returned field, are nondecreasing.
          auto path = rep.iterates;
          path.push_back(rep.u.values);
          for (std::size_t j = 1; j < path.size(); ++j)
            for (std::size_t i = 0; i < path[j].size(); ++i)
              ok = ok && path[j][i] >= path[j - 1][i] - 1e-12 * (1.0 + path[j - 1][i]);
          const PotentialField Tu = apply_T(pr, e.measure, *m, rep.u);
          double d = 0.0;
          for (std::size_t i = 0; i < Tu.values.size(); ++i) d = std::max(d, std::abs(Tu.values[i] - rep.u.values[i]));
          const double top = sup(rep.u.values);
          const double res = d == 0.0 ? 0.0 : d / top;
          worst_res = std::max(worst_res, res);
          ok = ok && res < 2.0 * kTol;
          if (m == &zero && mode == U0Mode::seeded) ok = ok && top > 0.0;
          if (m == &zero && mode == U0Mode::zero) ok = ok && top == 0.0;
          if (!ok) {
            ++failures;
            if (first_failure.empty())
              first_failure = tr.label() + " " + e.name + (m == &zero ? " mu=0 " : " mu ") + std::string(to_string(mode));
          }
        }
  }
  std::ostringstream os;
  os << runs << " runs, " << failures << " failures, max residual " << worst_res << " (< " << 2.0 * kTol << ")";
  if (!first_failure.empty()) os << "; first failure " << first_failure;
  return {failures == 0, os.str()};
}

// ------------------------------------------------------------- criterion 5

// Kappa profiles at the corpus probes, shared by criteria 5 and 7.
struct ProfileSet {
  std::vector<KappaProfile> coarse, fine;
};

std::map<std::pair<int, int>, ProfileSet> g_profiles;  // (triple index, corpus index)

const ProfileSet& profiles_for(int ti, int ci, const Params& pr, const Measure& sigma, const PointSet& probes,
                               bool want_fine) {
  ProfileSet& ps = g_profiles[{ti, ci}];
  const QuadratureConfig cfg;
  if (ps.coarse.empty())
    for (const auto& x : probes.points())
      ps.coarse.push_back(kappa_profile(pr, sigma, x, default_radii(sigma, x, 12), KappaMethod::simplex_ascent,
                                        GridOptions{}, cfg));
  if (want_fine && ps.fine.empty())
    for (const auto& x : probes.points())
      ps.fine.push_back(kappa_profile(pr, sigma, x, default_radii(sigma, x, 24), KappaMethod::simplex_ascent,
                                      GridOptions{}.refined(), cfg.refined()));
  return ps;
}

Verdict sandwich_stability() {
  bool pass = true;
  std::ostringstream os;
  for (int ti = 0; ti < 3; ++ti) {
    const auto t0 = Clock::now();
    const Triple tr = kTriples[ti];
    const Params pr = tr.params();
    const auto corpus = cli::generate_corpus(tr.n, kCorpusSize, kSeed);
    const Measure mu = cli::corpus_mu(tr.n, kSeed);
    const PointSet probes = cli::corpus_probes(tr.n, kSeed);
    const QuadratureConfig cfg;
    double c1 = kInf, c2 = 0.0, f1 = kInf, f2 = 0.0;
    bool defined = true;
    for (int ci = 0; ci < kCorpusSize; ++ci) {
      const Measure& sigma = corpus[static_cast<std::size_t>(ci)].measure;
      const ProfileSet& ps = profiles_for(ti, ci, pr, sigma, probes, true);
      for (const Measure& m : {Measure::zero(tr.n), mu}) {
        const SolveReport rep = solve_monotone(pr, sigma, m, probes, U0Mode::seeded);
        const PotentialField u = requested_field(rep, probes);
        const BilateralReport a = verify_sandwich(u, bound_field(pr, sigma, m, probes, ps.coarse, cfg));
        const BilateralReport b = verify_sandwich(u, bound_field(pr, sigma, m, probes, ps.fine, cfg.refined()));
        defined = defined && rep.status == SolveStatus::converged && std::isfinite(a.c1_emp) && std::isfinite(b.c1_emp);
        c1 = std::min(c1, a.c1_emp);
        c2 = std::max(c2, a.c2_emp);
        f1 = std::min(f1, b.c1_emp);
        f2 = std::max(f2, b.c2_emp);
      }
    }
    const double t = seconds_since(t0);
    const bool ok = defined && c2 / c1 <= 100.0 && rel(f1, c1) < 0.2 && rel(f2, c2) < 0.2 && t <= 600.0;
    pass = pass && ok;
    os << (ti ? "; " : "") << tr.label() << " c1 " << c1 << " c2 " << c2 << " ratio " << c2 / c1 << " drift "
       << std::max(rel(f1, c1), rel(f2, c2)) << " " << static_cast<int>(t) << " s";
  }
  return {pass, os.str()};
}

// ------------------------------------------------------------- criterion 6

Verdict nested_ratio_audit() {
  bool pass = true;
  std::ostringstream os;
  for (int ti = 0; ti < 3; ++ti) {
    const Triple tr = kTriples[ti];
    const Params pr = tr.params();
    std::mt19937_64 rng(600 + static_cast<std::uint64_t>(ti));
    const QuadratureConfig cfg;
    const AscentOptions asc;
    double coarse = 0.0, fine = 0.0;
    bool finite = true;
    for (int k = 0; k < 100; ++k) {
      const int atoms = 4 + static_cast<int>(rng() % 9);
      const Measure sigma = random_atomic(rng, tr.n, atoms, 0.8, 0.04);
      const Measure nu = random_atomic(rng, tr.n, 1 + static_cast<int>(rng() % 4), 1.5, std::nullopt);
      const Point x = off_atoms(rng, tr.n, 1.5, {&sigma, &nu}, 0.05);
      const double Kc = intrinsic_potential(
          pr, kappa_profile(pr, sigma, x, default_radii(sigma, x, 8), KappaMethod::simplex_ascent, GridOptions{}, cfg, asc), cfg);
      const double Kf = intrinsic_potential(
          pr, kappa_profile(pr, sigma, x, default_radii(sigma, x, 16), KappaMethod::simplex_ascent, GridOptions{}.refined(),
                            cfg.refined(), asc),
          cfg.refined());
      const double rc = nested_potential_ratio(pr, sigma, nu, x, Kc, cfg);
      const double rf = nested_potential_ratio(pr, sigma, nu, x, Kf, cfg.refined());
      finite = finite && std::isfinite(rc) && std::isfinite(rf);
      coarse = std::max(coarse, rc);
      fine = std::max(fine, rf);
    }
    const bool ok = finite && rel(fine, coarse) < 0.1;
    pass = pass && ok;
    os << (ti ? "; " : "") << tr.label() << " max " << coarse << " refined " << fine << " drift " << rel(fine, coarse);
  }
  return {pass, os.str()};
}

// ------------------------------------------------------------- criterion 7

enum class FieldKind { sub, super, other };

FieldKind kind_of(const std::vector<PointClass>& cls) {
  bool sub = false, super = false, other = false;
  for (PointClass c : cls) {
    sub = sub || c == PointClass::sub;
    super = super || c == PointClass::super;
    other = other || c == PointClass::neither;
  }
  if (other || (sub && super)) return FieldKind::other;
  if (sub) return FieldKind::sub;
  if (super) return FieldKind::super;
  return FieldKind::other;
}

Verdict ordering() {
  bool pass = true;
  std::ostringstream os;
  for (int ti = 0; ti < 3; ++ti) {
    const Triple tr = kTriples[ti];
    const Params pr = tr.params();
    const auto corpus = cli::generate_corpus(tr.n, kCorpusSize, kSeed);
    const PointSet probes = cli::corpus_probes(tr.n, kSeed);
    const Measure zero = Measure::zero(tr.n);
    int subs = 0, supers = 0, sub_bad = 0;
    std::vector<double> cs;
    for (int ci = 0; ci < kCorpusSize; ++ci) {
      const Measure& sigma = corpus[static_cast<std::size_t>(ci)].measure;
      SolveOptions so;
      so.tol = kTol;
      so.keep_iterates = true;
      const SolveReport rep = solve_monotone(pr, sigma, zero, probes, U0Mode::seeded, so);
      const ProfileSet& ps = profiles_for(ti, ci, pr, sigma, probes, false);
      const BoundField R0 = bound_field(pr, sigma, zero, probes, ps.coarse);

      std::vector<std::vector<double>> fields;
      for (std::size_t j = 0; j < std::min<std::size_t>(rep.iterates.size(), 3); ++j) fields.push_back(rep.iterates[j]);
      for (double f : {0.25, 0.5, 0.9, 1.1, 2.0, 4.0}) {
        auto v = rep.u.values;
        for (double& x : v) x *= f;
        fields.push_back(v);
      }
      // Candidates that do not depend on the field.
      const double T = sigma.support_radius();
      const PhiReport phi_fixed = phi_sup(pr, sigma, probes, default_phi_family(sigma, probes, {0.5 * T, T}));
      double c_measure = kInf;
      for (const auto& values : fields) {
        SolveReport fr = rep;
        fr.u.values = values;
        const FieldKind kind = kind_of(classify_sub_super(pr, sigma, zero, fr.u, kTol));
        const PotentialField u = requested_field(fr, probes);
        if (kind == FieldKind::sub) {
          ++subs;
          const PhiReport own = phi_sup(pr, sigma, probes, {solution_measure(pr, sigma, fr)});
          for (std::size_t i = 0; i < probes.size(); ++i) {
            const double phi = std::max(std::isnan(own.phi_values[i]) ? 0.0 : own.phi_values[i],
                                        std::isnan(phi_fixed.phi_values[i]) ? 0.0 : phi_fixed.phi_values[i]);
            if (!(u.values[i] <= phi + 2.0 * kTol * std::max(1.0, phi))) ++sub_bad;
          }
        } else if (kind == FieldKind::super && sup(values) > 0.0) {
          ++supers;
          for (std::size_t i = 0; i < probes.size(); ++i) {
            const double r = R0.terms[i].w_sigma_gamma + R0.terms[i].K;
            if (r > 0.0) c_measure = std::min(c_measure, u.values[i] / r);
          }
        }
      }
      if (std::isfinite(c_measure)) cs.push_back(c_measure);
    }
    // The corpus constant is the smallest per-measure constant; its
    // variation is taken over leave-one-out subcorpora.
    const double cmin = *std::min_element(cs.begin(), cs.end());
    const double cmax = *std::max_element(cs.begin(), cs.end());
    double lo = kInf, hi = 0.0;
    for (std::size_t k = 0; k < cs.size(); ++k) {
      double c = kInf;
      for (std::size_t j = 0; j < cs.size(); ++j)
        if (j != k) c = std::min(c, cs[j]);
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    const double variation = (hi - lo) / hi;
    const bool ok = subs > 0 && supers > 0 && sub_bad == 0 && cs.size() == static_cast<std::size_t>(kCorpusSize) &&
                    cmin > 0.0 && variation < 0.2;
    pass = pass && ok;
    os << (ti ? "; " : "") << tr.label() << " sub " << subs << " (violations " << sub_bad << "), super " << supers
       << ", c " << cmin << " leave-one-out variation " << variation << " (per-measure range " << cmin << ".." << cmax
       << ")";
  }
  return {pass, os.str()};
}

// ------------------------------------------------------------- criterion 8

Verdict existence_table() {
  struct Row {
    std::string name;
    Params pr;
    GrowthProfile sigma, mu;
    PowerLogGrowth kappa;
    Existence expect;
  };
  const Params pr = validate_params(2.0, 0.5, 1.0, 5);  // s = 3, kexp = 1/2
  const double s = pr.s;
  const double ka = s / pr.kexp;                         // critical kappa growth exponent
  const GrowthProfile fin = FiniteMassGrowth{1.0};
  const PowerLogGrowth flat{1.0, 0.0, 0.0};
  auto pw = [](double d) { return GrowthProfile{PowerLogGrowth{1.0, d, 0.0}}; };
  const std::vector<Row> rows = {
      {"sigma sub-critical", pr, pw(s - 0.5), fin, flat, Existence::exists},
      {"sigma critical", pr, pw(s), fin, flat, Existence::not_exists},
      {"sigma super-critical", pr, pw(s + 0.5), fin, flat, Existence::not_exists},
      {"kappa sub-critical", pr, fin, fin, {1.0, ka - 0.5, 0.0}, Existence::exists},
      {"kappa critical", pr, fin, fin, {1.0, ka, 0.0}, Existence::not_exists},
      {"kappa super-critical", pr, fin, fin, {1.0, ka + 0.5, 0.0}, Existence::not_exists},
      {"mu sub-critical", pr, fin, pw(s - 0.5), flat, Existence::exists},
      {"mu critical", pr, fin, pw(s), flat, Existence::not_exists},
      {"mu super-critical", pr, fin, pw(s + 0.5), flat, Existence::not_exists},
      {"p-Laplace n < p", validate_params(3.0, 1.0, 1.0, 2, Preset::p_laplace), fin, fin, flat, Existence::not_exists},
      {"p-Laplace n = p", validate_params(3.0, 1.0, 1.0, 3, Preset::p_laplace), fin, fin, flat, Existence::not_exists},
      {"p-Laplace n > p", validate_params(3.0, 1.0, 1.0, 4, Preset::p_laplace), fin, fin, flat, Existence::exists},
  };
  int wrong = 0;
  std::string names;
  for (const auto& r : rows)
    if (existence_check(r.pr, r.sigma, r.mu, r.kappa).verdict != r.expect) {
      ++wrong;
      names += " " + r.name;
    }
  std::ostringstream os;
  os << rows.size() << " profiles, " << wrong << " misclassified" << names;
  return {wrong == 0, os.str()};
}

// ------------------------------------------------------------- criterion 9

Verdict phi_scaling() {
  using R = oracle::Rational;
  std::mt19937_64 rng(909);
  int symbolic_bad = 0;
  for (int k = 0; k < 50; ++k) {
    // Random rational p > 1 and 0 < q < p - 1.
    const R p = R(1) + R(1 + static_cast<std::int64_t>(rng() % 40), 1 + static_cast<std::int64_t>(rng() % 12));
    const R q = (p - R(1)) * R(1 + static_cast<std::int64_t>(rng() % 9), 10);
    if (!(exponents::phi_nu_scaling(p, q) == R(0))) ++symbolic_bad;
  }
  double worst = 0.0;
  std::uniform_real_distribution<double> L(-3.0, 3.0);
  for (const auto& tr : kTriples) {
    const Params pr = tr.params();
    const auto corpus = cli::generate_corpus(tr.n, 4, kSeed);
    for (const auto& e : corpus)
      for (int j = 0; j < 3; ++j) {
        const Measure nu = random_atomic(rng, tr.n, 1 + static_cast<int>(rng() % 5), 1.5, std::nullopt);
        const Point x = off_atoms(rng, tr.n, 2.0, {&nu}, 0.05);
        const double lam = std::pow(10.0, L(rng));
        worst = std::max(worst, rel(phi_nu(pr, e.measure, scale(nu, lam), x), phi_nu(pr, e.measure, nu, x)));
      }
  }
  std::ostringstream os;
  os << "symbolic exponent nonzero in " << symbolic_bad << " of 50 rational draws; numeric max rel change " << worst
     << " over 36 draws (1e-6)";
  return {symbolic_bad == 0 && worst <= 1e-6, os.str()};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> only;
  app.add_option("--only", only, "run only these criteria");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<int, std::function<Verdict()>>> criteria = {
      {1, point_mass_closed_form}, {2, homogeneity},        {3, linear_consistency},
      {4, monotone_iteration},     {5, sandwich_stability}, {6, nested_ratio_audit},
      {7, ordering},               {8, existence_table},    {9, phi_scaling},
  };
  bool all = true;
  for (const auto& [id, fn] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    all = all && v.pass;
    std::printf("criterion %d %s [%.1f s] %s\n", id, v.pass ? "PASS" : "FAIL", seconds_since(t0), v.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
