#include "nlpot/cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "nlpot/cli/io.hpp"
#include "nlpot/error.hpp"
#include "nlpot/verify.hpp"

namespace nlpot::cli {

namespace {

namespace fs = std::filesystem;

// Numerical trouble that still produced output; reported, exit code 3.
struct Diagnostics {
  std::vector<std::string> messages;
  void add(std::string m) { messages.push_back(std::move(m)); }
  int code() const { return messages.empty() ? kExitOk : kExitNumerical; }
};

std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

void report(std::ostream& err, const char* level, int code, const char* kind, const std::string& msg) {
  err << "nlpot " << level << " code=" << code << " kind=" << kind << " message=\"" << one_line(msg) << "\"\n";
}

struct Common {
  std::string params;
  std::string out;
  std::uint64_t seed = 0;
  double rel_tol = 0.0;
  int panels = 0;
};

void add_common(CLI::App* sub, Common& c, bool needs_params) {
  if (needs_params) sub->add_option("--params", c.params, "p=..,q=..,alpha=..,n=..[,preset=..]")->required();
  sub->add_option("--out", c.out, "output path, - for stdout")->required();
  sub->add_option("--seed", c.seed, "seed recorded in the output header");
  sub->add_option("--rel-tol", c.rel_tol, "quadrature relative tolerance (overrides NLPOT_REL_TOL)");
  sub->add_option("--panels-per-decade", c.panels, "quadrature panels per decade (overrides NLPOT_PANELS_PER_DECADE)");
}

QuadratureConfig quadrature(const Common& c) {
  QuadratureConfig cfg = quadrature_from_env();
  if (c.rel_tol != 0.0) cfg.rel_tol = c.rel_tol;
  if (c.panels != 0) cfg.panels_per_decade = c.panels;
  try {
    cfg.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

json quad_json(const QuadratureConfig& q) { return {{"rel_tol", q.rel_tol}, {"panels_per_decade", q.panels_per_decade}}; }

json params_json(const Params& pr) {
  return {{"p", pr.p}, {"q", pr.q}, {"alpha", pr.alpha}, {"n", pr.n}, {"preset", std::string(to_string(pr.preset))}};
}

Params params_from_json(const json& j) {
  try {
    return validate_params(j.at("p").get<double>(), j.at("q").get<double>(), j.at("alpha").get<double>(),
                           j.at("n").get<int>(), parse_preset(j.at("preset").get<std::string>()));
  } catch (const json::exception& e) {
    throw UsageError(std::string("bad params record: ") + e.what());
  }
}

bool same_params(const Params& a, const Params& b) {
  auto close = [](double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(x)); };
  return close(a.p, b.p) && close(a.q, b.q) && close(a.alpha, b.alpha) && a.n == b.n;
}

std::string coord_columns(int n) {
  std::string s;
  for (int i = 1; i <= n; ++i) s += (i > 1 ? ",x" : "x") + std::to_string(i);
  return s;
}

std::string coords(const Point& x) {
  std::string s;
  for (std::size_t i = 0; i < x.size(); ++i) s += (i ? "," : "") + fmt(x[i]);
  return s;
}

Point row_point(const CsvTable& t, const std::vector<std::string>& row, int n) {
  Point x;
  for (int i = 1; i <= n; ++i) x.push_back(parse_double(row[t.column("x" + std::to_string(i))]));
  return x;
}

Measure optional_measure(const std::string& path, int n) {
  return path.empty() ? Measure::zero(n) : read_measure(path, n);
}

// ---------------------------------------------------------------- potential

struct PotentialOpts {
  Common c;
  std::string measure, points;
};

int cmd_potential(const PotentialOpts& o, std::ostream& err) {
  const Params pr = parse_params(o.c.params);
  const Measure m = read_measure(o.measure, pr.n);
  const PointSet pts = read_points(o.points, pr.n);
  const QuadratureConfig cfg = QuadratureConfig::for_measure(m, quadrature(o.c));
  Provenance prov{"potential", o.c.seed,
                  {{"params", params_json(pr)}, {"measure", o.measure}, {"points", o.points}, {"quadrature", quad_json(cfg)},
                   {"t_min", cfg.t_min()}}};
  std::ostringstream os;
  os << prov.csv_header() << coord_columns(pr.n) << ",value,trunc_t_min\n";
  Diagnostics diag;
  for (const auto& x : pts.points()) {
    const QuadResult r = wolff_potential_detailed(pr, m, x, cfg);
    if (!r.converged) diag.add("quadrature missed rel_tol at " + coords(x));
    os << coords(x) << ',' << fmt(r.value) << ',' << fmt(cfg.t_min()) << '\n';
  }
  write_text(o.c.out, os.str());
  for (const auto& d : diag.messages) report(err, "warning", kExitNumerical, "numerical", d);
  return diag.code();
}

// ---------------------------------------------------------------- riesz

struct RieszOpts {
  Common c;
  double beta = 2.0;
  std::string measure, points;
};

int cmd_riesz(const RieszOpts& o) {
  const Measure m = read_measure(o.measure);
  const PointSet pts = read_points(o.points, m.dim());
  const QuadratureConfig cfg = quadrature(o.c);
  Provenance prov{"riesz", o.c.seed,
                  {{"beta", o.beta}, {"n", m.dim()}, {"measure", o.measure}, {"points", o.points}, {"quadrature", quad_json(cfg)}}};
  std::ostringstream os;
  os << prov.csv_header() << coord_columns(m.dim()) << ",value\n";
  for (const auto& x : pts.points()) os << coords(x) << ',' << fmt(riesz_potential(o.beta, m, x, cfg)) << '\n';
  write_text(o.c.out, os.str());
  return kExitOk;
}

// ---------------------------------------------------------------- kappa

struct KappaOpts {
  Common c;
  std::string sigma, points, radii = "auto", method = "ascent";
  std::vector<std::string> centers;
  int iters = 200, restarts = 3, grid_levels = 4, grid_directions = 2;
};

std::vector<double> parse_radii(const std::string& spec, const Measure& sigma, const Point& x) {
  if (spec == "auto") return default_radii(sigma, x);
  if (spec.rfind("auto:", 0) == 0) return default_radii(sigma, x, static_cast<int>(parse_double(spec.substr(5))));
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ':')) parts.push_back(tok);
  if (parts.size() != 3) throw UsageError("--radii expects a:b:k or auto[:k], got '" + spec + "'");
  const double a = parse_double(parts[0]), b = parse_double(parts[1]);
  const int k = static_cast<int>(parse_double(parts[2]));
  if (!(a > 0.0) || !(b > a) || k < 2) throw UsageError("--radii a:b:k needs 0 < a < b and k >= 2");
  std::vector<double> r;
  for (int i = 0; i < k; ++i) r.push_back(a * std::pow(b / a, static_cast<double>(i) / (k - 1)));
  r.back() = b;
  return r;
}

int cmd_kappa(const KappaOpts& o, std::ostream& err) {
  const Params pr = parse_params(o.c.params);
  const Measure sigma = read_measure(o.sigma, pr.n);
  std::vector<Point> centers;
  for (const auto& s : o.centers) centers.push_back(parse_point(s));
  if (!o.points.empty()) {
    const PointSet extra = read_points(o.points, pr.n);
    centers.insert(centers.end(), extra.points().begin(), extra.points().end());
  }
  if (centers.empty()) throw UsageError("kappa: give --center or --points");
  for (const auto& x : centers)
    if (static_cast<int>(x.size()) != pr.n) throw UsageError("dimension mismatch: centre " + coords(x));
  const KappaMethod method = parse_method(o.method);
  if (o.iters < 1 || o.restarts < 1) throw UsageError("--iters and --restarts must be >= 1");
  const QuadratureConfig cfg = QuadratureConfig::for_measure(sigma, quadrature(o.c));
  GridOptions grid;
  grid.shell_levels = o.grid_levels;
  grid.directions_per_dim = o.grid_directions;
  AscentOptions asc;
  asc.iters = o.iters;
  asc.restarts = o.restarts;

  json sat = json::array(), zb = json::array(), cj = json::array();
  std::ostringstream body;
  Diagnostics diag;
  for (std::size_t c = 0; c < centers.size(); ++c) {
    const KappaProfile prof = kappa_profile(pr, sigma, centers[c], parse_radii(o.radii, sigma, centers[c]), method, grid, cfg, asc);
    cj.push_back(centers[c]);
    sat.push_back(prof.saturation_radius);
    zb.push_back(prof.zero_below);
    if (!prof.saturated()) diag.add("profile at " + coords(centers[c]) + " stops below the saturation radius");
    for (std::size_t i = 0; i < prof.radii.size(); ++i) {
      const KappaEstimate& e = prof.estimates[i];
      body << c << ',' << fmt(prof.radii[i]) << ',' << fmt(e.value) << ',' << to_string(e.direction) << ','
           << to_string(e.method) << ',' << e.iterations << '\n';
    }
  }
  Provenance prov{"kappa", o.c.seed,
                  {{"params", params_json(pr)}, {"sigma", o.sigma}, {"centers", cj}, {"saturation_radius", sat},
                   {"zero_below", zb}, {"radii", o.radii}, {"method", o.method}, {"iters", o.iters},
                   {"restarts", o.restarts}, {"grid_levels", o.grid_levels}, {"grid_directions", o.grid_directions},
                   {"quadrature", quad_json(cfg)}}};
  write_text(o.c.out, prov.csv_header() + "center,radius,value,direction,method,iterations\n" + body.str());
  for (const auto& d : diag.messages) report(err, "warning", kExitNumerical, "numerical", d);
  return diag.code();
}

/// Profiles stored by the kappa command, one per centre.
std::vector<KappaProfile> read_kappa(const std::string& path, const Params& expect) {
  const CsvTable t = read_csv(path);
  const json& cfg = t.config;
  if (!cfg.contains("params") || !cfg.contains("centers")) throw UsageError(path + ": not a kappa profile file");
  if (!same_params(params_from_json(cfg.at("params")), expect))
    throw UsageError(path + ": kappa profile was computed for different parameters");
  std::vector<KappaProfile> out;
  try {
    for (std::size_t c = 0; c < cfg.at("centers").size(); ++c) {
      KappaProfile p;
      p.center = cfg.at("centers").at(c).get<Point>();
      p.saturation_radius = cfg.at("saturation_radius").at(c).get<double>();
      p.zero_below = cfg.at("zero_below").at(c).get<double>();
      out.push_back(std::move(p));
    }
  } catch (const json::exception& e) {
    throw UsageError(path + ": bad kappa header: " + e.what());
  }
  for (const auto& row : t.rows) {
    const auto c = static_cast<std::size_t>(parse_double(row[t.column("center")]));
    if (c >= out.size()) throw UsageError(path + ": centre index out of range");
    KappaEstimate e;
    e.value = parse_double(row[t.column("value")]);
    e.direction = parse_direction(row[t.column("direction")]);
    e.method = parse_method(row[t.column("method")]);
    e.iterations = static_cast<int>(parse_double(row[t.column("iterations")]));
    out[c].radii.push_back(parse_double(row[t.column("radius")]));
    out[c].estimates.push_back(e);
  }
  return out;
}

// ---------------------------------------------------------------- intrinsic

struct IntrinsicOpts {
  Common c;
  std::string kappa;
};

int cmd_intrinsic(const IntrinsicOpts& o, std::ostream& err) {
  const Params pr = parse_params(o.c.params);
  const QuadratureConfig cfg = quadrature(o.c);
  const auto profiles = read_kappa(o.kappa, pr);
  Provenance prov{"intrinsic", o.c.seed, {{"params", params_json(pr)}, {"kappa", o.kappa}, {"quadrature", quad_json(cfg)}}};
  std::ostringstream os;
  os << prov.csv_header() << coord_columns(pr.n) << ",value,direction,small_t_exponent,clamped\n";
  Diagnostics diag;
  for (const auto& prof : profiles) {
    const IntrinsicResult r = intrinsic_potential_detailed(pr, prof, cfg);
    for (const auto& d : r.diagnostics) report(err, "warning", kExitOk, "extrapolation", coords(prof.center) + ": " + d);
    if (!std::isfinite(r.value)) diag.add("intrinsic potential is infinite at " + coords(prof.center));
    os << coords(prof.center) << ',' << fmt(r.value) << ',' << to_string(r.direction) << ','
       << fmt(r.small_t_exponent) << ',' << (r.clamped ? 1 : 0) << '\n';
  }
  write_text(o.c.out, os.str());
  for (const auto& d : diag.messages) report(err, "warning", kExitNumerical, "numerical", d);
  return diag.code();
}

// ---------------------------------------------------------------- solve

struct SolveOpts {
  Common c;
  std::string sigma, mu, points, u0 = "seeded", sidecar;
  double tol = 0.0;
  int max_iter = 500;
  double ceiling = 1e12;
  bool keep_iterates = false;
};

int cmd_solve(const SolveOpts& o, std::ostream& err) {
  const Params pr = parse_params(o.c.params);
  const Measure sigma = optional_measure(o.sigma, pr.n);
  const Measure mu = optional_measure(o.mu, pr.n);
  const PointSet pts = read_points(o.points, pr.n);
  const QuadratureConfig cfg = quadrature(o.c);
  SolveOptions so;
  so.tol = o.tol != 0.0 ? o.tol : solve_tol_from_env();
  so.max_iter = o.max_iter;
  so.ceiling_factor = o.ceiling;
  so.keep_iterates = o.keep_iterates;
  if (!(so.tol > 0.0) || so.max_iter < 1 || !(so.ceiling_factor > 0.0))
    throw UsageError("solve: need --tol > 0, --max-iter >= 1 and --ceiling > 0");
  const U0Mode mode = parse_u0_mode(o.u0);
  const SolveReport rep = solve_monotone(pr, sigma, mu, pts, mode, so, cfg);

  std::vector<std::string> role(rep.u.values.size());
  for (std::size_t i = 0; i < rep.sigma_atoms; ++i) role[i] = "sigma";
  for (std::size_t k : rep.eval_index) role[k] = role[k].empty() ? "eval" : "sigma+eval";

  json config{{"params", params_json(pr)}, {"sigma", o.sigma}, {"mu", o.mu}, {"points", o.points},
              {"u0", o.u0}, {"tol", so.tol}, {"max_iter", so.max_iter}, {"ceiling", so.ceiling_factor},
              {"quadrature", quad_json(cfg)}};
  Provenance prov{"solve", o.c.seed, config};
  std::ostringstream os;
  os << prov.csv_header() << coord_columns(pr.n) << ",u,residual,role\n";
  for (std::size_t i = 0; i < rep.u.values.size(); ++i)
    os << coords(rep.u.eval_points[i]) << ',' << fmt(rep.u.values[i]) << ',' << fmt(rep.pointwise_residual[i]) << ','
       << role[i] << '\n';
  write_text(o.c.out, os.str());

  json side = prov.to_json();
  side["status"] = std::string(to_string(rep.status));
  side["iterations"] = rep.iterations;
  side["residual_history"] = rep.residual_history;
  side["fixed_point_residual"] = rep.fixed_point_residual();
  side["u0_mode"] = std::string(to_string(rep.u0_mode));
  side["seed_constant"] = rep.seed_constant;
  side["monotone"] = rep.monotone;
  side["sigma_atoms"] = rep.sigma_atoms;
  side["eval_index"] = rep.eval_index;
  side["note"] = rep.note;
  if (o.keep_iterates) side["iterates"] = rep.iterates;
  const std::string side_path = !o.sidecar.empty() ? o.sidecar : (o.c.out == "-" ? "" : o.c.out + ".json");
  if (!side_path.empty()) write_text(side_path, side.dump(2) + "\n");

  if (rep.status != SolveStatus::converged) {
    report(err, "warning", kExitNumerical, "numerical",
           std::string("solve ended with status ") + std::string(to_string(rep.status)) +
               " after " + std::to_string(rep.iterations) + " iterations" + (rep.note.empty() ? "" : ": " + rep.note));
    return kExitNumerical;
  }
  return kExitOk;
}

struct LoadedSolve {
  SolveReport rep;
  PointSet requested;
  double tol = 1e-6;
};

LoadedSolve read_solve(const std::string& csv_path, const std::string& meta_path, const Params& pr,
                       const Measure& sigma) {
  const CsvTable t = read_csv(csv_path);
  const json meta = read_json(meta_path);
  LoadedSolve ls;
  try {
    if (!same_params(params_from_json(meta.at("config").at("params")), pr))
      throw UsageError(csv_path + ": solve report was computed for different parameters");
    ls.tol = meta.at("config").at("tol").get<double>();
    ls.rep.status = meta.at("status") == "converged"  ? SolveStatus::converged
                    : meta.at("status") == "max_iter" ? SolveStatus::max_iter
                                                      : SolveStatus::diverged_to_infinity;
    ls.rep.iterations = meta.at("iterations").get<int>();
    for (const auto& v : meta.at("residual_history")) ls.rep.residual_history.push_back(v.is_null() ? kInf : v.get<double>());
    ls.rep.u0_mode = parse_u0_mode(meta.at("u0_mode").get<std::string>());
    ls.rep.seed_constant = meta.at("seed_constant").get<double>();
    ls.rep.monotone = meta.at("monotone").get<bool>();
    ls.rep.sigma_atoms = meta.at("sigma_atoms").get<std::size_t>();
    ls.rep.eval_index = meta.at("eval_index").get<std::vector<std::size_t>>();
  } catch (const json::exception& e) {
    throw UsageError(meta_path + ": bad solve sidecar: " + e.what());
  }
  std::vector<Point> pts;
  for (const auto& row : t.rows) {
    pts.push_back(row_point(t, row, pr.n));
    ls.rep.u.values.push_back(parse_double(row[t.column("u")]));
    ls.rep.pointwise_residual.push_back(parse_double(row[t.column("residual")]));
  }
  ls.rep.u.params = pr;
  ls.rep.u.eval_points = PointSet(pts, "coupled");
  std::vector<Point> req;
  for (std::size_t k : ls.rep.eval_index) {
    if (k >= pts.size()) throw UsageError(meta_path + ": eval_index out of range");
    req.push_back(pts[k]);
  }
  ls.requested = PointSet(req, "points");
  if (!(coupled_points(sigma, ls.requested) == ls.rep.u.eval_points))
    throw UsageError(csv_path + ": solve report does not match the given sigma");
  return ls;
}

// ---------------------------------------------------------------- verify

struct VerifyOpts {
  Common c;
  std::string sigma, mu, solve, solve_meta, kappa, method = "ascent";
  int radii = 12;
  bool refine = false;
  double window_lo = 1e-3, window_hi = 1e3, refine_tol = 0.2;
};

struct Check {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string note;
};

json check_json(const Check& c) {
  return {{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"threshold", c.threshold}, {"note", c.note}};
}

double rel_delta(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), 1e-300); }

int cmd_verify(const VerifyOpts& o) {
  const Params pr = parse_params(o.c.params);
  const Measure sigma = optional_measure(o.sigma, pr.n);
  const Measure mu = optional_measure(o.mu, pr.n);
  const QuadratureConfig cfg = quadrature(o.c);
  const LoadedSolve ls = read_solve(o.solve, o.solve_meta.empty() ? o.solve + ".json" : o.solve_meta, pr, sigma);
  const SolveReport& rep = ls.rep;
  const PointSet& req = ls.requested;
  std::vector<Check> checks;

  checks.push_back({"solve_converged", rep.status == SolveStatus::converged, static_cast<double>(rep.iterations), 0.0,
                    std::string(to_string(rep.status))});
  checks.push_back({"monotone_iterates", rep.monotone, rep.monotone ? 1.0 : 0.0, 1.0, ""});

  const PotentialField Tu = apply_T(pr, sigma, mu, rep.u, cfg);
  double diff = 0.0, top = 0.0;
  for (std::size_t i = 0; i < Tu.values.size(); ++i) {
    const double a = rep.u.values[i], b = Tu.values[i];
    if (std::isinf(a) && std::isinf(b)) continue;
    diff = std::max(diff, std::isfinite(a - b) ? std::abs(a - b) : kInf);
    top = std::max(top, a);
  }
  const double fpr = diff == 0.0 ? 0.0 : diff / std::max(top, 1e-300);
  checks.push_back({"fixed_point_residual", fpr < 2.0 * ls.tol, fpr, 2.0 * ls.tol, "sup|Tu-u|/sup u"});

  const auto cls = classify_sub_super(pr, sigma, mu, rep.u, ls.tol, cfg);
  std::size_t finite = 0, solved = 0;
  for (std::size_t i = 0; i < cls.size(); ++i) {
    if (std::isinf(rep.u.values[i]) && std::isinf(Tu.values[i])) continue;
    ++finite;
    solved += cls[i] == PointClass::solution ? 1 : 0;
  }
  const double frac = finite == 0 ? 1.0 : static_cast<double>(solved) / static_cast<double>(finite);
  checks.push_back({"solution_classification", frac >= 0.99, frac, 0.99, "fraction classified solution"});

  // Bilateral bound on the requested points.
  BoundOptions bo;
  bo.method = parse_method(o.method);
  bo.radii = o.radii;
  BoundField bound;
  if (!o.kappa.empty()) {
    auto profiles = read_kappa(o.kappa, pr);
    std::vector<KappaProfile> ordered;
    for (const auto& x : req.points()) {
      auto it = std::find_if(profiles.begin(), profiles.end(), [&](const KappaProfile& p) { return p.center == x; });
      if (it == profiles.end()) throw UsageError(o.kappa + ": no kappa profile centred at " + coords(x));
      ordered.push_back(*it);
    }
    bound = bound_field(pr, sigma, mu, req, ordered, cfg);
  } else {
    bound = bound_field(pr, sigma, mu, req, bo, cfg);
  }
  const PotentialField u_req = requested_field(rep, req);
  const BilateralReport br = verify_sandwich(u_req, bound, {o.window_lo, o.window_hi});
  const bool trivial = std::all_of(u_req.values.begin(), u_req.values.end(), [](double v) { return v == 0.0; }) &&
                       std::all_of(bound.R.values.begin(), bound.R.values.end(), [](double v) { return v == 0.0; });
  {
    Check c{"sandwich", false, br.c2_emp / br.c1_emp, 0.0, ""};
    if (trivial) {
      c.pass = true;
      c.value = 1.0;
      c.note = "u and R vanish";
    } else {
      // u and R must be infinite at the same points; elsewhere the ratio is defined.
      bool agree = true;
      for (std::size_t i = 0; i < req.size(); ++i)
        agree = agree && (std::isinf(u_req.values[i]) == std::isinf(bound.R.values[i])) &&
                (std::isinf(u_req.values[i]) || std::isfinite(br.ratios[i]));
      c.pass = agree && br.flagged.empty() && br.c1_emp > 0.0;
      c.threshold = o.window_hi / o.window_lo;
      c.note = "c2_emp/c1_emp; ratios inside the plausibility window";
    }
    checks.push_back(c);
  }

  json sandwich{{"points", req.points()}, {"ratios", br.ratios}, {"R", br.R.values}, {"u", u_req.values},
                {"c1_emp", br.c1_emp}, {"c2_emp", br.c2_emp}, {"kappa_direction", std::string(to_string(br.kappa_direction))},
                {"flagged", br.flagged}};
  json terms = json::array();
  for (const auto& t : br.terms)
    terms.push_back({{"w_sigma_gamma", t.w_sigma_gamma}, {"K", t.K}, {"w_mu", t.w_mu}, {"R", t.R}, {"infinite_term", t.infinite_term}});
  sandwich["terms"] = terms;

  // Subsolution bound u <= phi, for the homogeneous problem only.
  json phi = nullptr;
  if (!sigma.is_zero() && mu.is_zero() && rep.status == SolveStatus::converged && !trivial) {
    const double T = sigma.support_radius();
    const auto family = default_phi_family(sigma, req, {0.5 * T, T}, &rep);
    const PhiReport ph = phi_sup(pr, sigma, req, family, cfg);
    double worst = 0.0;
    for (std::size_t i = 0; i < req.size(); ++i)
      if (std::isfinite(ph.phi_values[i]) && ph.phi_values[i] > 0.0) worst = std::max(worst, u_req.values[i] / ph.phi_values[i]);
    checks.push_back({"subsolution_below_phi", worst <= 1.0 + 2.0 * ls.tol, worst, 1.0 + 2.0 * ls.tol, "max u/phi_sup"});
    phi = {{"values", ph.phi_values}, {"best_nu", ph.best_nu_tag}, {"candidates", ph.candidates}};
  }

  // Existence verdict against the computed solution.
  {
    // Compact support: kappa(B(0,t)) is constant for large t.
    const PowerLogGrowth kg{sigma.is_zero() ? 0.0 : 1.0, 0.0, 0.0};
    const ExistenceReport ex = existence_check(pr, growth_of(sigma), growth_of(mu), kg);
    const bool ok = ex.verdict == Existence::exists ? rep.status == SolveStatus::converged
                                                    : (trivial || rep.status == SolveStatus::diverged_to_infinity);
    checks.push_back({"existence_consistent", ok, ex.verdict == Existence::exists ? 1.0 : 0.0, 1.0,
                      std::string(to_string(ex.verdict)) + ": " + ex.reason});
  }

  json refinement = nullptr;
  if (o.refine && !trivial) {
    BoundOptions fine = bo;
    fine.grid = bo.grid.refined();
    fine.radii = 2 * bo.radii;
    const BilateralReport rr = verify_sandwich(u_req, bound_field(pr, sigma, mu, req, fine, cfg.refined()), {o.window_lo, o.window_hi});
    const double d1 = rel_delta(br.c1_emp, rr.c1_emp), d2 = rel_delta(br.c2_emp, rr.c2_emp);
    refinement = {{"c1_emp", rr.c1_emp}, {"c2_emp", rr.c2_emp}, {"c1_delta", d1}, {"c2_delta", d2}};
    checks.push_back({"refinement_stability", std::max(d1, d2) < o.refine_tol, std::max(d1, d2), o.refine_tol,
                      "relative change of c1_emp, c2_emp under refinement"});
  }

  bool all = true;
  json cj = json::array();
  for (const auto& c : checks) {
    all = all && c.pass;
    cj.push_back(check_json(c));
  }
  Provenance prov{"verify", o.c.seed,
                  {{"params", params_json(pr)}, {"sigma", o.sigma}, {"mu", o.mu}, {"solve", o.solve}, {"kappa", o.kappa},
                   {"method", o.method}, {"radii", o.radii}, {"refine", o.refine}, {"window", {o.window_lo, o.window_hi}},
                   {"quadrature", quad_json(cfg)}}};
  json audit = prov.to_json();
  audit["pass"] = all;
  audit["checks"] = cj;
  audit["sandwich"] = sandwich;
  audit["phi"] = phi;
  audit["refinement"] = refinement;
  write_text(o.c.out, audit.dump(2) + "\n");
  return all ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------- gen-corpus

struct CorpusOpts {
  std::string out;
  std::uint64_t seed = 7;
  int n = 3, count = 10;
};

int cmd_gen_corpus(const CorpusOpts& o) {
  if (o.n < 1 || o.count < 1) throw UsageError("gen-corpus: need --n >= 1 and --count >= 1");
  fs::create_directories(o.out);
  const auto corpus = generate_corpus(o.n, o.count, o.seed);
  Provenance prov{"gen-corpus", o.seed, {{"n", o.n}, {"count", o.count}}};
  json index = prov.to_json();
  json entries = json::array();
  for (const auto& e : corpus) {
    json j = measure_to_json(e.measure);
    j["family"] = e.family;
    j["provenance"] = prov.to_json();
    write_text((fs::path(o.out) / (e.name + ".json")).string(), j.dump() + "\n");
    entries.push_back({{"name", e.name}, {"family", e.family}, {"file", e.name + ".json"}});
  }
  json mu = measure_to_json(corpus_mu(o.n, o.seed));
  mu["provenance"] = prov.to_json();
  write_text((fs::path(o.out) / "mu.json").string(), mu.dump() + "\n");
  json probes = points_to_json(corpus_probes(o.n, o.seed));
  probes["provenance"] = prov.to_json();
  write_text((fs::path(o.out) / "probes.json").string(), probes.dump() + "\n");
  index["entries"] = entries;
  index["mu"] = "mu.json";
  index["probes"] = "probes.json";
  write_text((fs::path(o.out) / "index.json").string(), index.dump(2) + "\n");
  return kExitOk;
}

// ---------------------------------------------------------------- sweep

struct SweepOpts {
  std::string out;
  std::vector<std::string> grid;
  int count = 10, jobs = 0;
  bool with_mu = false;
  SweepSettings s;
};

int cmd_sweep(const SweepOpts& o) {
  const auto tuples = expand_params_grid(o.grid);
  if (o.count < 1) throw UsageError("sweep: --count must be >= 1");
  std::map<int, std::vector<CorpusEntry>> corpora;
  for (const auto& t : tuples)
    if (t.n >= 1 && !corpora.count(t.n)) corpora[t.n] = generate_corpus(t.n, o.count, o.s.seed);

  struct Job {
    RawTuple t;
    const CorpusEntry* entry;
    bool mu;
  };
  std::vector<Job> jobs;
  for (const auto& t : tuples)
    for (const auto& e : corpora.at(t.n)) {
      jobs.push_back({t, &e, false});
      if (o.with_mu) jobs.push_back({t, &e, true});
    }

  const fs::path staging = fs::path(o.out == "-" ? "sweep" : o.out).string() + ".staging";
  fs::remove_all(staging);
  fs::create_directories(staging);
  auto stage_file = [&](std::size_t k) {
    char name[32];
    std::snprintf(name, sizeof name, "job_%06zu.csv", k);
    return staging / name;
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++) {
      const Job& j = jobs[k];
      std::vector<SweepRow> rows;
      try {
        rows = sweep_job(j.t, *j.entry, j.mu, o.s);
      } catch (const std::exception& e) {
        rows = {{"error", std::numeric_limits<double>::quiet_NaN(), false}};
      }
      std::ofstream f(stage_file(k));
      for (const auto& r : rows)
        f << k << ',' << fmt(j.t.p) << ',' << fmt(j.t.q) << ',' << fmt(j.t.alpha) << ',' << j.t.n << ','
          << j.entry->name << ',' << j.entry->family << ',' << (j.mu ? "corpus" : "none") << ',' << r.check << ','
          << fmt(r.value) << ',' << (r.pass ? 1 : 0) << '\n';
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t nthreads = std::min<std::size_t>(o.jobs > 0 ? static_cast<std::size_t>(o.jobs) : hw, std::max<std::size_t>(jobs.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t i = 0; i < nthreads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  Provenance prov{"sweep", o.s.seed,
                  {{"params_grid", o.grid}, {"count", o.count}, {"with_mu", o.with_mu}, {"tol", o.s.tol},
                   {"radii", o.s.radii}, {"ascent_iters", o.s.ascent_iters}}};
  std::ostringstream os;
  os << prov.csv_header() << "job,p,q,alpha,n,measure,family,mu,check,value,pass\n";
  bool all = true;
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    std::ifstream f(stage_file(k));
    std::string line;
    while (std::getline(f, line)) {
      os << line << '\n';
      const bool valid_row = line.find(",valid,") != std::string::npos;
      if (!valid_row && line.back() == '0') all = false;
    }
  }
  fs::remove_all(staging);
  write_text(o.out, os.str());
  return all ? kExitOk : kExitCheckFailed;
}

}  // namespace

std::vector<RawTuple> expand_params_grid(const std::vector<std::string>& tokens) {
  std::map<std::string, std::vector<std::string>> vals;
  for (const auto& tok : tokens) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw UsageError("--params-grid token '" + tok + "' is not name=v1,v2,...");
    const std::string key = tok.substr(0, eq);
    if (key != "p" && key != "q" && key != "alpha" && key != "n")
      throw UsageError("--params-grid: unknown parameter '" + key + "'");
    std::stringstream ss(tok.substr(eq + 1));
    std::string v;
    while (std::getline(ss, v, ',')) vals[key].push_back(v);
    if (vals[key].empty()) throw UsageError("--params-grid: no values for '" + key + "'");
  }
  for (const char* k : {"p", "q", "alpha", "n"})
    if (!vals.count(k)) throw UsageError(std::string("--params-grid: missing '") + k + "'");
  std::vector<RawTuple> out;
  for (const auto& ps : vals["p"]) {
    const double p = parse_double(ps);
    for (const auto& qs : vals["q"]) {
      const double q = qs == "auto" ? (p - 1.0) / 2.0 : parse_double(qs);
      for (const auto& as : vals["alpha"])
        for (const auto& ns : vals["n"]) {
          const double nd = parse_double(ns);
          if (nd != std::floor(nd)) throw UsageError("--params-grid: n must be an integer");
          out.push_back({p, q, parse_double(as), static_cast<int>(nd)});
        }
    }
  }
  return out;
}

std::vector<SweepRow> sweep_job(const RawTuple& t, const CorpusEntry& entry, bool with_mu, const SweepSettings& s) {
  Params pr;
  try {
    pr = validate_params(t.p, t.q, t.alpha, t.n);
  } catch (const ParamError&) {
    return {{"valid", 0.0, false}};
  }
  std::vector<SweepRow> rows{{"valid", 1.0, true}};
  const Measure& sigma = entry.measure;
  const Measure mu = with_mu ? corpus_mu(t.n, s.seed) : Measure::zero(t.n);
  const PointSet probes = corpus_probes(t.n, s.seed);
  SolveOptions so;
  so.tol = s.tol;
  const SolveReport rep = solve_monotone(pr, sigma, mu, probes, U0Mode::seeded, so);
  const bool conv = rep.status == SolveStatus::converged;
  rows.push_back({"solve_converged", static_cast<double>(rep.iterations), conv});
  rows.push_back({"fixed_point_residual", rep.fixed_point_residual(), rep.fixed_point_residual() < 2.0 * s.tol});
  rows.push_back({"monotone_iterates", rep.monotone ? 1.0 : 0.0, rep.monotone});

  BoundOptions bo;
  bo.radii = s.radii;
  bo.ascent.iters = s.ascent_iters;
  const PotentialField u = requested_field(rep, probes);
  const BilateralReport br = verify_sandwich(u, bound_field(pr, sigma, mu, probes, bo));
  const bool ok = std::isfinite(br.c1_emp) && br.c1_emp > 0.0 && std::isfinite(br.c2_emp);
  rows.push_back({"c1_emp", br.c1_emp, ok});
  rows.push_back({"c2_emp", br.c2_emp, ok});
  rows.push_back({"c2_over_c1", br.c2_emp / br.c1_emp, ok && br.flagged.empty()});

  if (!with_mu) {
    const PhiReport ph = phi_sup(pr, sigma, probes, {solution_measure(pr, sigma, rep)});
    double worst = 0.0;
    for (std::size_t i = 0; i < probes.size(); ++i)
      if (ph.phi_values[i] > 0.0) worst = std::max(worst, u.values[i] / ph.phi_values[i]);
    rows.push_back({"u_over_phi", worst, worst <= 1.0 + 2.0 * s.tol});
  }
  const ExistenceReport ex = existence_check(pr, growth_of(sigma), growth_of(mu), PowerLogGrowth{1.0, 0.0, 0.0});
  rows.push_back({"existence", ex.verdict == Existence::exists ? 1.0 : 0.0, ex.verdict == Existence::exists && conv});
  return rows;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nonlinear potentials: Wolff and intrinsic potentials, sublinear equation solver and audits", "nlpot"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version_tag());

  PotentialOpts po;
  auto* s_pot = app.add_subcommand("potential", "Wolff potential of a measure at points");
  add_common(s_pot, po.c, true);
  s_pot->add_option("--measure", po.measure, "measure JSON")->required();
  s_pot->add_option("--points", po.points, "points JSON")->required();

  RieszOpts ro;
  auto* s_riesz = app.add_subcommand("riesz", "Riesz potential I_beta of a measure at points");
  add_common(s_riesz, ro.c, false);
  s_riesz->add_option("--beta", ro.beta, "order, 0 < beta < n")->required();
  s_riesz->add_option("--measure", ro.measure, "measure JSON")->required();
  s_riesz->add_option("--points", ro.points, "points JSON")->required();

  KappaOpts ko;
  auto* s_kappa = app.add_subcommand("kappa", "Localized embedding constants on a radius ladder");
  add_common(s_kappa, ko.c, true);
  s_kappa->add_option("--sigma", ko.sigma, "sigma JSON")->required();
  s_kappa->add_option("--center", ko.centers, "centre x1,x2,... (repeatable)");
  s_kappa->add_option("--points", ko.points, "points JSON with further centres");
  s_kappa->add_option("--radii", ko.radii, "a:b:k geometric ladder, or auto[:k]");
  s_kappa->add_option("--method", ko.method, "ascent|pointmass");
  s_kappa->add_option("--iters", ko.iters, "ascent iterations");
  s_kappa->add_option("--restarts", ko.restarts, "ascent restarts");
  s_kappa->add_option("--grid-levels", ko.grid_levels, "shells in the candidate grid");
  s_kappa->add_option("--grid-directions", ko.grid_directions, "directions per dimension on each shell");

  IntrinsicOpts io;
  auto* s_int = app.add_subcommand("intrinsic", "Intrinsic potential from a kappa profile file");
  add_common(s_int, io.c, true);
  s_int->add_option("--kappa", io.kappa, "kappa CSV written by the kappa command")->required();

  SolveOpts so;
  auto* s_solve = app.add_subcommand("solve", "Monotone iteration for u = W(u^q sigma) + W mu");
  add_common(s_solve, so.c, true);
  s_solve->add_option("--sigma", so.sigma, "sigma JSON (default: zero)");
  s_solve->add_option("--mu", so.mu, "mu JSON (default: zero)");
  s_solve->add_option("--points", so.points, "evaluation points JSON")->required();
  s_solve->add_option("--u0", so.u0, "zero|seeded");
  s_solve->add_option("--tol", so.tol, "relative step tolerance (overrides NLPOT_SOLVE_TOL)");
  s_solve->add_option("--max-iter", so.max_iter, "iteration cap");
  s_solve->add_option("--ceiling", so.ceiling, "divergence ceiling factor");
  s_solve->add_option("--sidecar", so.sidecar, "JSON sidecar path (default: <out>.json)");
  s_solve->add_flag("--keep-iterates", so.keep_iterates, "store all iterates in the sidecar");

  VerifyOpts vo;
  auto* s_ver = app.add_subcommand("verify", "Audit a solve report against the bilateral bounds");
  add_common(s_ver, vo.c, true);
  s_ver->add_option("--sigma", vo.sigma, "sigma JSON (default: zero)");
  s_ver->add_option("--mu", vo.mu, "mu JSON (default: zero)");
  s_ver->add_option("--solve", vo.solve, "solve CSV")->required();
  s_ver->add_option("--solve-meta", vo.solve_meta, "solve sidecar (default: <solve>.json)");
  s_ver->add_option("--kappa", vo.kappa, "kappa CSV with one profile per evaluation point");
  s_ver->add_option("--method", vo.method, "kappa method when profiles are computed: ascent|pointmass");
  s_ver->add_option("--radii", vo.radii, "radius ladder length when profiles are computed");
  s_ver->add_flag("--refine", vo.refine, "also report constants under grid and quadrature refinement");
  s_ver->add_option("--window-lo", vo.window_lo, "lower plausibility bound for u/R");
  s_ver->add_option("--window-hi", vo.window_hi, "upper plausibility bound for u/R");

  SweepOpts swo;
  auto* s_sweep = app.add_subcommand("sweep", "Parameter grid x corpus sweep of empirical constants");
  s_sweep->add_option("--params-grid", swo.grid, "tokens p=.. q=..|auto alpha=.. n=..")->required()->expected(1, -1);
  s_sweep->add_option("--out", swo.out, "output CSV")->required();
  s_sweep->add_option("--count", swo.count, "corpus size per dimension");
  s_sweep->add_option("--seed", swo.s.seed, "corpus seed");
  s_sweep->add_option("--jobs", swo.jobs, "worker threads (default: hardware concurrency)");
  s_sweep->add_flag("--with-mu", swo.with_mu, "also run every measure with the corpus mu");
  s_sweep->add_option("--tol", swo.s.tol, "solver tolerance");
  s_sweep->add_option("--radii", swo.s.radii, "radius ladder length");
  s_sweep->add_option("--iters", swo.s.ascent_iters, "ascent iterations");

  CorpusOpts co;
  auto* s_corp = app.add_subcommand("gen-corpus", "Write a seeded measure corpus as JSON files");
  s_corp->add_option("--out", co.out, "output directory")->required();
  s_corp->add_option("--seed", co.seed, "seed");
  s_corp->add_option("--n", co.n, "dimension");
  s_corp->add_option("--count", co.count, "number of measures");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << version_tag() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    report(err, "error", kExitUsage, "usage", e.what());
    return kExitUsage;
  }

  try {
    if (s_pot->parsed()) return cmd_potential(po, err);
    if (s_riesz->parsed()) return cmd_riesz(ro);
    if (s_kappa->parsed()) return cmd_kappa(ko, err);
    if (s_int->parsed()) return cmd_intrinsic(io, err);
    if (s_solve->parsed()) return cmd_solve(so, err);
    if (s_ver->parsed()) return cmd_verify(vo);
    if (s_sweep->parsed()) return cmd_sweep(swo);
    if (s_corp->parsed()) return cmd_gen_corpus(co);
  } catch (const UsageError& e) {
    report(err, "error", kExitUsage, "usage", e.what());
    return kExitUsage;
  } catch (const ParamError& e) {
    report(err, "error", kExitUsage, "params", e.what());
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    report(err, "error", kExitUsage, "invalid_argument", e.what());
    return kExitUsage;
  } catch (const NumericalError& e) {
    report(err, "error", kExitNumerical, "numerical", e.what());
    return kExitNumerical;
  } catch (const json::exception& e) {
    report(err, "error", kExitUsage, "json", e.what());
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    report(err, "error", kExitUsage, "io", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    report(err, "error", kExitNumerical, "internal", e.what());
    return kExitNumerical;
  }
  return kExitUsage;
}

}  // namespace nlpot::cli
