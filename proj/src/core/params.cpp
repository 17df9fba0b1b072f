#include "nlpot/params.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <vector>

#include "nlpot/error.hpp"
#include "nlpot/exponents.hpp"

namespace nlpot {

namespace {

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += "; ";
    out += p;
  }
  return out;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

double parse_number(std::string_view key, std::string_view text) {
  std::string buf(text);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (buf.empty() || end != buf.c_str() + buf.size()) {
    throw InvalidArgument("params: cannot parse " + std::string(key) + "='" + buf + "'");
  }
  return v;
}

}  // namespace

ParamError::ParamError(std::vector<std::string> violations)
    : InvalidArgument("invalid parameters: " + join(violations)), violations_(std::move(violations)) {}

Preset parse_preset(std::string_view name) {
  if (name.empty() || name == "none") return Preset::none;
  if (name == "p-laplace" || name == "p_laplace") return Preset::p_laplace;
  if (name == "hessian") return Preset::hessian;
  throw InvalidArgument("unknown preset '" + std::string(name) + "'");
}

std::string_view to_string(Preset preset) {
  switch (preset) {
    case Preset::none:
      return "none";
    case Preset::p_laplace:
      return "p-laplace";
    case Preset::hessian:
      return "hessian";
  }
  return "none";
}

std::string Params::describe() const {
  std::ostringstream os;
  os.precision(12);
  os << "p=" << p << ",q=" << q << ",alpha=" << alpha << ",n=" << n;
  if (preset != Preset::none) os << ",preset=" << to_string(preset);
  return os.str();
}

Params validate_params(double p, double q, double alpha, int n, Preset preset) {
  std::vector<std::string> violations;

  if (preset == Preset::p_laplace) alpha = 1.0;
  if (preset == Preset::hessian) {
    const double k = p - 1.0;
    alpha = 2.0 * k / (k + 1.0);
    if (!(k > 0.0)) violations.push_back("hessian preset needs k = p-1 > 0 (k=" + fmt(k) + ")");
  }

  if (n < 1) violations.push_back("n >= 1 violated (n=" + std::to_string(n) + ")");
  if (!(p > 1.0)) violations.push_back("1 < p violated (p=" + fmt(p) + ")");
  if (!(q > 0.0)) violations.push_back("0 < q violated (q=" + fmt(q) + ")");
  if (!(q < p - 1.0)) {
    violations.push_back("q < p-1 violated (q=" + fmt(q) + ", p-1=" + fmt(p - 1.0) + ")");
  }
  if (!(alpha > 0.0)) violations.push_back("0 < alpha violated (alpha=" + fmt(alpha) + ")");

  const bool laplace_degenerate = preset == Preset::p_laplace && n >= 1 && n <= p;
  if (!laplace_degenerate && n >= 1 && !(alpha < n / p)) {
    violations.push_back("alpha < n/p violated (alpha=" + fmt(alpha) + ", n/p=" + fmt(n / p) + ")");
  }
  if (!violations.empty()) throw ParamError(std::move(violations));

  Params pr;
  pr.p = p;
  pr.q = q;
  pr.alpha = alpha;
  pr.n = n;
  pr.preset = preset;
  pr.s = n - alpha * p;
  pr.delta = exponents::delta(p);
  pr.gamma = exponents::gamma(p, q);
  pr.kexp = exponents::kexp(p, q);
  pr.no_nontrivial_solutions = laplace_degenerate;
  return pr;
}

Params parse_params(std::string_view spec) {
  std::optional<double> p, q, alpha;
  std::optional<int> n;
  bool q_auto = false;
  Preset preset = Preset::none;

  std::size_t pos = 0;
  while (pos <= spec.size()) {
    const std::size_t comma = spec.find(',', pos);
    const std::string_view item = spec.substr(pos, comma == std::string_view::npos ? spec.npos : comma - pos);
    pos = comma == std::string_view::npos ? spec.size() + 1 : comma + 1;
    if (item.empty()) continue;
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos) throw InvalidArgument("params: expected key=value, got '" + std::string(item) + "'");
    const std::string_view key = item.substr(0, eq);
    const std::string_view value = item.substr(eq + 1);
    if (key == "p") {
      p = parse_number(key, value);
    } else if (key == "q") {
      if (value == "auto") {
        q_auto = true;
      } else {
        q = parse_number(key, value);
      }
    } else if (key == "alpha") {
      alpha = parse_number(key, value);
    } else if (key == "n") {
      const double v = parse_number(key, value);
      if (v != std::floor(v)) throw InvalidArgument("params: n must be an integer");
      n = static_cast<int>(v);
    } else if (key == "preset") {
      preset = parse_preset(value);
    } else {
      throw InvalidArgument("params: unknown key '" + std::string(key) + "'");
    }
  }
  if (!p) throw InvalidArgument("params: missing p");
  if (!n) throw InvalidArgument("params: missing n");
  if (q_auto) q = (*p - 1.0) / 2.0;
  if (!q) throw InvalidArgument("params: missing q");
  if (!alpha) {
    if (preset == Preset::none) throw InvalidArgument("params: missing alpha");
    alpha = 1.0;
  }
  return validate_params(*p, *q, *alpha, *n, preset);
}

}  // namespace nlpot
