#include "nlpot/cli/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "nlpot/error.hpp"

#ifndef NLPOT_VERSION
#define NLPOT_VERSION "unknown"
#endif

namespace nlpot::cli {

std::string version_tag() { return NLPOT_VERSION; }

namespace {

std::vector<double> numbers(const json& j, const char* key) {
  if (!j.contains(key)) throw UsageError(std::string("measure: missing \"") + key + "\"");
  const json& a = j.at(key);
  if (!a.is_array()) throw UsageError(std::string("measure: \"") + key + "\" must be an array");
  std::vector<double> out;
  for (const auto& v : a) {
    if (!v.is_number()) throw UsageError(std::string("measure: \"") + key + "\" must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

Point point_of(const json& v) {
  if (!v.is_array() || v.empty()) throw UsageError("point must be a non-empty array of numbers");
  Point p;
  for (const auto& c : v) {
    if (!c.is_number()) throw UsageError("point must be a non-empty array of numbers");
    p.push_back(c.get<double>());
  }
  return p;
}

int dim_field(const json& j) {
  if (!j.contains("n") || !j.at("n").is_number_integer()) throw UsageError("measure: missing integer \"n\"");
  return j.at("n").get<int>();
}

}  // namespace

Measure measure_from_json(const json& j, std::optional<int> expected_n) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw UsageError("measure: expected an object with a \"kind\" string");
  const std::string kind = j.at("kind").get<std::string>();
  Measure m = Measure::zero(1);
  try {
    if (kind == "zero") {
      m = Measure::zero(dim_field(j));
    } else if (kind == "radial") {
      m = Measure::radial(dim_field(j), numbers(j, "bin_edges"), numbers(j, "densities"));
    } else if (kind == "atomic") {
      if (!j.contains("points") || !j.at("points").is_array()) throw UsageError("measure: missing \"points\"");
      std::vector<Point> pts;
      for (const auto& v : j.at("points")) pts.push_back(point_of(v));
      std::optional<double> cell;
      if (j.contains("cell_size") && !j.at("cell_size").is_null()) {
        if (!j.at("cell_size").is_number()) throw UsageError("measure: \"cell_size\" must be a number");
        cell = j.at("cell_size").get<double>();
      }
      if (pts.empty()) {
        m = Measure::zero(j.contains("n") ? dim_field(j) : expected_n.value_or(1));
      } else {
        const int n = static_cast<int>(pts.front().size());
        m = Measure::atomic(n, std::move(pts), numbers(j, "weights"), cell);
      }
    } else {
      throw UsageError("measure: unknown kind \"" + kind + "\"");
    }
  } catch (const InvalidArgument& e) {
    throw UsageError(std::string("measure: ") + e.what());
  }
  if (expected_n && m.dim() != *expected_n)
    throw UsageError("dimension mismatch: measure lives in R^" + std::to_string(m.dim()) + ", parameters have n=" +
                     std::to_string(*expected_n));
  if (j.contains("tag") && j.at("tag").is_string()) m = m.with_tag(j.at("tag").get<std::string>());
  return m;
}

json measure_to_json(const Measure& m) {
  json j;
  if (m.is_zero() && !m.is_radial()) {
    j["kind"] = "zero";
    j["n"] = m.dim();
  } else if (m.is_radial()) {
    j["kind"] = "radial";
    j["n"] = m.dim();
    j["bin_edges"] = m.bins().bin_edges;
    j["densities"] = m.bins().densities;
  } else {
    j["kind"] = "atomic";
    j["points"] = m.atoms().points;
    j["weights"] = m.atoms().weights;
    if (m.atoms().cell_size) j["cell_size"] = *m.atoms().cell_size;
  }
  if (!m.tag().empty()) j["tag"] = m.tag();
  return j;
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError("malformed JSON in " + path + ": " + e.what());
  }
}

Measure read_measure(const std::string& path, std::optional<int> expected_n) {
  try {
    return measure_from_json(read_json(path), expected_n);
  } catch (const UsageError& e) {
    throw UsageError(path + ": " + e.what());
  }
}

PointSet read_points(const std::string& path, std::optional<int> expected_n) {
  const json j = read_json(path);
  const json& arr = j.is_object() && j.contains("points") ? j.at("points") : j;
  if (!arr.is_array()) throw UsageError(path + ": expected an array of points");
  std::vector<Point> pts;
  for (const auto& v : arr) pts.push_back(point_of(v));
  try {
    PointSet ps(std::move(pts), "points");
    if (expected_n && ps.dim() != *expected_n)
      throw UsageError("dimension mismatch: points live in R^" + std::to_string(ps.dim()) +
                       ", parameters have n=" + std::to_string(*expected_n));
    return ps;
  } catch (const InvalidArgument& e) {
    throw UsageError(path + ": " + e.what());
  }
}

json points_to_json(const PointSet& pts) { return json{{"points", pts.points()}}; }

Point parse_point(const std::string& s) {
  Point p;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) p.push_back(parse_double(tok));
  if (p.empty()) throw UsageError("empty point '" + s + "'");
  return p;
}

json Provenance::to_json() const {
  return json{{"nlpot_version", version_tag()}, {"command", command}, {"seed", seed}, {"config", config}};
}

std::string Provenance::csv_header() const {
  std::ostringstream os;
  os << "# nlpot " << version_tag() << '\n'
     << "# command: " << command << '\n'
     << "# seed: " << seed << '\n'
     << "# config: " << config.dump() << '\n';
  return os.str();
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw UsageError("CSV is missing column '" + name + "'");
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  CsvTable t;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      static const std::string key = "# config: ";
      if (line.rfind(key, 0) == 0) {
        try {
          t.config = json::parse(line.substr(key.size()));
        } catch (const json::exception& e) {
          throw UsageError("malformed config header in " + path + ": " + e.what());
        }
      }
      continue;
    }
    auto cells = split_csv_line(line);
    if (!have_header) {
      t.columns = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != t.columns.size()) throw UsageError("ragged row in " + path);
    t.rows.push_back(std::move(cells));
  }
  if (!have_header) throw UsageError("no column header in " + path);
  return t;
}

void write_text(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError("cannot write " + path);
  out << content;
  if (!out) throw UsageError("write failed for " + path);
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double parse_double(const std::string& s) {
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const char* b = s.data();
  const char* e = b + s.size();
  while (b < e && *b == ' ') ++b;
  if (b < e && *b == '+') ++b;
  const auto r = std::from_chars(b, e, v);
  if (r.ec != std::errc() || r.ptr != e) throw UsageError("not a number: '" + s + "'");
  return v;
}

namespace {

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  return std::string(v);
}

}  // namespace

QuadratureConfig quadrature_from_env() {
  QuadratureConfig cfg;
  if (auto v = env("NLPOT_REL_TOL")) cfg.rel_tol = parse_double(*v);
  if (auto v = env("NLPOT_PANELS_PER_DECADE")) cfg.panels_per_decade = static_cast<int>(parse_double(*v));
  try {
    cfg.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(std::string("environment override: ") + e.what());
  }
  return cfg;
}

double solve_tol_from_env() {
  double tol = 1e-6;
  if (auto v = env("NLPOT_SOLVE_TOL")) tol = parse_double(*v);
  if (!(tol > 0.0)) throw UsageError("environment override: NLPOT_SOLVE_TOL must be > 0");
  return tol;
}

}  // namespace nlpot::cli
