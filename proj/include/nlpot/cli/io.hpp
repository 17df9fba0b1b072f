#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlpot/measure.hpp"
#include "nlpot/quadrature.hpp"

namespace nlpot::cli {

using nlohmann::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

/// Bad flags, unreadable or malformed input files. Maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string version_tag();

/// {"kind": "atomic", "points": [[..]], "weights": [..], "cell_size": h}
/// {"kind": "radial", "n": n, "bin_edges": [..], "densities": [..]}
/// {"kind": "zero", "n": n}
/// Extra keys are ignored. Throws UsageError on malformed input or when the
/// dimension differs from `expected_n`.
Measure measure_from_json(const json& j, std::optional<int> expected_n = std::nullopt);
json measure_to_json(const Measure& m);

json read_json(const std::string& path);
Measure read_measure(const std::string& path, std::optional<int> expected_n = std::nullopt);
/// Either a bare array of coordinates or {"points": [...]}.
PointSet read_points(const std::string& path, std::optional<int> expected_n = std::nullopt);
json points_to_json(const PointSet& pts);
/// "x1,x2,..." as a point.
Point parse_point(const std::string& s);

/// Provenance carried by every output file: version, seed and the resolved
/// configuration.
struct Provenance {
  std::string command;
  std::uint64_t seed = 0;
  json config = json::object();

  json to_json() const;
  /// "# nlpot <version>", "# command: ..", "# seed: ..", "# config: <json>".
  std::string csv_header() const;
};

struct CsvTable {
  json config = json::object();  // parsed from the "# config:" header line
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;  // throws UsageError
};

CsvTable read_csv(const std::string& path);

/// Writes atomically enough for sequential use; "-" writes to stdout.
void write_text(const std::string& path, const std::string& content);

/// Round-trip decimal form; inf, -inf and nan spelled out.
std::string fmt(double v);
double parse_double(const std::string& s);

/// Defaults with NLPOT_REL_TOL and NLPOT_PANELS_PER_DECADE applied.
QuadratureConfig quadrature_from_env();
/// 1e-6 unless NLPOT_SOLVE_TOL is set.
double solve_tol_from_env();

}  // namespace nlpot::cli
