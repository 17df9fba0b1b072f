#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace nlpot {

enum class Preset { none, p_laplace, hessian };

Preset parse_preset(std::string_view name);
std::string_view to_string(Preset preset);

/// Exponent tuple (p, q, alpha, n) with the derived exponents.
struct Params {
  double p = 2.0;
  double q = 0.5;
  double alpha = 1.0;
  int n = 3;

  double s = 1.0;      // n - alpha p
  double gamma = 2.0;  // (p-1)/(p-1-q)
  double delta = 1.0;  // 1/(p-1)
  double kexp = 1.0;   // q(p-1)/(p-1-q)

  Preset preset = Preset::none;
  // Set for the p-Laplace preset with n <= p: only the trivial solution exists.
  bool no_nontrivial_solutions = false;

  std::string describe() const;
};

/// Validates the raw tuple and fills in the derived exponents.
///
/// Presets override the raw values: `p_laplace` forces alpha = 1, `hessian`
/// reads k = p - 1 and forces alpha = 2k/(k+1). Throws ParamError naming every
/// violated inequality. The p-Laplace preset with n <= p is not rejected; it
/// returns a tuple flagged `no_nontrivial_solutions`.
Params validate_params(double p, double q, double alpha, int n, Preset preset = Preset::none);

/// Parses "p=2,q=0.5,alpha=1,n=3[,preset=p-laplace]". `q=auto` selects (p-1)/2.
Params parse_params(std::string_view spec);

}  // namespace nlpot
