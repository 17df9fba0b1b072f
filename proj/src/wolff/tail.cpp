#include <cmath>

#include "nlpot/error.hpp"
#include "nlpot/wolff.hpp"

namespace nlpot {

std::string_view to_string(TailClass c) { return c == TailClass::finite ? "finite" : "infinite"; }

GrowthProfile growth_of(const Measure& m) { return FiniteMassGrowth{m.total_mass()}; }

TailClass classify_power_log_tail(double lambda, double mu) {
  const double eps = 1e-12;
  if (lambda < -eps) return TailClass::finite;
  if (lambda > eps) return TailClass::infinite;
  return mu < -1.0 ? TailClass::finite : TailClass::infinite;
}

TailClass tail_exists(const Params& pr, const GrowthProfile& profile) {
  if (const auto* fm = std::get_if<FiniteMassGrowth>(&profile)) {
    if (!(fm->total_mass >= 0.0) || !std::isfinite(fm->total_mass)) {
      throw InvalidArgument("tail_exists: total mass must be finite and >= 0");
    }
    if (fm->total_mass == 0.0) return TailClass::finite;
    // Integrand ~ t^{-s/(p-1) - 1}.
    return classify_power_log_tail(-pr.s * pr.delta, 0.0);
  }
  const auto& g = std::get<PowerLogGrowth>(profile);
  if (!std::isfinite(g.C) || !std::isfinite(g.d) || !std::isfinite(g.e) || g.C < 0.0 || g.d < 0.0 ||
      (g.d == 0.0 && g.e < 0.0)) {
    throw InvalidArgument("tail_exists: unsupported growth profile (need C >= 0, d >= 0, nondecreasing)");
  }
  if (g.C == 0.0) return TailClass::finite;
  return classify_power_log_tail((g.d - pr.s) * pr.delta, g.e * pr.delta);
}

}  // namespace nlpot
