#pragma once

#include <string>
#include <vector>

#include "nlpot/embedding.hpp"
#include "nlpot/wolff.hpp"

namespace nlpot {

struct IntrinsicResult {
  double value = 0.0;
  BoundDirection direction = BoundDirection::best_estimate;
  // Small-t power law kappa ~ t^a fitted below the smallest positive radius.
  double small_t_exponent = 0.0;
  bool clamped = false;
  std::vector<std::string> diagnostics;
};

/// Integral over (0, inf) of [kappa(B(x,t))^kexp / t^s]^{1/(p-1)} dt/t.
///
/// kappa is log-linear between ladder radii, zero below the support
/// distance, a fitted power law below the first ladder radius, and constant
/// from the saturation radius on, where the tail is exact. Throws
/// InvalidArgument for fewer than 2 radii or an unsaturated profile.
IntrinsicResult intrinsic_potential_detailed(const Params& pr, const KappaProfile& profile,
                                             const QuadratureConfig& cfg = {});

double intrinsic_potential(const Params& pr, const KappaProfile& profile, const QuadratureConfig& cfg = {});

/// Finiteness of the large-t part for kappa(B(0,t)) ~ C t^d (log t)^e,
/// classified like tail_exists with mass replaced by kappa^kexp.
TailClass intrinsic_tail_finite(const Params& pr, const PowerLogGrowth& kappa_growth);

}  // namespace nlpot
