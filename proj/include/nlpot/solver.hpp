#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "nlpot/wolff.hpp"

namespace nlpot {

enum class U0Mode { zero, seeded };
enum class SolveStatus { converged, max_iter, diverged_to_infinity };
enum class PointClass { sub, super, solution, neither };

std::string_view to_string(U0Mode m);
std::string_view to_string(SolveStatus s);
std::string_view to_string(PointClass c);
U0Mode parse_u0_mode(std::string_view s);

/// sigma as atoms: atomic input unchanged, radial input discretized with
/// cell-size atoms (deterministic).
Measure solver_atoms(const Measure& sigma);

/// sigma's positive-weight atoms followed by the points not already present.
PointSet coupled_points(const Measure& sigma, const PointSet& points);

/// u -> W(u^q dsigma) + W mu on u's point set.
///
/// u must be defined at every positive-weight atom of solver_atoms(sigma).
/// The sigma part is truncated below sigma's cell size (or cfg's t_min when
/// larger); W mu uses mu's own policy.
PotentialField apply_T(const Params& pr, const Measure& sigma, const Measure& mu, const PotentialField& u,
                       const QuadratureConfig& cfg = {});

struct SolveOptions {
  double tol = 1e-6;
  int max_iter = 500;
  double ceiling_factor = 1e12;
  bool keep_iterates = false;
};

struct SolveReport {
  PotentialField u;         // on the coupled point set
  std::size_t sigma_atoms = 0;  // leading points of u that are sigma atoms
  std::vector<std::size_t> eval_index;  // position of each requested point in u
  int iterations = 0;
  std::vector<double> residual_history;
  // |Tu - u| at every point for the returned u.
  std::vector<double> pointwise_residual;
  SolveStatus status = SolveStatus::max_iter;
  U0Mode u0_mode = U0Mode::zero;
  double seed_constant = 0.0;  // c in u0 = c (W sigma)^gamma
  bool monotone = true;
  std::vector<std::vector<double>> iterates;  // u_0 .. u_j when kept
  std::string note;

  double final_residual() const { return residual_history.empty() ? 0.0 : residual_history.back(); }
  /// sup |Tu - u| / sup u over points not pinned at infinity.
  double fixed_point_residual() const;
  std::vector<double> values_at_requested() const;
};

/// Monotone iteration u_{j+1} = T u_j from u_0 = 0 or u_0 = c (W sigma)^gamma,
/// with c halved from 1 until T u_0 >= u_0. Stops when
/// sup |u_{j+1} - u_j| / sup u_{j+1} < tol and returns u_j.
SolveReport solve_monotone(const Params& pr, const Measure& sigma, const Measure& mu, const PointSet& points,
                           U0Mode mode, const SolveOptions& opts = {}, const QuadratureConfig& cfg = {});

/// Compares u with Tu pointwise in the band tol (1 + |Tu|).
std::vector<PointClass> classify_sub_super(const Params& pr, const Measure& sigma, const Measure& mu,
                                           const PotentialField& u, double tol, const QuadratureConfig& cfg = {});

}  // namespace nlpot
