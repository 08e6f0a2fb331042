#pragma once

#include "dro/primal_dual.hpp"
#include "dro/problem.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dro {

enum class SolverKind { ProxMax, DistributedFb, FbSubspaces, DavisYin };

[[nodiscard]] std::string_view solver_name(SolverKind k);
/// Accepts "prox_max", "distributed_fb", "fb_subspaces", "davis_yin". Throws PreconditionError otherwise.
[[nodiscard]] SolverKind parse_solver(std::string_view name);
inline constexpr SolverKind kAllSolvers[] = {SolverKind::ProxMax, SolverKind::DistributedFb, SolverKind::FbSubspaces,
                                             SolverKind::DavisYin};

/// Unset steps are filled with the per-solver defaults (see resolve_steps).
struct SolverConfig {
  std::optional<double> lambda;
  std::optional<double> gamma;
  double tol = 1e-5;
  int max_iter = 30000;
};

struct StepSizes {
  double lambda = 0.0;  // unused by fb_subspaces and davis_yin
  double gamma = 0.0;
};

/// Defaults and admissible ranges, with beta = 1 / lipschitz(h):
///   prox_max        lambda = beta,  gamma = 0.99 (1/lambda - 1/(2 beta)); lambda in (0, 2beta), gamma < 1/lambda - 1/(2beta)
///   distributed_fb  lambda = beta,  gamma = 0.5 (1 - lambda/(2beta));      lambda in (0, 2beta), gamma in (0, 1 - lambda/(2beta))
///   fb_subspaces, davis_yin          gamma = beta;                          gamma in (0, 2beta)
/// Defaults are capped at 1 (this only binds when h is linear or nearly so).
/// Throws PreconditionError for out-of-range explicit steps.
[[nodiscard]] StepSizes resolve_steps(SolverKind kind, const ProblemInstance& inst, const SolverConfig& cfg);

// x and p are the final iterates projected onto Q and P.
struct SolverReport {
  std::string solver;
  Matrix x;  // n x 1 (consensus) or n x N (separable)
  Vector p;
  int iterations = 0;
  bool converged = false;
  std::vector<double> residuals;
  double objective = 0.0;
};

[[nodiscard]] SolverReport prox_max_solve(const ProblemInstance& inst, const SolverConfig& cfg = {});
[[nodiscard]] SolverReport distributed_fb_solve(const ProblemInstance& inst, const SolverConfig& cfg = {});
/// `dual_start` seeds the correction blocks (one per product block, summing to zero); empty means zero.
[[nodiscard]] SolverReport fb_subspaces_solve(const ProblemInstance& inst, const SolverConfig& cfg = {},
                                              const std::vector<PrimalDualPoint>& dual_start = {});
[[nodiscard]] SolverReport davis_yin_solve(const ProblemInstance& inst, const SolverConfig& cfg = {});

[[nodiscard]] SolverReport solve(SolverKind kind, const ProblemInstance& inst, const SolverConfig& cfg = {});

}  // namespace dro
