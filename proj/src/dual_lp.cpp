#include "dro/dual_lp.hpp"

namespace dro {

namespace {

const AffineFamily& require_linear(const ProblemInstance& inst) {
  inst.validate();
  if (!inst.h.is_linear()) throw PreconditionError("dual LP: the smooth term must be linear");
  if (inst.subspace != Subspace::Consensus) throw PreconditionError("dual LP: consensus instances only");
  const auto* fam = std::get_if<AffineFamily>(&inst.family);
  if (fam == nullptr) throw PreconditionError("dual LP: costs must be affine");
  return *fam;
}

// Shared part: x block, epigraph column and the equality rows; `extra` trailing nonnegative columns.
LinearProgram skeleton(const ProblemInstance& inst, const AffineFamily& fam, Eigen::Index extra) {
  const Eigen::Index n = inst.dim();
  const Eigen::Index count = inst.scenarios();
  const Eigen::Index vars = n + 1 + extra;

  LinearProgram lp;
  lp.objective = Vector::Zero(vars);
  lp.objective(n) = 1.0;
  lp.ineq = Matrix::Zero(count, vars);
  lp.ineq.leftCols(n) = (fam.slopes.colwise() + inst.h.cost()).transpose();
  lp.ineq.col(n).setConstant(-1.0);
  lp.ineq_rhs = -fam.offsets;
  if (const auto* q = std::get_if<AffineSet>(&inst.feasible)) {
    lp.eq = Matrix::Zero(q->a().rows(), vars);
    lp.eq.leftCols(n) = q->a();
    lp.eq_rhs = q->b();
  } else {
    lp.eq = Matrix(0, vars);
    lp.eq_rhs = Vector(0);
  }
  lp.signs.assign(static_cast<std::size_t>(n + 1), VarSign::Free);
  lp.signs.resize(static_cast<std::size_t>(vars), VarSign::NonNegative);
  return lp;
}

}  // namespace

LinearProgram build_dual_simplex_case(const ProblemInstance& inst) {
  const AffineFamily& fam = require_linear(inst);
  if (!std::holds_alternative<AmbiguitySet::FullSimplex>(inst.ambiguity.variant()))
    throw PreconditionError("build_dual_simplex_case: ambiguity set must be the full simplex");
  return skeleton(inst, fam, 0);
}

LinearProgram build_dual_capped_case(const ProblemInstance& inst) {
  const AffineFamily& fam = require_linear(inst);
  const auto* capped = std::get_if<AmbiguitySet::CappedSimplex>(&inst.ambiguity.variant());
  if (capped == nullptr) throw PreconditionError("build_dual_capped_case: ambiguity set must be a capped simplex");
  const Eigen::Index count = inst.scenarios();
  LinearProgram lp = skeleton(inst, fam, count);
  lp.objective.tail(count) = capped->caps;
  lp.ineq.rightCols(count) = -Matrix::Identity(count, count);
  return lp;
}

LinearProgram build_dual_momentbox_case(const ProblemInstance& inst) {
  const AffineFamily& fam = require_linear(inst);
  const auto* box = std::get_if<AmbiguitySet::MomentBox>(&inst.ambiguity.variant());
  if (box == nullptr) throw PreconditionError("build_dual_momentbox_case: ambiguity set must be a moment box");
  const Eigen::Index n = inst.dim();
  LinearProgram lp = skeleton(inst, fam, 2);
  // columns n+1: multiplier of the upper bound, n+2: multiplier of the lower bound
  lp.objective(n + 1) = box->upper;
  lp.objective(n + 2) = -box->lower;
  lp.ineq.col(n + 1) = -box->values;
  lp.ineq.col(n + 2) = box->values;
  return lp;
}

LinearProgram build_dual_lp(const ProblemInstance& inst) {
  return std::visit(
      [&](const auto& v) {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, AmbiguitySet::FullSimplex>) return build_dual_simplex_case(inst);
        else if constexpr (std::is_same_v<V, AmbiguitySet::CappedSimplex>) return build_dual_capped_case(inst);
        else return build_dual_momentbox_case(inst);
      },
      inst.ambiguity.variant());
}

Vector dual_lp_primal(const LpResult& res, const ProblemInstance& inst) {
  if (res.status != LpStatus::Optimal) throw PreconditionError("dual_lp_primal: LP has no optimal solution");
  return res.solution.head(inst.dim());
}

}  // namespace dro
