#pragma once

#include "dro/lp.hpp"
#include "dro/problem.hpp"

namespace dro {

// Epigraph reformulations of min_{x in Q} c^T x + sup_{p in P} sum_i p_i (<a_i, x> + xi_i).
// Variables are ordered (x, t, extra): x in R^n free, t free epigraph level, then the
// nonnegative multipliers of the extra constraints of P. All builders require a linear
// smooth term, affine costs and a consensus instance; they throw PreconditionError otherwise.

/// min t  s.t.  <a_i + c, x> + xi_i - t <= 0,  A x = b.
[[nodiscard]] LinearProgram build_dual_simplex_case(const ProblemInstance& inst);

/// min t + q^T mu  s.t.  <a_i + c, x> + xi_i - mu_i - t <= 0,  A x = b,  mu >= 0.
[[nodiscard]] LinearProgram build_dual_capped_case(const ProblemInstance& inst);

/// min t + mu_plus * up - mu_minus * lo
/// s.t. <a_i + c, x> + xi_i - t + lo * v_i - up * v_i <= 0,  A x = b,  up, lo >= 0,
/// where v are the moment values of the box.
[[nodiscard]] LinearProgram build_dual_momentbox_case(const ProblemInstance& inst);

/// Picks the builder matching the ambiguity set.
[[nodiscard]] LinearProgram build_dual_lp(const ProblemInstance& inst);

/// Leading x-block of an LP solution.
[[nodiscard]] Vector dual_lp_primal(const LpResult& res, const ProblemInstance& inst);

}  // namespace dro
