#pragma once

#include "dro/linalg.hpp"
#include "dro/primal_dual.hpp"
#include "dro/projections.hpp"

namespace dro {

// Resolvents of the operators in the optimality system
//   0 in grad h(x) + N_Q(x) + sum_i p_i df_i(x),   0 in N_P(p) - (f_1(x), ..., f_N(x)).
// B_i couples scenario i's cost to weight p_i; A_1 carries N_Q and the sum-to-one hyperplane;
// A_2 / A_3 carry the caps or the moment slab.

/// J_{gamma B_i} for f_i(x) = <a, x> + offset. Only p_i (index i) changes in the weight block.
[[nodiscard]] PrimalDualPoint resolvent_Bi_affine(const PrimalDualPoint& z, double gamma, Eigen::Index i,
                                                  const Eigen::Ref<const Vector>& a, double offset);

/// J_{gamma B_i} for f_i(x) = ||x - anchor||^2. The scalar weight solves
///   w = p_i + gamma ||x - anchor||^2 / (1 + 2 gamma w)^2
/// by bisection-safeguarded Newton on [0, p_i + gamma f_i(x)].
[[nodiscard]] PrimalDualPoint resolvent_Bi_quadratic(const PrimalDualPoint& z, double gamma, Eigen::Index i,
                                                     const Eigen::Ref<const Vector>& anchor, double tol = 1e-12);

/// (proj_Q(x), proj onto {sum p = 1}). Independent of gamma.
[[nodiscard]] PrimalDualPoint resolvent_A1(const PrimalDualPoint& z, const FeasibleSet& q);

/// (x, min(p, caps)).
[[nodiscard]] PrimalDualPoint resolvent_A2(const PrimalDualPoint& z, const Vector& caps);

/// (x, proj onto {lower <= <values, p> <= upper}).
[[nodiscard]] PrimalDualPoint resolvent_A3(const PrimalDualPoint& z, const Vector& values, double lower,
                                           double upper);

}  // namespace dro
