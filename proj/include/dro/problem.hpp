#pragma once

#include "dro/linalg.hpp"
#include "dro/projections.hpp"
#include "dro/prox_sup.hpp"

#include <variant>

namespace dro {

/// Convex smooth term: 1/2 x^T M x (M symmetric PSD) or c^T x.
class SmoothTerm {
 public:
  static SmoothTerm quadratic(Matrix m);
  static SmoothTerm linear(Vector c);

  [[nodiscard]] bool is_linear() const { return linear_; }
  [[nodiscard]] Eigen::Index dim() const { return linear_ ? cost_.size() : hessian_.rows(); }
  [[nodiscard]] double value(const Vector& x) const;
  [[nodiscard]] Vector gradient(const Vector& x) const;
  /// Upper bound on the Lipschitz constant of the gradient; 0 for linear terms.
  [[nodiscard]] double lipschitz() const { return lipschitz_; }
  [[nodiscard]] const Matrix& hessian() const { return hessian_; }
  [[nodiscard]] const Vector& cost() const { return cost_; }

 private:
  SmoothTerm() = default;
  bool linear_ = false;
  Matrix hessian_;
  Vector cost_;
  double lipschitz_ = 0.0;
};

using CostFamily = std::variant<AffineFamily, QuadraticAnchorFamily, QuadFormFamily>;

/// How the N primal blocks are coupled.
///  Consensus: a single x in R^n shared by every scenario (blocks forced equal).
///  Separable: independent blocks x_1..x_N in R^n, scenario i sees only x_i, and the
///             smooth part is sum_j h(x_j).
enum class Subspace { Consensus, Separable };

struct ProblemInstance {
  SmoothTerm h;
  CostFamily family;
  AmbiguitySet ambiguity;
  FeasibleSet feasible = WholeSpace{};
  Subspace subspace = Subspace::Consensus;

  [[nodiscard]] Eigen::Index dim() const { return h.dim(); }
  [[nodiscard]] Eigen::Index scenarios() const { return ambiguity.size(); }
  [[nodiscard]] Eigen::Index blocks() const { return subspace == Subspace::Consensus ? 1 : scenarios(); }

  /// Dimension and qualification checks. Throws PreconditionError.
  void validate() const;

  /// (f_1(x_1), ..., f_N(x_N)); x is n x 1 for consensus problems and n x N otherwise.
  [[nodiscard]] Vector scenario_costs(const Matrix& x) const;
  [[nodiscard]] double smooth_value(const Matrix& x) const;
};

/// sup over P of <p, costs> together with a maximizer.
struct WorstCase {
  double value = 0.0;
  Vector weights;
};

/// Throws PreconditionError when P is empty (failed qualification).
[[nodiscard]] WorstCase worst_case(const Vector& costs, const AmbiguitySet& set);

[[nodiscard]] double objective_eval(const Matrix& x, const ProblemInstance& inst);

/// Natural residual of the optimality system at (x, p) for a consensus problem with affine costs:
/// max of the distance from -(grad h(x) + sum p_i a_i) to N_Q(x) and ||p - proj_P(p + f(x))||.
[[nodiscard]] double inclusion_residual(const Vector& x, const Vector& p, const ProblemInstance& inst);

}  // namespace dro
