#pragma once

#include "dro/linalg.hpp"
#include "dro/primal_dual.hpp"

#include <functional>
#include <memory>
#include <stdexcept>
#include <string_view>
#include <variant>
#include <vector>

namespace dro {

/// Raised when an inner iterative routine exhausts its iteration budget.
/// Carries the last iterate so callers can inspect or reuse it.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, Vector last, int iterations)
      : std::runtime_error(what), last_(std::move(last)), iterations_(iterations) {}

  [[nodiscard]] const Vector& last_iterate() const { return last_; }
  [[nodiscard]] int iterations() const { return iterations_; }

 private:
  Vector last_;
  int iterations_;
};

/// Closed convex subset of the probability simplex over which the adversary maximizes.
class AmbiguitySet {
 public:
  struct FullSimplex {};
  /// Delta_N intersected with p <= caps.
  struct CappedSimplex {
    Vector caps;
  };
  /// Delta_N intersected with lower <= <values, p> <= upper.
  struct MomentBox {
    Vector values;
    double lower;
    double upper;
  };
  using Variant = std::variant<FullSimplex, CappedSimplex, MomentBox>;

  static AmbiguitySet full_simplex(Eigen::Index n);
  static AmbiguitySet capped(Vector caps);
  static AmbiguitySet moment_box(Vector values, double lower, double upper);

  [[nodiscard]] Eigen::Index size() const { return n_; }
  [[nodiscard]] const Variant& variant() const { return v_; }
  [[nodiscard]] std::string_view kind() const;

  /// Largest constraint violation of p (simplex and extra constraints); zero when p is in the set.
  [[nodiscard]] double violation(const Vector& p) const;

 private:
  AmbiguitySet(Eigen::Index n, Variant v) : n_(n), v_(std::move(v)) {}
  Eigen::Index n_;
  Variant v_;
};

/// Affine set {x : A x = b}; A must have full row rank.
class AffineSet {
 public:
  AffineSet(Matrix a, Vector b);

  [[nodiscard]] Vector project(const Vector& x) const;
  [[nodiscard]] double residual(const Vector& x) const { return (a_ * x - b_).norm(); }
  [[nodiscard]] const Matrix& a() const { return a_; }
  [[nodiscard]] const Vector& b() const { return b_; }

 private:
  Matrix a_;
  Vector b_;
  std::shared_ptr<const SpdFactorization> gram_;  // A A^T
};

struct WholeSpace {};

/// Feasible set Q of the primal variable.
using FeasibleSet = std::variant<WholeSpace, AffineSet>;

[[nodiscard]] Vector project(const FeasibleSet& q, const Vector& x);
[[nodiscard]] double feasibility_residual(const FeasibleSet& q, const Vector& x);

[[nodiscard]] Vector proj_hyperplane_sum1(const Vector& x);
[[nodiscard]] Vector proj_simplex(const Vector& x);
/// Projection onto {q >= 0 : sum q_i / w_i = 1}.
[[nodiscard]] Vector proj_weighted_simplex(const Vector& x, const Vector& w);
[[nodiscard]] Vector proj_upper_bounds(const Vector& x, const Vector& caps);
/// Projection onto the slab {lower <= <xi, x> <= upper}.
[[nodiscard]] Vector proj_slab(const Vector& x, const Vector& xi, double lower, double upper);
/// Projection onto {<w, x> = 1, x <= caps} for w > 0; requires <w, caps> >= 1.
[[nodiscard]] Vector proj_upper_bounds_on_hyperplane(const Vector& x, const Vector& w, const Vector& caps);
/// Projection onto {<w, x> = 1, lower <= <xi, x> <= upper}. Empty intersections are rejected.
[[nodiscard]] Vector proj_slab_on_hyperplane(const Vector& x, const Vector& w, const Vector& xi, double lower,
                                             double upper);
[[nodiscard]] Vector proj_affine(const Vector& x, const Matrix& a, const Vector& b);

/// Replaces every block by the arithmetic mean of all blocks.
[[nodiscard]] std::vector<PrimalDualPoint> proj_diagonal_subspace(const std::vector<PrimalDualPoint>& z);

using Projector = std::function<Vector(const Vector&)>;

struct DykstraResult {
  Vector point;
  int iterations = 0;
  bool converged = false;
};

inline constexpr double kDykstraTol = 1e-10;
inline constexpr int kDykstraMaxIter = 10000;

/// Dykstra's alternating projections onto A then B, with correction terms starting at zero.
/// Stops once ||x_{k+1} - x_k|| + ||y_k - x_{k+1}|| <= tol * max(1, ||x0||).
/// The returned point lies in B.
[[nodiscard]] DykstraResult dykstra(const Projector& proj_a, const Projector& proj_b, const Vector& x0,
                                    double tol = kDykstraTol, int max_iter = kDykstraMaxIter);

/// Euclidean projection onto an ambiguity set. Throws ConvergenceError if Dykstra stalls.
[[nodiscard]] Vector proj_ambiguity(const Vector& p, const AmbiguitySet& set, double tol = kDykstraTol,
                                    int max_iter = kDykstraMaxIter);

struct Qualification {
  bool qualified = false;
  Vector witness;  // strictly positive point of P strictly inside the extra constraints, when qualified
};

/// Checks that some p > 0 in Delta_N strictly satisfies the set's extra constraints.
[[nodiscard]] Qualification qualification_check(const AmbiguitySet& set);

}  // namespace dro
