#pragma once

#include "dro/linalg.hpp"
#include "dro/projections.hpp"

#include <optional>
#include <vector>

namespace dro {

/// f_i(x) = <a_i, x> + xi_i. Column i of `slopes` is a_i.
struct AffineFamily {
  Matrix slopes;
  Vector offsets;

  AffineFamily(Matrix slopes, Vector offsets);
  [[nodiscard]] Eigen::Index dim() const { return slopes.rows(); }
  [[nodiscard]] Eigen::Index count() const { return slopes.cols(); }
};

/// f_i(x) = ||x - xi_i||^2. Column i of `anchors` is xi_i.
struct QuadraticAnchorFamily {
  Matrix anchors;

  explicit QuadraticAnchorFamily(Matrix anchors);
  [[nodiscard]] Eigen::Index dim() const { return anchors.rows(); }
  [[nodiscard]] Eigen::Index count() const { return anchors.cols(); }
};

/// f_i(x) = <x, Q x> + <b_i, x> + c_i with Q symmetric PSD. Column i of `linear` is b_i.
struct QuadFormFamily {
  Matrix q;
  Matrix linear;
  Vector constants;

  QuadFormFamily(Matrix q, Matrix linear, Vector constants);
  [[nodiscard]] Eigen::Index dim() const { return q.rows(); }
  [[nodiscard]] Eigen::Index count() const { return linear.cols(); }
};

/// argmin_{p in P} 1/2 p^T diag(d) p - p^T beta, solved in the scaled variable q = sqrt(d) p.
[[nodiscard]] Vector solve_diag_qp(const Vector& d, const Vector& beta, const AmbiguitySet& set,
                                   double tol = kDykstraTol, int max_iter = kDykstraMaxIter);

/// Prox of x -> sup_{p in P} sum_i p_i f_i(x_i) for the affine family. Column i of `x` is block x_i.
[[nodiscard]] Matrix prox_sup_affine(const Matrix& x, double lambda, const AffineFamily& family,
                                     const AmbiguitySet& set);

/// Closed-form maximizer of sum_i alpha_i p_i / (1 + 2 lambda p_i) over the simplex,
/// together with the KKT multipliers certifying it.
struct AllocationSolution {
  Vector weights;
  double tau = 0.0;
  Vector mu;
  std::optional<Eigen::Index> cut;  // |A_k|; empty when alpha == 0 (every simplex point is optimal)
  double kkt_residual = 0.0;
};

[[nodiscard]] AllocationSolution solve_concave_allocation(const Vector& alpha, double lambda);

/// Max-norm residual of the stationarity, complementarity, sign and simplex conditions.
[[nodiscard]] double allocation_kkt_residual(const Vector& alpha, double lambda, const AllocationSolution& s);

/// Prox of x -> max_i ||x_i - xi_i||^2 (full simplex). Column i of `x` is block x_i.
[[nodiscard]] Matrix prox_sup_quadratic(const Matrix& x, double lambda, const QuadraticAnchorFamily& family);

struct QuadFormProxOptions {
  double tol = 1e-10;
  int max_iter = 200000;
  double sigma = 1.0;
  std::optional<double> tau;  // defaults to 0.9 / (sigma ||L||^2 + 1e-12)
};

struct QuadFormProxResult {
  Vector x;
  Vector weights;
  int iterations = 0;
  bool converged = false;
  std::vector<double> inner_objective;  // p^T gamma + <p, M p> along the iterates
};

/// Prox of x -> sup_{p in P} sum_i p_i (<x,Qx> + <b_i,x> + c_i) via a projected primal-dual loop on p.
[[nodiscard]] QuadFormProxResult prox_sup_quadform(const Vector& x, double lambda, const QuadFormFamily& family,
                                                   const AmbiguitySet& set, const QuadFormProxOptions& opts = {});

}  // namespace dro
