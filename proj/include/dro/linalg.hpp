#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace dro {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Raised when an input violates a documented precondition.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Cholesky factorization of a symmetric positive-definite matrix.
///
/// Construction fails with PreconditionError when the source is not square,
/// not symmetric, or not numerically positive definite.
class SpdFactorization {
 public:
  explicit SpdFactorization(const Matrix& source);

  [[nodiscard]] Vector solve(const Vector& rhs) const;
  [[nodiscard]] Matrix solve(const Matrix& rhs) const;

  [[nodiscard]] const Matrix& source() const { return source_; }
  [[nodiscard]] Matrix factor() const { return llt_.matrixL(); }
  [[nodiscard]] Eigen::Index dim() const { return source_.rows(); }

 private:
  Matrix source_;
  Eigen::LLT<Matrix> llt_;
};

[[nodiscard]] Vector chol_solve(const SpdFactorization& fact, const Vector& rhs);

struct SymmetricEigen {
  Vector values;   // ascending
  Matrix vectors;  // columns are orthonormal eigenvectors
};

/// Cyclic Jacobi eigensolver. Input must be symmetric to 1e-12 (relative to its largest entry).
[[nodiscard]] SymmetricEigen sym_eig(const Matrix& s);

/// Symmetric PSD square root. Eigenvalues above -1e-10 * max|lambda| are clamped to zero.
[[nodiscard]] Matrix sqrt_psd(const Matrix& s);

/// Largest singular value by power iteration on S^T S, started from the normalized all-ones vector.
[[nodiscard]] double op_norm(const Matrix& s);

/// Throws PreconditionError unless every entry is finite.
void require_finite(const Matrix& m, const std::string& what);
void require_finite(const Vector& v, const std::string& what);

}  // namespace dro
