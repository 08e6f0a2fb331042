#include "dro/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace dro {

void require_finite(const Matrix& m, const std::string& what) {
  if (!m.allFinite()) throw PreconditionError(what + ": non-finite entry");
}

void require_finite(const Vector& v, const std::string& what) {
  if (!v.allFinite()) throw PreconditionError(what + ": non-finite entry");
}

namespace {

void require_symmetric(const Matrix& s, const char* what) {
  if (s.rows() != s.cols()) throw PreconditionError(std::string(what) + ": matrix is not square");
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw PreconditionError(std::string(what) + ": matrix is not symmetric");
}

}  // namespace

SpdFactorization::SpdFactorization(const Matrix& source) : source_(source) {
  require_finite(source_, "SpdFactorization");
  if (source_.rows() == 0) throw PreconditionError("SpdFactorization: empty matrix");
  require_symmetric(source_, "SpdFactorization");
  llt_.compute(source_);
  if (llt_.info() != Eigen::Success)
    throw PreconditionError("SpdFactorization: matrix is not positive definite");
  // LLT happily factors matrices that are singular to working precision.
  const Vector diag = Matrix(llt_.matrixL()).diagonal();
  if (diag.minCoeff() <= 1e-6 * diag.maxCoeff())  // pivot ratio squared is ~ 1 / condition number
    throw PreconditionError("SpdFactorization: matrix is numerically singular");
}

Vector SpdFactorization::solve(const Vector& rhs) const {
  if (rhs.size() != dim()) throw PreconditionError("chol_solve: dimension mismatch");
  return llt_.solve(rhs);
}

Matrix SpdFactorization::solve(const Matrix& rhs) const {
  if (rhs.rows() != dim()) throw PreconditionError("chol_solve: dimension mismatch");
  return llt_.solve(rhs);
}

Vector chol_solve(const SpdFactorization& fact, const Vector& rhs) { return fact.solve(rhs); }

SymmetricEigen sym_eig(const Matrix& s) {
  require_finite(s, "sym_eig");
  require_symmetric(s, "sym_eig");
  const Eigen::Index n = s.rows();
  Matrix a = 0.5 * (s + s.transpose());
  Matrix v = Matrix::Identity(n, n);

  const double frob = a.norm();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (std::sqrt(2.0 * off) <= 1e-15 * frob || off == 0.0) break;

    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index l, Eigen::Index r) { return a(l, l) < a(r, r); });

  SymmetricEigen out{Vector(n), Matrix(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = a(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]);
    out.vectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

Matrix sqrt_psd(const Matrix& s) {
  const SymmetricEigen eig = sym_eig(s);
  if (eig.values.size() == 0) return Matrix(0, 0);
  const double scale = eig.values.cwiseAbs().maxCoeff();
  if (eig.values(0) < -1e-10 * scale) throw PreconditionError("sqrt_psd: matrix is not positive semidefinite");
  const Vector roots = eig.values.cwiseMax(0.0).cwiseSqrt();
  Matrix r = eig.vectors * roots.asDiagonal() * eig.vectors.transpose();
  return 0.5 * (r + r.transpose());
}

double op_norm(const Matrix& s) {
  require_finite(s, "op_norm");
  if (s.size() == 0) return 0.0;
  const double biggest = s.cwiseAbs().maxCoeff();
  if (biggest == 0.0) return 0.0;

  const Matrix gram = s.transpose() * s;
  Vector v = Vector::Ones(s.cols()).normalized();
  Vector w = gram * v;
  if (w.norm() <= 1e-14 * gram.norm()) {
    // All-ones start is (numerically) in the kernel; restart on the heaviest column.
    Eigen::Index col = 0;
    s.colwise().norm().maxCoeff(&col);
    v.setZero();
    v(col) = 1.0;
    w = gram * v;
  }

  double estimate = v.dot(w);
  for (int it = 0; it < 100000; ++it) {
    const double wn = w.norm();
    if (wn == 0.0) break;
    v = w / wn;
    w = gram * v;
    const double next = v.dot(w);
    const bool done = std::abs(next - estimate) <= 1e-15 * next;
    estimate = next;
    if (done) break;
  }
  return std::sqrt(std::max(estimate, 0.0));
}

}  // namespace dro
