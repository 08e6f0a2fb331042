#include "dro/linalg.hpp"
#include "oracles.hpp"

#include <Eigen/Eigenvalues>
#include <doctest.h>

using namespace dro;

namespace {

Matrix random_spd(std::mt19937_64& rng, Eigen::Index n) {
  const Matrix g = oracle::random_matrix(rng, n, n);
  return g.transpose() * g + 0.1 * Matrix::Identity(n, n);
}

Matrix random_symmetric(std::mt19937_64& rng, Eigen::Index n) {
  const Matrix g = oracle::random_matrix(rng, n, n);
  return 0.5 * (g + g.transpose());
}

}  // namespace

TEST_SUITE("linalg") {
  TEST_CASE("chol_solve hand cases") {
    const SpdFactorization eye(Matrix::Identity(3, 3));
    const Vector r{{1.0, -2.0, 3.0}};
    CHECK((chol_solve(eye, r) - r).norm() == doctest::Approx(0.0));

    const SpdFactorization four(Matrix::Constant(1, 1, 4.0));
    CHECK(chol_solve(four, Vector::Constant(1, 8.0))(0) == doctest::Approx(2.0));
  }

  TEST_CASE("chol_solve residual on random SPD systems up to n = 200") {
    std::mt19937_64 rng(11);
    for (const Eigen::Index n : {1, 5, 17, 60, 200}) {
      const Matrix m = random_spd(rng, n);
      const SpdFactorization f(m);
      const Vector r = oracle::random_vector(rng, n);
      const Vector y = chol_solve(f, r);
      CHECK((m * y - r).norm() / r.norm() <= 1e-10);
      const Matrix l = f.factor();
      CHECK((l * l.transpose() - m).norm() / m.norm() <= 1e-10);
    }
  }

  TEST_CASE("factorization rejects bad sources") {
    CHECK_THROWS_AS(SpdFactorization(Matrix{{1.0, 2.0}, {0.0, 1.0}}), PreconditionError);
    CHECK_THROWS_AS(SpdFactorization(Matrix{{1.0, 2.0}, {2.0, 1.0}}), PreconditionError);
    CHECK_THROWS_AS(SpdFactorization(Matrix::Zero(2, 3)), PreconditionError);
    Matrix nan = Matrix::Identity(2, 2);
    nan(0, 0) = std::nan("");
    CHECK_THROWS_AS(SpdFactorization{nan}, PreconditionError);
    CHECK_THROWS_AS((void)chol_solve(SpdFactorization(Matrix::Identity(2, 2)), Vector::Ones(3)), PreconditionError);
  }

  TEST_CASE("sym_eig hand cases") {
    const SymmetricEigen d = sym_eig(Matrix{{1.0, 0.0}, {0.0, 2.0}});
    CHECK(d.values(0) == doctest::Approx(1.0));
    CHECK(d.values(1) == doctest::Approx(2.0));
    CHECK((d.vectors.cwiseAbs() - Matrix::Identity(2, 2)).norm() <= 1e-14);

    const SymmetricEigen swap = sym_eig(Matrix{{0.0, 1.0}, {1.0, 0.0}});
    CHECK(swap.values(0) == doctest::Approx(-1.0));
    CHECK(swap.values(1) == doctest::Approx(1.0));

    CHECK_THROWS_AS((void)sym_eig(Matrix{{0.0, 1.0}, {0.5, 0.0}}), PreconditionError);
  }

  TEST_CASE("sym_eig reconstructs random symmetric matrices and matches Eigen") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::Index n = 1 + trial % 12;
      const Matrix s = random_symmetric(rng, n);
      const SymmetricEigen e = sym_eig(s);
      const Matrix rebuilt = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
      CHECK((rebuilt - s).norm() / std::max(1.0, s.norm()) <= 1e-9);
      CHECK((e.vectors.transpose() * e.vectors - Matrix::Identity(n, n)).norm() <= 1e-10);
      for (Eigen::Index i = 1; i < n; ++i) CHECK(e.values(i - 1) <= e.values(i));
      const Eigen::SelfAdjointEigenSolver<Matrix> ref(s);
      CHECK((ref.eigenvalues() - e.values).norm() <= 1e-10);
    }
  }

  TEST_CASE("sqrt_psd") {
    const Matrix r = sqrt_psd(Matrix{{4.0, 0.0}, {0.0, 9.0}});
    CHECK((r - Matrix{{2.0, 0.0}, {0.0, 3.0}}).norm() <= 1e-12);
    CHECK(sqrt_psd(Matrix::Zero(3, 3)).norm() == 0.0);

    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
      const Matrix g = oracle::random_matrix(rng, 3, 7);
      const Matrix s = g.transpose() * g;  // rank 3, PSD 7x7
      const Matrix root = sqrt_psd(s);
      CHECK((root * root - s).norm() / s.norm() <= 1e-8);
      CHECK((root - root.transpose()).norm() <= 1e-12);
    }
    CHECK_THROWS_AS((void)sqrt_psd(Matrix{{1.0, 0.0}, {0.0, -1.0}}), PreconditionError);
  }

  TEST_CASE("op_norm") {
    CHECK(op_norm(Matrix{{3.0, 0.0}, {0.0, 1.0}}) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(op_norm(Matrix::Zero(4, 4)) == 0.0);
    CHECK(op_norm(Matrix{{1.0, -1.0}, {-1.0, 1.0}}) == doctest::Approx(2.0).epsilon(1e-10));  // ones in the kernel

    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 10; ++trial) {
      const Matrix s = oracle::random_matrix(rng, 10, 10);
      const double ref = Eigen::JacobiSVD<Matrix>(s).singularValues()(0);
      const double est = op_norm(s);
      CHECK(std::abs(est - ref) / ref <= 1e-5);
      for (int probe = 0; probe < 5; ++probe) {
        const Vector v = oracle::random_vector(rng, 10);
        CHECK(est >= (s * v).norm() / v.norm() - 1e-6);
      }
    }
  }
}
