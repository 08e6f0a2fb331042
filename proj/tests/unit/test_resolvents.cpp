#include "dro/resolvents.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace dro;

namespace {

PrimalDualPoint random_point(std::mt19937_64& rng, Eigen::Index n, Eigen::Index count) {
  return {oracle::random_vector(rng, n, -2.0, 2.0), oracle::random_vector(rng, count, -1.0, 1.0)};
}

bool firmly_nonexpansive(const PrimalDualPoint& tx, const PrimalDualPoint& ty, const PrimalDualPoint& x,
                         const PrimalDualPoint& y) {
  const PrimalDualPoint d = tx - ty;
  return d.squared_norm() <= d.dot(x - y) + 1e-10;
}

}  // namespace

TEST_SUITE("resolvents") {
  TEST_CASE("B_i affine branches") {
    const Vector a{{1.0, 2.0}};
    PrimalDualPoint z{Vector{{0.5, -1.0}}, Vector{{0.3, -0.2, 0.4}}};
    // s = p_1 + gamma (<a, x> + offset) = -0.2 + 1 * (-1.5 + 0.1) < 0
    const PrimalDualPoint low = resolvent_Bi_affine(z, 1.0, 1, a, 0.1);
    CHECK(low.x == z.x);
    CHECK(low.p(1) == 0.0);
    CHECK(low.p(0) == z.p(0));
    CHECK(low.p(2) == z.p(2));

    const PrimalDualPoint high = resolvent_Bi_affine(z, 0.5, 2, a, 3.0);
    const double s = 0.4 + 0.5 * (a.dot(z.x) + 3.0);
    const double w = s / (1.0 + 0.25 * a.squaredNorm());
    CHECK(high.p(2) == doctest::Approx(w).epsilon(1e-14));
    CHECK((high.x - (z.x - 0.5 * w * a)).norm() <= 1e-14);
  }

  TEST_CASE("B_i affine small step leaves x nearly fixed") {
    const Vector a{{1e-6, -1e-6}};
    const PrimalDualPoint z{Vector{{1.0, 1.0}}, Vector{{0.7, -0.3}}};
    const PrimalDualPoint pos = resolvent_Bi_affine(z, 1e-8, 0, a, 0.0);
    const PrimalDualPoint neg = resolvent_Bi_affine(z, 1e-8, 1, a, 0.0);
    CHECK((pos.x - z.x).norm() <= 1e-12);
    CHECK(pos.p(0) == doctest::Approx(0.7));
    CHECK(neg.p(1) == 0.0);
  }

  TEST_CASE("B_i affine inclusion membership") {
    std::mt19937_64 rng(401);
    for (int trial = 0; trial < 1000; ++trial) {
      const Eigen::Index n = 1 + trial % 4;
      const Eigen::Index count = 2 + trial % 3;
      const PrimalDualPoint z = random_point(rng, n, count);
      const Vector a = oracle::random_vector(rng, n);
      const double offset = oracle::random_vector(rng, 1)(0);
      const double gamma = std::pow(10.0, oracle::random_vector(rng, 1, -2.0, 1.0)(0));
      const Eigen::Index i = trial % count;
      const PrimalDualPoint out = resolvent_Bi_affine(z, gamma, i, a, offset);
      const double w = out.p(i);
      CHECK(w >= 0.0);
      for (Eigen::Index j = 0; j < count; ++j)
        if (j != i) CHECK(out.p(j) == z.p(j));
      const double f = a.dot(out.x) + offset;
      double res = (z.x - out.x - gamma * w * a).norm();
      // Weight block of B_i is the normal cone of [0, inf) minus f: p_i - w in gamma (N(w) - f).
      if (w > 0.0) res = std::max(res, std::abs(z.p(i) - w + gamma * f));
      else res = std::max(res, std::max(0.0, z.p(i) + gamma * f));
      CHECK(res <= 1e-10);
    }
  }

  TEST_CASE("B_i affine is continuous across the branch boundary") {
    const Vector a{{0.8, -0.6}};
    const Vector x{{0.4, 0.1}};
    const double gamma = 0.7;
    const double offset = 0.2;
    const double base = -gamma * (a.dot(x) + offset);
    const PrimalDualPoint lo = resolvent_Bi_affine({x, Vector::Constant(1, base - 1e-9)}, gamma, 0, a, offset);
    const PrimalDualPoint hi = resolvent_Bi_affine({x, Vector::Constant(1, base + 1e-9)}, gamma, 0, a, offset);
    CHECK((lo - hi).norm() <= 1e-6);
  }

  TEST_CASE("B_i quadratic trivial cases") {
    const Vector anchor{{1.0, -1.0}};
    const PrimalDualPoint neg = resolvent_Bi_quadratic({anchor, Vector{{-0.3}}}, 0.5, 0, anchor);
    CHECK(neg.p(0) == 0.0);
    CHECK(neg.x == anchor);
    const PrimalDualPoint pos = resolvent_Bi_quadratic({anchor, Vector{{0.3}}}, 0.5, 0, anchor);
    CHECK(pos.p(0) == doctest::Approx(0.3));
    CHECK((pos.x - anchor).norm() <= 1e-14);
  }

  TEST_CASE("B_i quadratic scalar equation and inclusion") {
    std::mt19937_64 rng(402);
    for (int trial = 0; trial < 500; ++trial) {
      const Eigen::Index n = 1 + trial % 3;
      const PrimalDualPoint z = random_point(rng, n, 2);
      const Vector anchor = oracle::random_vector(rng, n);
      const double gamma = std::pow(10.0, oracle::random_vector(rng, 1, -2.0, 1.0)(0));
      const PrimalDualPoint out = resolvent_Bi_quadratic(z, gamma, 1, anchor);
      const double w = out.p(1);
      const double fx = (z.x - anchor).squaredNorm();
      CHECK(w >= 0.0);
      CHECK(out.p(0) == z.p(0));
      if (z.p(1) + gamma * fx <= 0.0) {
        CHECK(w == 0.0);
        CHECK(out.x == z.x);
        continue;
      }
      const double denom = 1.0 + 2.0 * gamma * w;
      CHECK(std::abs(w - z.p(1) - gamma * fx / (denom * denom)) <= 1e-10);
      // x block: z.x = y + gamma w grad f(y), with y the returned point.
      CHECK((z.x - out.x - 2.0 * gamma * w * (out.x - anchor)).norm() <= 1e-10);
      // weight block: p - w = -gamma f(y).
      CHECK(std::abs(z.p(1) - w + gamma * (out.x - anchor).squaredNorm()) <= 1e-10);
    }
  }

  TEST_CASE("A_1, A_2, A_3 projections") {
    std::mt19937_64 rng(403);
    const Matrix a{{1.0, 1.0, 0.0}};
    const FeasibleSet q = AffineSet(a, Vector{{2.0}});
    for (int trial = 0; trial < 50; ++trial) {
      const PrimalDualPoint z = random_point(rng, 3, 4);
      const PrimalDualPoint one = resolvent_A1(z, q);
      CHECK(std::abs(one.x(0) + one.x(1) - 2.0) <= 1e-12);
      CHECK(std::abs(one.p.sum() - 1.0) <= 1e-12);
      CHECK((resolvent_A1(one, q) - one).norm() <= 1e-12);
      const PrimalDualPoint free = resolvent_A1(z, WholeSpace{});
      CHECK(free.x == z.x);

      const Vector caps = oracle::random_vector(rng, 4, 0.0, 0.5);
      const PrimalDualPoint two = resolvent_A2(z, caps);
      CHECK(two.x == z.x);
      CHECK((two.p - z.p.cwiseMin(caps)).norm() == 0.0);
      CHECK((resolvent_A2(two, caps) - two).norm() == 0.0);

      const Vector values = oracle::random_vector(rng, 4, 0.0, 1.0);
      const PrimalDualPoint three = resolvent_A3(z, values, -0.1, 0.2);
      CHECK(three.x == z.x);
      const double m = values.dot(three.p);
      CHECK(m >= -0.1 - 1e-12);
      CHECK(m <= 0.2 + 1e-12);
      CHECK((resolvent_A3(three, values, -0.1, 0.2) - three).norm() <= 1e-12);
    }
  }

  TEST_CASE("resolvents are firmly nonexpansive") {
    std::mt19937_64 rng(404);
    const FeasibleSet q = AffineSet(Matrix{{1.0, -1.0}}, Vector{{0.5}});
    for (int trial = 0; trial < 200; ++trial) {
      const PrimalDualPoint x = random_point(rng, 2, 3);
      const PrimalDualPoint y = random_point(rng, 2, 3);
      const Vector a = oracle::random_vector(rng, 2);
      const Vector anchor = oracle::random_vector(rng, 2);
      const Vector caps = oracle::random_vector(rng, 3, 0.0, 1.0);
      const Vector values = oracle::random_vector(rng, 3, 0.0, 1.0);
      const double gamma = 0.1 + 0.01 * trial;
      CHECK(firmly_nonexpansive(resolvent_Bi_affine(x, gamma, 1, a, 0.3), resolvent_Bi_affine(y, gamma, 1, a, 0.3), x, y));
      CHECK(firmly_nonexpansive(resolvent_Bi_quadratic(x, gamma, 2, anchor), resolvent_Bi_quadratic(y, gamma, 2, anchor),
                                x, y));
      CHECK(firmly_nonexpansive(resolvent_A1(x, q), resolvent_A1(y, q), x, y));
      CHECK(firmly_nonexpansive(resolvent_A2(x, caps), resolvent_A2(y, caps), x, y));
      CHECK(firmly_nonexpansive(resolvent_A3(x, values, 0.2, 0.6), resolvent_A3(y, values, 0.2, 0.6), x, y));
    }
  }
}
