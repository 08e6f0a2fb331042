#include "dro/problem.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace dro;

namespace {

ProblemInstance affine_instance(const Vector& c, const Matrix& slopes, const Vector& offsets, AmbiguitySet set,
                                FeasibleSet q = WholeSpace{}) {
  return {SmoothTerm::linear(c), AffineFamily(slopes, offsets), std::move(set), std::move(q)};
}

}  // namespace

TEST_SUITE("problem") {
  TEST_CASE("smooth terms") {
    const SmoothTerm quad = SmoothTerm::quadratic(Matrix{{2.0, 1.0}, {1.0, 2.0}});
    const Vector x{{1.0, -1.0}};
    CHECK(quad.value(x) == doctest::Approx(1.0));
    CHECK((quad.gradient(x) - Vector{{1.0, -1.0}}).norm() <= 1e-14);
    CHECK(quad.lipschitz() >= 3.0 - 1e-9);
    CHECK(quad.lipschitz() <= 3.0 + 1e-6);

    const SmoothTerm lin = SmoothTerm::linear(Vector{{0.5, 2.0}});
    CHECK(lin.is_linear());
    CHECK(lin.value(x) == doctest::Approx(-1.5));
    CHECK(lin.lipschitz() == 0.0);

    CHECK_THROWS_AS((void)SmoothTerm::quadratic(Matrix{{-1.0}}), PreconditionError);
    CHECK_THROWS_AS((void)SmoothTerm::linear(Vector()), PreconditionError);
  }

  TEST_CASE("objective_eval hand cases") {
    const Vector c{{1.0}};
    const Vector x{{2.0}};
    // f_i(x) = a_i x + offset_i
    const ProblemInstance single = affine_instance(c, Matrix{{1.0}}, Vector{{0.5}}, AmbiguitySet::full_simplex(1));
    CHECK(objective_eval(x, single) == doctest::Approx(2.0 + 2.5));

    // Unit slopes with offsets v - x give f(x) = v at x = 2.
    const auto at_two = [](Vector v) { return Vector(v.array() - 2.0); };
    const ProblemInstance three =
        affine_instance(c, Matrix::Ones(1, 3), at_two(Vector{{3.0, 1.0, 2.0}}), AmbiguitySet::full_simplex(3));
    CHECK(objective_eval(x, three) == doctest::Approx(2.0 + 3.0));

    const ProblemInstance capped =
        affine_instance(c, Matrix::Ones(1, 2), at_two(Vector{{2.0, 1.0}}), AmbiguitySet::capped(Vector{{0.6, 0.6}}));
    CHECK(objective_eval(x, capped) == doctest::Approx(2.0 + 0.6 * 2.0 + 0.4 * 1.0));

    // Moment box forces <(0, 1), p> <= 0.25, so the high-cost scenario gets at most 0.25.
    const ProblemInstance box = affine_instance(c, Matrix::Ones(1, 2), at_two(Vector{{1.0, 5.0}}),
                                                AmbiguitySet::moment_box(Vector{{0.0, 1.0}}, 0.0, 0.25));
    CHECK(objective_eval(x, box) == doctest::Approx(2.0 + 0.75 + 1.25));
  }

  TEST_CASE("worst_case matches vertex enumeration") {
    std::mt19937_64 rng(601);
    for (int trial = 0; trial < 200; ++trial) {
      const Eigen::Index n = 1 + trial % 5;
      const Vector costs = oracle::random_vector(rng, n, -3.0, 3.0);
      Vector caps = oracle::random_vector(rng, n, 0.2, 1.0);
      if (caps.sum() < 1.1) caps *= 1.1 / caps.sum();
      const Vector values = oracle::random_vector(rng, n, 0.0, 1.0);
      const double mid = 0.5 * (values.minCoeff() + values.maxCoeff());
      const std::pair<AmbiguitySet, oracle::Polytope> cases[] = {
          {AmbiguitySet::full_simplex(n), oracle::simplex_polytope(n)},
          {AmbiguitySet::capped(caps), oracle::capped_polytope(caps)},
          {AmbiguitySet::moment_box(values, mid - 0.05, mid + 0.05), oracle::moment_polytope(values, mid - 0.05, mid + 0.05)},
      };
      for (const auto& [set, poly] : cases) {
        const auto ref = oracle::enumerate_lp(-costs, poly);
        REQUIRE(ref.has_value());
        const WorstCase w = worst_case(costs, set);
        CHECK(std::abs(w.value + *ref) <= 1e-9);
        CHECK(set.violation(w.weights) <= 1e-9);
        CHECK(std::abs(costs.dot(w.weights) - w.value) <= 1e-9);
      }
    }
  }

  TEST_CASE("separable instances evaluate blockwise") {
    const ProblemInstance inst{SmoothTerm::quadratic(Matrix::Identity(1, 1)),
                               QuadraticAnchorFamily(Matrix{{0.0, 1.0}}), AmbiguitySet::full_simplex(2), WholeSpace{},
                               Subspace::Separable};
    const Matrix x{{1.0, 3.0}};
    CHECK(inst.blocks() == 2);
    CHECK((inst.scenario_costs(x) - Vector{{1.0, 4.0}}).norm() <= 1e-14);
    CHECK(inst.smooth_value(x) == doctest::Approx(5.0));
    CHECK(objective_eval(x, inst) == doctest::Approx(9.0));
    CHECK_THROWS_AS((void)inst.scenario_costs(Matrix::Zero(1, 1)), PreconditionError);
  }

  TEST_CASE("validation") {
    CHECK_THROWS_AS(affine_instance(Vector::Ones(2), Matrix::Ones(2, 3), Vector::Zero(3), AmbiguitySet::full_simplex(2))
                        .validate(),
                    PreconditionError);
    CHECK_THROWS_AS(affine_instance(Vector::Ones(3), Matrix::Ones(2, 2), Vector::Zero(2), AmbiguitySet::full_simplex(2))
                        .validate(),
                    PreconditionError);
    CHECK_THROWS_AS(affine_instance(Vector::Ones(2), Matrix::Ones(2, 2), Vector::Zero(2), AmbiguitySet::full_simplex(2),
                                    AffineSet(Matrix::Ones(1, 3), Vector::Ones(1)))
                        .validate(),
                    PreconditionError);
    // Box pinned to a vertex value admits no strictly positive point inside it.
    CHECK_THROWS_AS(affine_instance(Vector::Ones(1), Matrix::Ones(1, 2), Vector::Zero(2),
                                    AmbiguitySet::moment_box(Vector{{0.0, 1.0}}, 1.0, 1.0))
                        .validate(),
                    PreconditionError);
    CHECK_THROWS_AS((void)AffineFamily(Matrix::Zero(2, 2), Vector::Zero(2)), PreconditionError);
    CHECK_NOTHROW(affine_instance(Vector::Ones(2), Matrix::Ones(2, 2), Vector::Zero(2), AmbiguitySet::full_simplex(2))
                      .validate());
  }

  TEST_CASE("inclusion residual vanishes at a known solution") {
    // min_x x/2 + max(2x, 3 - x): kink at x = 1, where p = (1/6, 5/6) cancels the slope.
    const ProblemInstance inst =
        affine_instance(Vector{{0.5}}, Matrix{{2.0, -1.0}}, Vector{{0.0, 3.0}}, AmbiguitySet::full_simplex(2));
    const Vector p{{1.0 / 6.0, 5.0 / 6.0}};
    CHECK(inclusion_residual(Vector{{1.0}}, p, inst) <= 1e-12);
    CHECK(inclusion_residual(Vector{{0.0}}, p, inst) > 1e-3);
  }
}
