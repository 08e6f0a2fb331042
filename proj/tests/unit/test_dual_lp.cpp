#include "dro/apps.hpp"
#include "dro/dual_lp.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace dro;

namespace {

ProblemInstance linear_instance(const Vector& c, const Matrix& slopes, const Vector& offsets, AmbiguitySet set,
                                FeasibleSet q) {
  return {SmoothTerm::linear(c), AffineFamily(slopes, offsets), std::move(set), std::move(q)};
}

double lp_optimum(const ProblemInstance& inst) {
  const LpResult r = lp_solve(build_dual_lp(inst));
  REQUIRE(r.status == LpStatus::Optimal);
  return r.optimum;
}

}  // namespace

TEST_SUITE("dual_lp") {
  TEST_CASE("forced primal point") {
    std::mt19937_64 rng(801);
    const Vector b = oracle::random_vector(rng, 2);
    const Vector c = oracle::random_vector(rng, 2);
    const FeasibleSet pin = AffineSet(Matrix::Identity(2, 2), b);

    const Matrix a1 = oracle::random_matrix(rng, 2, 1);
    const ProblemInstance one = linear_instance(c, a1, Vector{{0.4}}, AmbiguitySet::full_simplex(1), pin);
    CHECK(lp_optimum(one) == doctest::Approx(c.dot(b) + a1.col(0).dot(b) + 0.4));

    // Unit slopes with offsets chosen so that f at the forced x is (3, 1).
    const Matrix ones = Matrix::Ones(2, 2);
    const Vector f31 = Vector{{3.0, 1.0}} - Vector::Constant(2, b.sum());
    const ProblemInstance two = linear_instance(c, ones, f31, AmbiguitySet::full_simplex(2), pin);
    CHECK(lp_optimum(two) == doctest::Approx(c.dot(b) + 3.0));

    const ProblemInstance caps_loose =
        linear_instance(c, ones, f31, AmbiguitySet::capped(Vector::Ones(2)), pin);
    CHECK(lp_optimum(caps_loose) == doctest::Approx(c.dot(b) + 3.0));
    const ProblemInstance caps_uniform =
        linear_instance(c, ones, f31, AmbiguitySet::capped(Vector::Constant(2, 0.6)), pin);
    CHECK(lp_optimum(caps_uniform) == doctest::Approx(c.dot(b) + 2.2));

    const Vector values{{0.2, 0.9}};
    const ProblemInstance box_loose =
        linear_instance(c, ones, f31, AmbiguitySet::moment_box(values, 0.2, 0.9), pin);
    CHECK(lp_optimum(box_loose) == doctest::Approx(c.dot(b) + 3.0));
  }

  TEST_CASE("builders reject mismatched instances") {
    const ProblemInstance quad = gen_instance(3, 3, 2, SmoothVariant::Quadratic, AmbiguityVariant::Simplex, 2);
    CHECK_THROWS_AS((void)build_dual_lp(quad), PreconditionError);
    const ProblemInstance lin = gen_instance(3, 3, 2, SmoothVariant::Linear, AmbiguityVariant::Simplex, 2);
    CHECK_THROWS_AS((void)build_dual_capped_case(lin), PreconditionError);
    CHECK_THROWS_AS((void)build_dual_momentbox_case(lin), PreconditionError);
    CHECK_NOTHROW((void)build_dual_simplex_case(lin));
  }

  TEST_CASE("weak and strong duality on random instances") {
    std::mt19937_64 rng(802);
    for (const AmbiguityVariant pv : {AmbiguityVariant::Simplex, AmbiguityVariant::Capped, AmbiguityVariant::Moment}) {
      for (std::uint64_t seed = 10; seed < 16; ++seed) {
        const ProblemInstance inst = gen_instance(6, 6, 4, SmoothVariant::Linear, pv, seed);
        const LpResult r = lp_solve(build_dual_lp(inst));
        REQUIRE(r.status == LpStatus::Optimal);
        const Vector x = dual_lp_primal(r, inst);
        CHECK(feasibility_residual(inst.feasible, x) <= 1e-8);
        CHECK(std::abs(r.optimum - objective_eval(x, inst)) <= 1e-6);
        // Any feasible point bounds the optimum from above.
        for (int k = 0; k < 10; ++k) {
          const Vector y = project(inst.feasible, oracle::random_vector(rng, 6, -3.0, 3.0));
          CHECK(r.optimum <= objective_eval(y, inst) + 1e-8);
        }
      }
    }
  }

  TEST_CASE("inactive moment slab reduces to the simplex case") {
    const ProblemInstance base = gen_instance(5, 5, 4, SmoothVariant::Linear, AmbiguityVariant::Moment, 21);
    const auto& box = std::get<AmbiguitySet::MomentBox>(base.ambiguity.variant());
    ProblemInstance wide = base;
    wide.ambiguity = AmbiguitySet::moment_box(box.values, box.values.minCoeff(), box.values.maxCoeff());
    ProblemInstance plain = base;
    plain.ambiguity = AmbiguitySet::full_simplex(4);
    CHECK(lp_optimum(wide) == doctest::Approx(lp_optimum(plain)).epsilon(1e-9));
  }
}
