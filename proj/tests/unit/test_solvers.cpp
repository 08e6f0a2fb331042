#include "dro/apps.hpp"
#include "dro/solvers.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace dro;

TEST_SUITE("solvers") {
  TEST_CASE("names round-trip") {
    for (const SolverKind k : kAllSolvers) CHECK(parse_solver(solver_name(k)) == k);
    CHECK_THROWS_AS((void)parse_solver("simplex"), PreconditionError);
  }

  TEST_CASE("step defaults and ranges") {
    const ProblemInstance quad = gen_instance(4, 4, 3, SmoothVariant::Quadratic, AmbiguityVariant::Simplex, 1);
    const double beta = 1.0 / quad.h.lipschitz();
    const StepSizes pm = resolve_steps(SolverKind::ProxMax, quad, {});
    CHECK(pm.lambda == doctest::Approx(beta));
    CHECK(pm.gamma == doctest::Approx(0.99 * (1.0 / beta - 0.5 / beta)));
    const StepSizes dfb = resolve_steps(SolverKind::DistributedFb, quad, {});
    CHECK(dfb.gamma == doctest::Approx(0.25));
    CHECK(resolve_steps(SolverKind::DavisYin, quad, {}).gamma == doctest::Approx(beta));

    SolverConfig big;
    big.lambda = 2.5 * beta;
    CHECK_THROWS_AS((void)resolve_steps(SolverKind::ProxMax, quad, big), PreconditionError);
    SolverConfig g;
    g.gamma = 2.0 * beta;
    CHECK_THROWS_AS((void)resolve_steps(SolverKind::FbSubspaces, quad, g), PreconditionError);
    g.gamma = -1.0;
    CHECK_THROWS_AS((void)resolve_steps(SolverKind::DavisYin, quad, g), PreconditionError);
    // Davis-Yin takes no lambda; passing one is accepted.
    SolverConfig lam;
    lam.lambda = 123.0;
    CHECK_NOTHROW((void)resolve_steps(SolverKind::DavisYin, quad, lam));

    const ProblemInstance lin = gen_instance(4, 4, 3, SmoothVariant::Linear, AmbiguityVariant::Simplex, 1);
    const StepSizes lf = resolve_steps(SolverKind::ProxMax, lin, {});
    CHECK(lf.lambda == 1.0);
    CHECK(resolve_steps(SolverKind::FbSubspaces, lin, {}).gamma == 1.0);
  }

  TEST_CASE("singleton feasible set pins x") {
    std::mt19937_64 rng(701);
    const Eigen::Index n = 3;
    const Vector b = oracle::random_vector(rng, n);
    for (const AmbiguitySet& set :
         {AmbiguitySet::full_simplex(3), AmbiguitySet::capped(Vector::Constant(3, 0.5)),
          AmbiguitySet::moment_box(Vector{{0.0, 0.5, 1.0}}, 0.3, 0.7)}) {
      const ProblemInstance inst{SmoothTerm::linear(oracle::random_vector(rng, n)),
                                 AffineFamily(oracle::random_matrix(rng, n, 3), oracle::random_vector(rng, 3)), set,
                                 AffineSet(Matrix::Identity(n, n), b)};
      for (const SolverKind k : kAllSolvers) {
        const SolverReport r = solve(k, inst);
        CAPTURE(solver_name(k));
        CHECK(r.converged);
        CHECK((r.x.col(0) - b).norm() <= 1e-4);
        CHECK(r.objective == doctest::Approx(objective_eval(b, inst)).epsilon(1e-4));
      }
    }
  }

  TEST_CASE("solvers agree on small random instances and report consistent state") {
    for (const AmbiguityVariant pv : {AmbiguityVariant::Simplex, AmbiguityVariant::Capped, AmbiguityVariant::Moment}) {
      for (const SmoothVariant hv : {SmoothVariant::Quadratic, SmoothVariant::Linear}) {
        const ProblemInstance inst = gen_instance(6, 6, 3, hv, pv, 42);
        std::vector<double> objectives;
        for (const SolverKind k : kAllSolvers) {
          const SolverReport r = solve(k, inst);
          CAPTURE(solver_name(k));
          CAPTURE(to_string(pv));
          CAPTURE(to_string(hv));
          REQUIRE(!r.residuals.empty());
          for (const double v : r.residuals) CHECK(std::isfinite(v));
          CHECK(r.converged == (r.residuals.back() <= 1e-5));
          CHECK(r.iterations == static_cast<int>(r.residuals.size()));
          CHECK(feasibility_residual(inst.feasible, r.x.col(0)) <= 1e-4);
          CHECK(inst.ambiguity.violation(r.p) <= 1e-4);
          CHECK(r.objective == doctest::Approx(objective_eval(r.x, inst)));
          if (r.converged) CHECK(inclusion_residual(r.x.col(0), r.p, inst) <= 1e-3);
          objectives.push_back(r.objective);
        }
        for (const double v : objectives) CHECK(relative_gap(v, objectives.front()) <= 1e-4);
      }
    }
  }

  TEST_CASE("fb_subspaces rejects unbalanced dual starts") {
    const ProblemInstance inst = gen_instance(3, 3, 2, SmoothVariant::Quadratic, AmbiguityVariant::Simplex, 5);
    // N resolvent blocks plus the A_1 block.
    std::vector<PrimalDualPoint> start(3, PrimalDualPoint{Vector::Zero(3), Vector::Zero(2)});
    CHECK_NOTHROW((void)fb_subspaces_solve(inst, {}, start));
    start[0].x(0) = 1.0;
    CHECK_THROWS_AS((void)fb_subspaces_solve(inst, {}, start), PreconditionError);
    start[1].x(0) = -1.0;
    CHECK_NOTHROW((void)fb_subspaces_solve(inst, {}, start));
    start.pop_back();
    CHECK_THROWS_AS((void)fb_subspaces_solve(inst, {}, start), PreconditionError);
  }

  TEST_CASE("quadratic-anchor costs") {
    const DenoiseSpec spec = staircase_spec(12, 3, 0.2, 0.5, 77);
    const ProblemInstance inst = denoise_instance(spec);
    const SolverReport pm = prox_max_solve(inst);
    const SolverReport fb = fb_subspaces_solve(inst);
    CHECK(pm.converged);
    CHECK(fb.converged);
    CHECK(relative_gap(pm.objective, fb.objective) <= 1e-4);

    ProblemInstance capped = inst;
    capped.ambiguity = AmbiguitySet::capped(Vector::Constant(3, 0.5));
    CHECK_THROWS_AS((void)prox_max_solve(capped), PreconditionError);
  }

  TEST_CASE("iteration cap reports non-convergence") {
    const ProblemInstance inst = gen_instance(5, 5, 3, SmoothVariant::Quadratic, AmbiguityVariant::Simplex, 3);
    SolverConfig cfg;
    cfg.max_iter = 2;
    for (const SolverKind k : kAllSolvers) {
      const SolverReport r = solve(k, inst, cfg);
      CHECK(!r.converged);
      CHECK(r.iterations == 2);
    }
  }
}
