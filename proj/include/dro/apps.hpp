#pragma once

#include "dro/problem.hpp"
#include "dro/prox_sup.hpp"
#include "dro/solvers.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace dro {

// ---------------------------------------------------------------------------
// Couette inverse problem with the monomial basis e_j(t) = t^j, j = 1..degree.

struct CouetteSpec {
  Vector stresses;            // tau_1..tau_r > 0
  double radius_ratio = 0.5;  // in (0, 1)
  int degree = 1;
  Matrix measurements;        // r x N, column k is Omega^k
  double regularization = 1.0;

  void validate() const;
};

struct CouetteData {
  Matrix a;          // r x degree, A_ij = tau_i^j (1 - ratio^j) / (2 j)
  Matrix q;          // A^T A
  Matrix linear;     // degree x N, column k is -2 A^T Omega^k
  Vector constants;  // ||Omega^k||^2
};

[[nodiscard]] CouetteData couette_build(const CouetteSpec& spec);

/// Regularized worst-case least squares fit; returns the coefficient vector.
[[nodiscard]] QuadFormProxResult couette_solve(const CouetteSpec& spec, const AmbiguitySet& set,
                                               const QuadFormProxOptions& opts = {});

// ---------------------------------------------------------------------------
// Multi-signal denoising with squared forward-difference regularization.

struct DenoiseSpec {
  Matrix measurements;  // n x N, column i is b^i
  double regularization = 1.0;

  void validate() const;
};

/// (n-1) x n forward-difference matrix.
[[nodiscard]] Matrix forward_difference(Eigen::Index n);

/// Separable instance: h(x) = reg ||L x||^2 per block, f_i(x_i) = ||x_i - b^i||^2, full simplex.
[[nodiscard]] ProblemInstance denoise_instance(const DenoiseSpec& spec);

/// prox_max on the separable embedding; report x holds the N estimated signals as columns.
[[nodiscard]] SolverReport denoise_solve(const DenoiseSpec& spec, const SolverConfig& cfg = {});

/// Piecewise-constant signal of length n plus N independent Gaussian noise draws of size `noise`.
[[nodiscard]] DenoiseSpec staircase_spec(Eigen::Index n, Eigen::Index count, double noise, double regularization,
                                         std::uint64_t seed);

// ---------------------------------------------------------------------------
// Random instances.

enum class SmoothVariant { Quadratic, Linear };
enum class AmbiguityVariant { Simplex, Capped, Moment };

[[nodiscard]] std::string_view to_string(SmoothVariant v);
[[nodiscard]] std::string_view to_string(AmbiguityVariant v);
[[nodiscard]] SmoothVariant parse_smooth_variant(std::string_view s);
[[nodiscard]] AmbiguityVariant parse_ambiguity_variant(std::string_view s);

/// A, G, c, a_i, x0 standard normal; M = G^T G + I; xi_i ~ U[0,1]; b = A x0.
/// Moment box: values xi, lower ~ U[0, 1/2], upper ~ U[1/2, 1]. Capped: caps 1/(N(1 - alpha)), alpha ~ U[0.1, 0.9].
/// Bounds are redrawn until the set qualifies (at most 100 attempts). Deterministic in `seed`.
[[nodiscard]] ProblemInstance gen_instance(Eigen::Index n, Eigen::Index m, Eigen::Index count, SmoothVariant h,
                                           AmbiguityVariant p, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Benchmark harness.

struct BenchCell {
  Eigen::Index n = 20;
  Eigen::Index m = 20;
  Eigen::Index count = 5;
};

struct BenchPlan {
  std::vector<BenchCell> cells;
  int instances = 20;
  std::uint64_t seed = 0;
  std::vector<std::string> solvers;  // splitting solver names, plus "dual_lp" for linear h
  std::vector<SmoothVariant> smooth = {SmoothVariant::Quadratic};
  std::vector<AmbiguityVariant> ambiguity = {AmbiguityVariant::Simplex};
  double tol = 1e-5;
  int max_iter = 30000;

  void validate() const;
};

struct BenchRow {
  BenchCell cell;
  std::string solver;
  AmbiguityVariant ambiguity = AmbiguityVariant::Simplex;
  SmoothVariant smooth = SmoothVariant::Quadratic;
  double mean_time_s = 0.0;
  double mean_iters = 0.0;
  double conv_rate = 0.0;
  double max_obj_gap = 0.0;
  double median_time_s = 0.0;
};

/// Pool size comes from DRO_THREADS (default: hardware concurrency).
[[nodiscard]] std::vector<BenchRow> bench_run(const BenchPlan& plan);

/// Header: n,m,N,solver,P,h,mean_time_s,mean_iters,conv_rate,max_obj_gap,median_time_s
void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows);

/// |a - b| / max(1, |a|, |b|)
[[nodiscard]] double relative_gap(double a, double b);

}  // namespace dro
