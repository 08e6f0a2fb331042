#include "dro/apps.hpp"

#include "dro/dual_lp.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <random>
#include <thread>

namespace dro {

void CouetteSpec::validate() const {
  if (stresses.size() == 0) throw PreconditionError("CouetteSpec: no stress samples");
  require_finite(stresses, "CouetteSpec stresses");
  if ((stresses.array() <= 0.0).any()) throw PreconditionError("CouetteSpec: stresses must be positive");
  if (!(radius_ratio > 0.0 && radius_ratio < 1.0)) throw PreconditionError("CouetteSpec: radius ratio must lie in (0,1)");
  if (degree < 1) throw PreconditionError("CouetteSpec: degree must be >= 1");
  if (measurements.rows() != stresses.size() || measurements.cols() == 0)
    throw PreconditionError("CouetteSpec: measurements must be r x N with r = number of stresses");
  require_finite(measurements, "CouetteSpec measurements");
  if (!(regularization > 0.0) || !std::isfinite(regularization))
    throw PreconditionError("CouetteSpec: regularization must be > 0");
}

CouetteData couette_build(const CouetteSpec& spec) {
  spec.validate();
  const Eigen::Index r = spec.stresses.size();
  CouetteData out;
  out.a.resize(r, spec.degree);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (int j = 1; j <= spec.degree; ++j) {
      out.a(i, j - 1) = std::pow(spec.stresses(i), j) * (1.0 - std::pow(spec.radius_ratio, j)) / (2.0 * j);
    }
  }
  out.q = out.a.transpose() * out.a;
  out.linear = -2.0 * out.a.transpose() * spec.measurements;
  out.constants = spec.measurements.colwise().squaredNorm().transpose();
  return out;
}

QuadFormProxResult couette_solve(const CouetteSpec& spec, const AmbiguitySet& set, const QuadFormProxOptions& opts) {
  const CouetteData data = couette_build(spec);
  const QuadFormFamily family(data.q, data.linear, data.constants);
  return prox_sup_quadform(Vector::Zero(spec.degree), 1.0 / (2.0 * spec.regularization), family, set, opts);
}

// ---------------------------------------------------------------------------

void DenoiseSpec::validate() const {
  if (measurements.rows() < 2 || measurements.cols() == 0)
    throw PreconditionError("DenoiseSpec: need signals of length >= 2 and at least one measurement");
  require_finite(measurements, "DenoiseSpec measurements");
  if (!(regularization >= 0.0) || !std::isfinite(regularization))
    throw PreconditionError("DenoiseSpec: regularization must be >= 0");
}

Matrix forward_difference(Eigen::Index n) {
  if (n < 2) throw PreconditionError("forward_difference: n must be >= 2");
  Matrix l = Matrix::Zero(n - 1, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    l(i, i) = 1.0;
    l(i, i + 1) = -1.0;
  }
  return l;
}

ProblemInstance denoise_instance(const DenoiseSpec& spec) {
  spec.validate();
  const Eigen::Index n = spec.measurements.rows();
  const Matrix l = forward_difference(n);
  return ProblemInstance{SmoothTerm::quadratic(2.0 * spec.regularization * l.transpose() * l),
                         QuadraticAnchorFamily(spec.measurements),
                         AmbiguitySet::full_simplex(spec.measurements.cols()), WholeSpace{}, Subspace::Separable};
}

SolverReport denoise_solve(const DenoiseSpec& spec, const SolverConfig& cfg) {
  return prox_max_solve(denoise_instance(spec), cfg);
}

DenoiseSpec staircase_spec(Eigen::Index n, Eigen::Index count, double noise, double regularization,
                           std::uint64_t seed) {
  if (n < 2 || count < 1) throw PreconditionError("staircase_spec: need n >= 2 and count >= 1");
  static constexpr double kLevels[] = {0.0, 1.0, -0.5, 0.5};
  Vector clean(n);
  for (Eigen::Index i = 0; i < n; ++i) clean(i) = kLevels[static_cast<std::size_t>((4 * i) / n)];
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  DenoiseSpec spec;
  spec.regularization = regularization;
  spec.measurements.resize(n, count);
  for (Eigen::Index k = 0; k < count; ++k)
    for (Eigen::Index i = 0; i < n; ++i) spec.measurements(i, k) = clean(i) + noise * gauss(rng);
  return spec;
}

// ---------------------------------------------------------------------------

std::string_view to_string(SmoothVariant v) { return v == SmoothVariant::Quadratic ? "quadratic" : "linear"; }

std::string_view to_string(AmbiguityVariant v) {
  switch (v) {
    case AmbiguityVariant::Simplex: return "simplex";
    case AmbiguityVariant::Capped: return "capped";
    case AmbiguityVariant::Moment: return "moment";
  }
  return "unknown";
}

SmoothVariant parse_smooth_variant(std::string_view s) {
  if (s == "quadratic") return SmoothVariant::Quadratic;
  if (s == "linear") return SmoothVariant::Linear;
  throw PreconditionError("unknown smooth term '" + std::string(s) + "' (quadratic, linear)");
}

AmbiguityVariant parse_ambiguity_variant(std::string_view s) {
  if (s == "simplex") return AmbiguityVariant::Simplex;
  if (s == "capped") return AmbiguityVariant::Capped;
  if (s == "moment") return AmbiguityVariant::Moment;
  throw PreconditionError("unknown ambiguity set '" + std::string(s) + "' (simplex, capped, moment)");
}

ProblemInstance gen_instance(Eigen::Index n, Eigen::Index m, Eigen::Index count, SmoothVariant h, AmbiguityVariant p,
                             std::uint64_t seed) {
  if (n < 1 || m < 1 || count < 1) throw PreconditionError("gen_instance: dimensions must be positive");
  if (m != n) throw PreconditionError("gen_instance: the generator needs m == n");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto normal_matrix = [&](Eigen::Index r, Eigen::Index c) {
    Matrix out(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index j = 0; j < c; ++j) out(i, j) = gauss(rng);
    return out;
  };

  std::optional<AffineSet> feasible;
  for (int attempt = 0; attempt < 100 && !feasible; ++attempt) {
    try {
      feasible.emplace(normal_matrix(m, n), Vector::Zero(m));
    } catch (const PreconditionError&) {
    }
  }
  if (!feasible) throw std::runtime_error("gen_instance: could not draw a full-row-rank constraint matrix");
  const Matrix a = feasible->a();

  std::optional<SmoothTerm> smooth;
  if (h == SmoothVariant::Quadratic) {
    const Matrix g = normal_matrix(n, n);
    smooth = SmoothTerm::quadratic(g.transpose() * g + Matrix::Identity(n, n));
  } else {
    smooth = SmoothTerm::linear(normal_matrix(n, 1).col(0));
  }

  Matrix slopes(n, count);
  for (Eigen::Index i = 0; i < count; ++i) {
    do {
      slopes.col(i) = normal_matrix(n, 1).col(0);
    } while (slopes.col(i).squaredNorm() == 0.0);
  }
  Vector offsets(count);
  for (Eigen::Index i = 0; i < count; ++i) offsets(i) = unit(rng);
  const Vector x0 = normal_matrix(n, 1).col(0);
  const Vector b = a * x0;

  std::optional<AmbiguitySet> set;
  for (int attempt = 0; attempt < 100 && !set; ++attempt) {
    AmbiguitySet candidate = AmbiguitySet::full_simplex(count);
    if (p == AmbiguityVariant::Capped) {
      const double alpha = 0.1 + 0.8 * unit(rng);
      candidate = AmbiguitySet::capped(Vector::Constant(count, 1.0 / (static_cast<double>(count) * (1.0 - alpha))));
    } else if (p == AmbiguityVariant::Moment) {
      const double lower = 0.5 * unit(rng);
      const double upper = 0.5 + 0.5 * unit(rng);
      candidate = AmbiguitySet::moment_box(offsets, lower, upper);
    }
    if (qualification_check(candidate).qualified) set = std::move(candidate);
  }
  if (!set) throw std::runtime_error("gen_instance: 100 consecutive qualification failures");

  return ProblemInstance{std::move(*smooth), AffineFamily(std::move(slopes), std::move(offsets)), std::move(*set),
                         AffineSet(a, b), Subspace::Consensus};
}

// ---------------------------------------------------------------------------

double relative_gap(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

void BenchPlan::validate() const {
  if (cells.empty()) throw PreconditionError("BenchPlan: no grid cells");
  for (const BenchCell& c : cells) {
    if (c.n < 1 || c.count < 1) throw PreconditionError("BenchPlan: cell dimensions must be positive");
    if (c.n != c.m) throw PreconditionError("BenchPlan: cells must have n = m");
  }
  if (instances < 1) throw PreconditionError("BenchPlan: instance count must be >= 1");
  if (solvers.empty()) throw PreconditionError("BenchPlan: no solvers");
  for (const std::string& s : solvers)
    if (s != "dual_lp") (void)parse_solver(s);
  if (smooth.empty() || ambiguity.empty()) throw PreconditionError("BenchPlan: empty variant lists");
  if (!(tol > 0.0) || max_iter < 1) throw PreconditionError("BenchPlan: invalid stopping rule");
}

namespace {

struct Outcome {
  double seconds = 0.0;
  int iterations = 0;
  bool converged = false;
  double objective = 0.0;
  bool applicable = true;
};

Outcome run_one(const std::string& solver, const ProblemInstance& inst, const SolverConfig& cfg) {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  if (solver == "dual_lp") {
    if (!inst.h.is_linear()) {
      out.applicable = false;
      return out;
    }
    const LpResult res = lp_solve(build_dual_lp(inst));
    out.iterations = res.pivots;
    out.converged = res.status == LpStatus::Optimal;
    out.objective = res.optimum;
  } else {
    try {
      const SolverReport rep = solve(parse_solver(solver), inst, cfg);
      out.iterations = rep.iterations;
      out.converged = rep.converged;
      out.objective = rep.objective;
    } catch (const ConvergenceError&) {
      out.converged = false;
    }
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

unsigned pool_size() {
  if (const char* env = std::getenv("DRO_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

std::vector<BenchRow> bench_run(const BenchPlan& plan) {
  plan.validate();
  SolverConfig cfg;
  cfg.tol = plan.tol;
  cfg.max_iter = plan.max_iter;

  std::vector<BenchRow> rows;
  for (const BenchCell& cell : plan.cells) {
    for (const SmoothVariant hv : plan.smooth) {
      for (const AmbiguityVariant pv : plan.ambiguity) {
        std::vector<ProblemInstance> instances;
        instances.reserve(static_cast<std::size_t>(plan.instances));
        for (int k = 0; k < plan.instances; ++k)
          instances.push_back(gen_instance(cell.n, cell.m, cell.count, hv, pv, plan.seed + static_cast<std::uint64_t>(k)));

        const std::size_t ns = plan.solvers.size();
        const std::size_t tasks = ns * instances.size();
        std::vector<Outcome> results(tasks);
        std::atomic<std::size_t> next{0};
        const auto worker = [&] {
          for (std::size_t t = next++; t < tasks; t = next++) {
            const ProblemInstance local = instances[t / ns];
            results[t] = run_one(plan.solvers[t % ns], local, cfg);
          }
        };
        const unsigned threads = std::min<unsigned>(pool_size(), static_cast<unsigned>(tasks));
        std::vector<std::thread> pool;
        for (unsigned w = 1; w < threads; ++w) pool.emplace_back(worker);
        worker();
        for (std::thread& th : pool) th.join();

        for (std::size_t s = 0; s < ns; ++s) {
          BenchRow row;
          row.cell = cell;
          row.solver = plan.solvers[s];
          row.ambiguity = pv;
          row.smooth = hv;
          std::vector<double> times;
          int applicable = 0;
          int converged = 0;
          double iters = 0.0;
          for (std::size_t k = 0; k < instances.size(); ++k) {
            const Outcome& o = results[k * ns + s];
            if (!o.applicable) continue;
            ++applicable;
            times.push_back(o.seconds);
            iters += o.iterations;
            if (!o.converged) continue;
            ++converged;
            for (std::size_t t = 0; t < ns; ++t) {
              const Outcome& other = results[k * ns + t];
              if (t != s && other.applicable && other.converged)
                row.max_obj_gap = std::max(row.max_obj_gap, relative_gap(o.objective, other.objective));
            }
          }
          if (applicable == 0) continue;
          row.mean_iters = iters / applicable;
          row.conv_rate = static_cast<double>(converged) / applicable;
          double total = 0.0;
          for (const double t : times) total += t;
          row.mean_time_s = total / applicable;
          std::sort(times.begin(), times.end());
          const std::size_t mid = times.size() / 2;
          row.median_time_s = times.size() % 2 == 1 ? times[mid] : 0.5 * (times[mid - 1] + times[mid]);
          rows.push_back(std::move(row));
        }
      }
    }
  }
  return rows;
}

void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
  os << "n,m,N,solver,P,h,mean_time_s,mean_iters,conv_rate,max_obj_gap,median_time_s\n";
  char buf[512];
  for (const BenchRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%ld,%ld,%ld,%s,%s,%s,%.6g,%.10g,%.10g,%.6e,%.6g\n", static_cast<long>(r.cell.n),
                  static_cast<long>(r.cell.m), static_cast<long>(r.cell.count), r.solver.c_str(),
                  std::string(to_string(r.ambiguity)).c_str(), std::string(to_string(r.smooth)).c_str(),
                  r.mean_time_s, r.mean_iters, r.conv_rate, r.max_obj_gap, r.median_time_s);
    os << buf;
  }
}

}  // namespace dro
