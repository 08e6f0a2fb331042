#include "dro/solvers.hpp"

#include "dro/resolvents.hpp"

#include <cmath>
#include <limits>

namespace dro {

std::string_view solver_name(SolverKind k) {
  switch (k) {
    case SolverKind::ProxMax: return "prox_max";
    case SolverKind::DistributedFb: return "distributed_fb";
    case SolverKind::FbSubspaces: return "fb_subspaces";
    case SolverKind::DavisYin: return "davis_yin";
  }
  return "unknown";
}

SolverKind parse_solver(std::string_view name) {
  for (const SolverKind k : kAllSolvers)
    if (solver_name(k) == name) return k;
  throw PreconditionError("unknown solver '" + std::string(name) + "'");
}

StepSizes resolve_steps(SolverKind kind, const ProblemInstance& inst, const SolverConfig& cfg) {
  const double lip = inst.h.lipschitz();
  const double beta = lip > 0.0 ? 1.0 / lip : std::numeric_limits<double>::infinity();
  const bool flat = !std::isfinite(beta);
  const auto positive = [](std::optional<double> v, const char* what) {
    if (v && !(*v > 0.0 && std::isfinite(*v))) throw PreconditionError(std::string(what) + " must be finite and > 0");
  };
  positive(cfg.lambda, "lambda");
  positive(cfg.gamma, "gamma");
  if (!(cfg.tol > 0.0)) throw PreconditionError("tol must be > 0");
  if (cfg.max_iter < 1) throw PreconditionError("max_iter must be >= 1");

  StepSizes s;
  switch (kind) {
    case SolverKind::ProxMax: {
      s.lambda = cfg.lambda.value_or(flat ? 1.0 : beta);
      if (s.lambda >= 2.0 * beta) throw PreconditionError("prox_max: lambda must lie in (0, 2 beta)");
      const double bound = 1.0 / s.lambda - 1.0 / (2.0 * beta);
      s.gamma = cfg.gamma.value_or(0.99 * bound);
      if (s.gamma >= bound) throw PreconditionError("prox_max: gamma must be < 1/lambda - 1/(2 beta)");
      break;
    }
    case SolverKind::DistributedFb: {
      s.lambda = cfg.lambda.value_or(flat ? 1.0 : beta);
      if (s.lambda >= 2.0 * beta) throw PreconditionError("distributed_fb: lambda must lie in (0, 2 beta)");
      const double bound = 1.0 - s.lambda / (2.0 * beta);
      s.gamma = cfg.gamma.value_or(0.5 * bound);
      if (s.gamma >= bound) throw PreconditionError("distributed_fb: gamma must lie in (0, 1 - lambda/(2 beta))");
      break;
    }
    case SolverKind::FbSubspaces:
    case SolverKind::DavisYin: {
      s.lambda = cfg.lambda.value_or(0.0);
      s.gamma = cfg.gamma.value_or(flat ? 1.0 : beta);
      if (s.gamma >= 2.0 * beta) throw PreconditionError(std::string(solver_name(kind)) + ": gamma must lie in (0, 2 beta)");
      break;
    }
  }
  return s;
}

namespace {

// Operator view of an instance on H x R^N, where H = R^n (consensus) or R^{nN} (separable,
// blocks stacked column by column).
class Model {
 public:
  explicit Model(const ProblemInstance& inst) : inst_(inst) {
    inst.validate();
    if (std::holds_alternative<QuadFormFamily>(inst.family))
      throw PreconditionError("splitting solvers support affine and quadratic-anchor costs only");
    n_ = inst.dim();
    count_ = inst.scenarios();
    blocks_ = inst.blocks();
  }

  [[nodiscard]] Eigen::Index dim() const { return n_ * blocks_; }
  [[nodiscard]] Eigen::Index count() const { return count_; }
  [[nodiscard]] bool has_extra() const {
    return !std::holds_alternative<AmbiguitySet::FullSimplex>(inst_.ambiguity.variant());
  }

  [[nodiscard]] Vector gradient(const Vector& x) const {
    Vector g(x.size());
    for (Eigen::Index j = 0; j < blocks_; ++j) g.segment(j * n_, n_) = inst_.h.gradient(x.segment(j * n_, n_));
    return g;
  }

  [[nodiscard]] Vector project_q(const Vector& x) const {
    if (std::holds_alternative<WholeSpace>(inst_.feasible)) return x;
    Vector out(x.size());
    for (Eigen::Index j = 0; j < blocks_; ++j) out.segment(j * n_, n_) = project(inst_.feasible, x.segment(j * n_, n_));
    return out;
  }

  [[nodiscard]] PrimalDualPoint resolvent_b(const PrimalDualPoint& z, double gamma, Eigen::Index i) const {
    const Eigen::Index offset = blocks_ == 1 ? 0 : i * n_;
    const PrimalDualPoint local{z.x.segment(offset, n_), z.p};
    PrimalDualPoint r;
    if (const auto* f = std::get_if<AffineFamily>(&inst_.family)) {
      r = resolvent_Bi_affine(local, gamma, i, f->slopes.col(i), f->offsets(i));
    } else {
      r = resolvent_Bi_quadratic(local, gamma, i, std::get<QuadraticAnchorFamily>(inst_.family).anchors.col(i));
    }
    if (blocks_ == 1) return r;
    PrimalDualPoint out{z.x, std::move(r.p)};
    out.x.segment(offset, n_) = r.x;
    return out;
  }

  [[nodiscard]] PrimalDualPoint resolvent_a1(const PrimalDualPoint& z) const {
    return {project_q(z.x), proj_hyperplane_sum1(z.p)};
  }

  [[nodiscard]] PrimalDualPoint resolvent_extra(const PrimalDualPoint& z) const {
    if (const auto* c = std::get_if<AmbiguitySet::CappedSimplex>(&inst_.ambiguity.variant()))
      return resolvent_A2(z, c->caps);
    const auto& m = std::get<AmbiguitySet::MomentBox>(inst_.ambiguity.variant());
    return resolvent_A3(z, m.values, m.lower, m.upper);
  }

  [[nodiscard]] Matrix unstack(const Vector& x) const { return Eigen::Map<const Matrix>(x.data(), n_, blocks_); }

  [[nodiscard]] PrimalDualPoint start() const {
    return {Vector::Zero(dim()), Vector::Constant(count_, 1.0 / static_cast<double>(count_))};
  }

 private:
  const ProblemInstance& inst_;
  Eigen::Index n_ = 0;
  Eigen::Index count_ = 0;
  Eigen::Index blocks_ = 1;
};

PrimalDualPoint primal_shift(const Vector& g, double scale, Eigen::Index count) {
  return {scale * g, Vector::Zero(count)};
}

bool record(SolverReport& rep, double residual, double tol) {
  rep.residuals.push_back(residual);
  ++rep.iterations;
  if (!std::isfinite(residual)) return true;
  if (residual <= tol) {
    rep.converged = true;
    return true;
  }
  return false;
}

// The reported point is the final iterate projected onto Q (blockwise) and P; for a converged run the
// move is of the order of the stopping tolerance.
void finish(SolverReport& rep, SolverKind kind, const ProblemInstance& inst) {
  rep.solver = std::string(solver_name(kind));
  if (rep.x.allFinite() && rep.p.allFinite()) {
    for (Eigen::Index j = 0; j < rep.x.cols(); ++j) rep.x.col(j) = project(inst.feasible, rep.x.col(j));
    rep.p = proj_ambiguity(rep.p, inst.ambiguity);
  }
  rep.objective = rep.x.allFinite() ? objective_eval(rep.x, inst) : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

// ---------------------------------------------------------------------------

SolverReport prox_max_solve(const ProblemInstance& inst, const SolverConfig& cfg) {
  const Model model(inst);
  const StepSizes steps = resolve_steps(SolverKind::ProxMax, inst, cfg);
  const double lambda = steps.lambda;
  const double gamma = steps.gamma;
  const Eigen::Index n = inst.dim();
  const Eigen::Index count = inst.scenarios();
  const bool consensus = inst.subspace == Subspace::Consensus;

  const auto* affine = std::get_if<AffineFamily>(&inst.family);
  const auto* anchored = std::get_if<QuadraticAnchorFamily>(&inst.family);
  if (anchored != nullptr && model.has_extra())
    throw PreconditionError("prox_max: quadratic-anchor costs require the full simplex");

  // Blocks are the columns of n x N matrices; V is the diagonal (consensus) or everything (separable).
  const auto proj_v = [&](const Matrix& m) -> Matrix {
    if (!consensus) return m;
    const Vector mean = m.rowwise().mean();
    return mean.replicate(1, count);
  };
  const auto grad_big_h = [&](const Matrix& m) {
    Matrix g = Matrix::Zero(n, count);
    if (consensus) {
      g.col(0) = inst.h.gradient(m.col(0));
    } else {
      for (Eigen::Index j = 0; j < count; ++j) g.col(j) = inst.h.gradient(m.col(j));
    }
    return g;
  };
  Vector d;
  if (affine != nullptr) d = lambda * affine->slopes.colwise().squaredNorm().transpose();

  Matrix x = Matrix::Zero(n, count);
  Matrix x_bar = x;
  Matrix y = Matrix::Zero(n, count);
  Matrix u = Matrix::Zero(n, count);
  Vector p = Vector::Constant(count, 1.0 / static_cast<double>(count));

  SolverReport rep;
  for (int k = 0; k < cfg.max_iter; ++k) {
    Matrix u_next(n, count);
    for (Eigen::Index i = 0; i < count; ++i) {
      const Vector arg = u.col(i) / gamma + x_bar.col(i);
      u_next.col(i) = u.col(i) + gamma * x_bar.col(i) - gamma * project(inst.feasible, arg);
    }
    const Matrix z_bar = x + lambda * y - lambda * proj_v(u_next + grad_big_h(x));

    Matrix w(n, count);
    if (affine != nullptr) {
      const Vector beta = affine->slopes.cwiseProduct(z_bar).colwise().sum().transpose() + affine->offsets;
      p = solve_diag_qp(d, beta, inst.ambiguity);
      w = z_bar - lambda * affine->slopes * p.asDiagonal();
    } else {
      const Vector alpha = (z_bar - anchored->anchors).colwise().squaredNorm().transpose();
      p = solve_concave_allocation(alpha, lambda).weights;
      for (Eigen::Index i = 0; i < count; ++i) {
        const double t = 2.0 * lambda * p(i);
        w.col(i) = (z_bar.col(i) + t * anchored->anchors.col(i)) / (1.0 + t);
      }
    }
    const Matrix x_next = proj_v(w);
    const Matrix y_next = y + (x_next - w) / lambda;
    x_bar = 2.0 * x_next - x;

    const double residual =
        std::sqrt((u_next - u).squaredNorm() + (x_next - x).squaredNorm() + (y_next - y).squaredNorm());
    u = u_next;
    x = x_next;
    y = y_next;
    if (record(rep, residual, cfg.tol)) break;
  }

  rep.x = consensus ? Matrix(x.col(0)) : x;
  rep.p = p;
  finish(rep, SolverKind::ProxMax, inst);
  return rep;
}

// ---------------------------------------------------------------------------

SolverReport distributed_fb_solve(const ProblemInstance& inst, const SolverConfig& cfg) {
  const Model model(inst);
  const StepSizes steps = resolve_steps(SolverKind::DistributedFb, inst, cfg);
  const double lambda = steps.lambda;
  const double gamma = steps.gamma;
  const Eigen::Index count = model.count();
  const bool extra = model.has_extra();

  // Ring of resolvents: node 0 is A_1, then the P node when present, then B_1..B_N.
  const Eigen::Index first_b = extra ? 2 : 1;
  const Eigen::Index nodes = first_b + count;
  const Eigen::Index governed = nodes - 1;
  const auto apply = [&](Eigen::Index node, const PrimalDualPoint& arg) {
    if (node == 0) return model.resolvent_a1(arg);
    if (node < first_b) return model.resolvent_extra(arg);
    return model.resolvent_b(arg, lambda, node - first_b);
  };

  std::vector<PrimalDualPoint> gov(static_cast<std::size_t>(governed), model.start());
  std::vector<PrimalDualPoint> z(static_cast<std::size_t>(nodes));

  SolverReport rep;
  for (int k = 0; k < cfg.max_iter; ++k) {
    z[0] = apply(0, gov[0]);
    const PrimalDualPoint forward = primal_shift(model.gradient(z[0].x), lambda, count);
    for (Eigen::Index j = 1; j < nodes; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      PrimalDualPoint arg = (j < governed ? gov[ju] : z[0]) + z[ju - 1] - gov[ju - 1];
      if (j == 1) arg -= forward;
      z[ju] = apply(j, arg);
    }
    double sq = 0.0;
    for (std::size_t j = 0; j < gov.size(); ++j) {
      const PrimalDualPoint step = gamma * (z[j + 1] - z[j]);
      sq += step.squared_norm();
      gov[j] += step;
    }
    if (record(rep, std::sqrt(sq), cfg.tol)) break;
  }

  rep.x = model.unstack(z[0].x);
  rep.p = z[0].p;
  finish(rep, SolverKind::DistributedFb, inst);
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

// Product-space blocks: B_1..B_N, A_1, then the P block when present.
struct ProductBlocks {
  const Model& model;
  Eigen::Index count;
  Eigen::Index total;

  explicit ProductBlocks(const Model& m)
      : model(m), count(m.count()), total(m.count() + (m.has_extra() ? 2 : 1)) {}

  [[nodiscard]] PrimalDualPoint apply(Eigen::Index b, const PrimalDualPoint& arg, double gamma) const {
    if (b < count) return model.resolvent_b(arg, gamma, b);
    if (b == count) return model.resolvent_a1(arg);
    return model.resolvent_extra(arg);
  }
};

PrimalDualPoint block_mean(const std::vector<PrimalDualPoint>& blocks) {
  PrimalDualPoint m = blocks.front();
  for (std::size_t i = 1; i < blocks.size(); ++i) m += blocks[i];
  m *= 1.0 / static_cast<double>(blocks.size());
  return m;
}

}  // namespace

SolverReport fb_subspaces_solve(const ProblemInstance& inst, const SolverConfig& cfg,
                                const std::vector<PrimalDualPoint>& dual_start) {
  const Model model(inst);
  const StepSizes steps = resolve_steps(SolverKind::FbSubspaces, inst, cfg);
  const double gamma = steps.gamma;
  const ProductBlocks blocks(model);
  const auto total = static_cast<std::size_t>(blocks.total);

  std::vector<PrimalDualPoint> dual;
  if (dual_start.empty()) {
    dual.assign(total, PrimalDualPoint{Vector::Zero(model.dim()), Vector::Zero(model.count())});
  } else {
    if (dual_start.size() != total) throw PreconditionError("fb_subspaces: dual start needs one entry per block");
    double scale = 1.0;
    for (const auto& b : dual_start) {
      if (b.x.size() != model.dim() || b.p.size() != model.count())
        throw PreconditionError("fb_subspaces: dual start block has the wrong dimension");
      scale = std::max(scale, b.norm());
    }
    PrimalDualPoint sum = dual_start.front();
    for (std::size_t i = 1; i < total; ++i) sum += dual_start[i];
    if (sum.norm() > 1e-12 * scale) throw PreconditionError("fb_subspaces: dual start blocks must sum to zero");
    dual = dual_start;
  }

  PrimalDualPoint z = model.start();
  std::vector<PrimalDualPoint> trial(total);
  const double share = gamma / static_cast<double>(total);

  SolverReport rep;
  for (int k = 0; k < cfg.max_iter; ++k) {
    const PrimalDualPoint forward = primal_shift(model.gradient(z.x), share, model.count());
    for (std::size_t b = 0; b < total; ++b)
      trial[b] = blocks.apply(static_cast<Eigen::Index>(b), z + gamma * dual[b] - forward, gamma);
    const PrimalDualPoint z_next = block_mean(trial);
    double sq = static_cast<double>(total) * (z_next - z).squared_norm();
    for (std::size_t b = 0; b < total; ++b) {
      const PrimalDualPoint step = (1.0 / gamma) * (z_next - trial[b]);
      sq += step.squared_norm();
      dual[b] += step;
    }
    z = z_next;
    if (record(rep, std::sqrt(sq), cfg.tol)) break;
  }

  rep.x = model.unstack(z.x);
  rep.p = z.p;
  finish(rep, SolverKind::FbSubspaces, inst);
  return rep;
}

// ---------------------------------------------------------------------------

SolverReport davis_yin_solve(const ProblemInstance& inst, const SolverConfig& cfg) {
  const Model model(inst);
  const StepSizes steps = resolve_steps(SolverKind::DavisYin, inst, cfg);
  const double gamma = steps.gamma;
  const ProductBlocks blocks(model);
  const auto total = static_cast<std::size_t>(blocks.total);

  std::vector<PrimalDualPoint> z(total, model.start());
  std::vector<PrimalDualPoint> trial(total);
  PrimalDualPoint z_bar = block_mean(z);

  SolverReport rep;
  for (int k = 0; k < cfg.max_iter; ++k) {
    for (std::size_t b = 0; b < total; ++b) {
      PrimalDualPoint arg = 2.0 * z_bar - z[b];
      if (b == 0) arg -= primal_shift(model.gradient(z_bar.x), gamma, model.count());
      trial[b] = blocks.apply(static_cast<Eigen::Index>(b), arg, gamma);
    }
    double sq = 0.0;
    for (std::size_t b = 0; b < total; ++b) {
      const PrimalDualPoint step = trial[b] - z_bar;
      sq += step.squared_norm();
      z[b] += step;
    }
    z_bar = block_mean(z);
    if (record(rep, std::sqrt(sq), cfg.tol)) break;
  }

  rep.x = model.unstack(z_bar.x);
  rep.p = z_bar.p;
  finish(rep, SolverKind::DavisYin, inst);
  return rep;
}

SolverReport solve(SolverKind kind, const ProblemInstance& inst, const SolverConfig& cfg) {
  switch (kind) {
    case SolverKind::ProxMax: return prox_max_solve(inst, cfg);
    case SolverKind::DistributedFb: return distributed_fb_solve(inst, cfg);
    case SolverKind::FbSubspaces: return fb_subspaces_solve(inst, cfg);
    case SolverKind::DavisYin: return davis_yin_solve(inst, cfg);
  }
  throw PreconditionError("unknown solver kind");
}

}  // namespace dro
