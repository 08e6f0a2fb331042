#include "dro/problem.hpp"

#include "dro/lp.hpp"

#include <algorithm>
#include <numeric>

namespace dro {

SmoothTerm SmoothTerm::quadratic(Matrix m) {
  if (m.rows() == 0 || m.rows() != m.cols()) throw PreconditionError("SmoothTerm: M must be square and non-empty");
  require_finite(m, "SmoothTerm M");
  const SymmetricEigen eig = sym_eig(m);
  if (eig.values(0) < -1e-10 * std::max(1.0, eig.values.cwiseAbs().maxCoeff()))
    throw PreconditionError("SmoothTerm: M must be positive semidefinite");
  SmoothTerm t;
  t.linear_ = false;
  t.lipschitz_ = op_norm(m);
  t.hessian_ = std::move(m);
  return t;
}

SmoothTerm SmoothTerm::linear(Vector c) {
  if (c.size() == 0) throw PreconditionError("SmoothTerm: empty cost vector");
  require_finite(c, "SmoothTerm c");
  SmoothTerm t;
  t.linear_ = true;
  t.cost_ = std::move(c);
  return t;
}

double SmoothTerm::value(const Vector& x) const {
  return linear_ ? cost_.dot(x) : 0.5 * x.dot(hessian_ * x);
}

Vector SmoothTerm::gradient(const Vector& x) const {
  return linear_ ? cost_ : Vector(hessian_ * x);
}

// ---------------------------------------------------------------------------

void ProblemInstance::validate() const {
  const Eigen::Index n = dim();
  const Eigen::Index count = std::visit([](const auto& f) { return f.count(); }, family);
  const Eigen::Index fdim = std::visit([](const auto& f) { return f.dim(); }, family);
  if (count != scenarios()) throw PreconditionError("ProblemInstance: family and ambiguity set disagree on N");
  if (fdim != n) throw PreconditionError("ProblemInstance: family and smooth term disagree on n");
  if (const auto* q = std::get_if<AffineSet>(&feasible); q != nullptr && q->a().cols() != n)
    throw PreconditionError("ProblemInstance: feasible set has the wrong dimension");
  if (!qualification_check(ambiguity).qualified)
    throw PreconditionError("ProblemInstance: ambiguity set fails the qualification check");
}

Vector ProblemInstance::scenario_costs(const Matrix& x) const {
  const Eigen::Index nscen = scenarios();
  if (x.rows() != dim() || x.cols() != blocks()) throw PreconditionError("scenario_costs: dimension mismatch");
  require_finite(x, "scenario_costs x");
  const auto block = [&](Eigen::Index i) { return x.col(subspace == Subspace::Consensus ? 0 : i); };
  Vector out(nscen);
  for (Eigen::Index i = 0; i < nscen; ++i) {
    const Vector xi = block(i);
    out(i) = std::visit(
        [&](const auto& f) -> double {
          using F = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<F, AffineFamily>) {
            return f.slopes.col(i).dot(xi) + f.offsets(i);
          } else if constexpr (std::is_same_v<F, QuadraticAnchorFamily>) {
            return (xi - f.anchors.col(i)).squaredNorm();
          } else {
            return xi.dot(f.q * xi) + f.linear.col(i).dot(xi) + f.constants(i);
          }
        },
        family);
  }
  return out;
}

double ProblemInstance::smooth_value(const Matrix& x) const {
  double v = 0.0;
  for (Eigen::Index j = 0; j < x.cols(); ++j) v += h.value(x.col(j));
  return v;
}

// ---------------------------------------------------------------------------

WorstCase worst_case(const Vector& costs, const AmbiguitySet& set) {
  const Eigen::Index n = costs.size();
  if (n != set.size()) throw PreconditionError("worst_case: dimension mismatch");
  WorstCase out;
  out.weights = Vector::Zero(n);

  if (std::holds_alternative<AmbiguitySet::FullSimplex>(set.variant())) {
    Eigen::Index arg = 0;
    out.value = costs.maxCoeff(&arg);
    out.weights(arg) = 1.0;
    return out;
  }

  if (const auto* c = std::get_if<AmbiguitySet::CappedSimplex>(&set.variant())) {
    if (c->caps.sum() < 1.0 || (c->caps.array() < 0.0).any())
      throw PreconditionError("worst_case: capped simplex is empty");
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index l, Eigen::Index r) { return costs(l) > costs(r); });
    double left = 1.0;
    for (const Eigen::Index i : order) {
      const double take = std::min(left, c->caps(i));
      out.weights(i) = take;
      out.value += take * costs(i);
      left -= take;
      if (left <= 0.0) break;
    }
    return out;
  }

  const auto& m = std::get<AmbiguitySet::MomentBox>(set.variant());
  LinearProgram lp;
  lp.objective = -costs;
  lp.ineq.resize(2, n);
  lp.ineq.row(0) = m.values.transpose();
  lp.ineq.row(1) = -m.values.transpose();
  lp.ineq_rhs = Vector{{m.upper, -m.lower}};
  lp.eq = Matrix::Ones(1, n);
  lp.eq_rhs = Vector::Ones(1);
  lp.signs.assign(static_cast<std::size_t>(n), VarSign::NonNegative);
  const LpResult res = lp_solve(lp);
  if (res.status == LpStatus::Infeasible) throw PreconditionError("worst_case: moment box is empty");
  if (res.status != LpStatus::Optimal)
    throw std::runtime_error("worst_case: inner LP failed (" + std::string(to_string(res.status)) + ")");
  out.weights = res.solution;
  out.value = costs.dot(res.solution);
  return out;
}

double objective_eval(const Matrix& x, const ProblemInstance& inst) {
  return inst.smooth_value(x) + worst_case(inst.scenario_costs(x), inst.ambiguity).value;
}

double inclusion_residual(const Vector& x, const Vector& p, const ProblemInstance& inst) {
  const auto* fam = std::get_if<AffineFamily>(&inst.family);
  if (fam == nullptr || inst.subspace != Subspace::Consensus)
    throw PreconditionError("inclusion_residual: consensus problems with affine costs only");
  if (x.size() != inst.dim() || p.size() != inst.scenarios())
    throw PreconditionError("inclusion_residual: dimension mismatch");

  const Vector v = inst.h.gradient(x) + fam->slopes * p;
  double primal = v.norm();
  if (const auto* q = std::get_if<AffineSet>(&inst.feasible)) {
    primal = AffineSet(q->a(), Vector::Zero(q->a().rows())).project(v).norm();
  }
  const Vector f = inst.scenario_costs(x);
  const double dual = (p - proj_ambiguity(p + f, inst.ambiguity)).norm();
  return std::max({primal, dual, feasibility_residual(inst.feasible, x)});
}

}  // namespace dro
