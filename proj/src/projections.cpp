#include "dro/projections.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace dro {

namespace {

std::vector<Eigen::Index> descending_order(const Vector& key) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(key.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index l, Eigen::Index r) { return key(l) > key(r); });
  return order;
}

void require_nonempty(const Vector& x, const char* what) {
  if (x.size() == 0) throw PreconditionError(std::string(what) + ": empty vector");
}

}  // namespace

// ---------------------------------------------------------------------------
// AmbiguitySet

AmbiguitySet AmbiguitySet::full_simplex(Eigen::Index n) {
  if (n < 1) throw PreconditionError("AmbiguitySet: need at least one scenario");
  return AmbiguitySet(n, FullSimplex{});
}

AmbiguitySet AmbiguitySet::capped(Vector caps) {
  require_nonempty(caps, "AmbiguitySet::capped");
  require_finite(caps, "AmbiguitySet::capped");
  const Eigen::Index n = caps.size();
  return AmbiguitySet(n, CappedSimplex{std::move(caps)});
}

AmbiguitySet AmbiguitySet::moment_box(Vector values, double lower, double upper) {
  require_nonempty(values, "AmbiguitySet::moment_box");
  require_finite(values, "AmbiguitySet::moment_box");
  if (!std::isfinite(lower) || !std::isfinite(upper) || lower > upper)
    throw PreconditionError("AmbiguitySet::moment_box: need finite lower <= upper");
  const Eigen::Index n = values.size();
  return AmbiguitySet(n, MomentBox{std::move(values), lower, upper});
}

std::string_view AmbiguitySet::kind() const {
  if (std::holds_alternative<FullSimplex>(v_)) return "simplex";
  if (std::holds_alternative<CappedSimplex>(v_)) return "capped";
  return "moment";
}

double AmbiguitySet::violation(const Vector& p) const {
  if (p.size() != n_) throw PreconditionError("AmbiguitySet::violation: dimension mismatch");
  double v = std::max(0.0, -p.minCoeff());
  v = std::max(v, std::abs(p.sum() - 1.0));
  if (const auto* c = std::get_if<CappedSimplex>(&v_)) {
    v = std::max(v, (p - c->caps).maxCoeff());
  } else if (const auto* m = std::get_if<MomentBox>(&v_)) {
    const double mean = m->values.dot(p);
    v = std::max({v, m->lower - mean, mean - m->upper});
  }
  return v;
}

// ---------------------------------------------------------------------------
// Feasible sets

AffineSet::AffineSet(Matrix a, Vector b) : a_(std::move(a)), b_(std::move(b)) {
  if (a_.rows() != b_.size()) throw PreconditionError("AffineSet: A and b row counts differ");
  if (a_.rows() == 0 || a_.cols() == 0) throw PreconditionError("AffineSet: empty constraint matrix");
  require_finite(a_, "AffineSet A");
  require_finite(b_, "AffineSet b");
  try {
    gram_ = std::make_shared<const SpdFactorization>(a_ * a_.transpose());
  } catch (const PreconditionError&) {
    throw PreconditionError("AffineSet: A A^T is singular (A must have full row rank)");
  }
}

Vector AffineSet::project(const Vector& x) const {
  if (x.size() != a_.cols()) throw PreconditionError("AffineSet::project: dimension mismatch");
  return x - a_.transpose() * gram_->solve(Vector(a_ * x - b_));
}

Vector project(const FeasibleSet& q, const Vector& x) {
  if (const auto* aff = std::get_if<AffineSet>(&q)) return aff->project(x);
  return x;
}

double feasibility_residual(const FeasibleSet& q, const Vector& x) {
  if (const auto* aff = std::get_if<AffineSet>(&q)) return aff->residual(x);
  return 0.0;
}

// ---------------------------------------------------------------------------
// Elementary projectors

Vector proj_hyperplane_sum1(const Vector& x) {
  require_nonempty(x, "proj_hyperplane_sum1");
  const double n = static_cast<double>(x.size());
  return x.array() + (1.0 - x.sum()) / n;
}

Vector proj_simplex(const Vector& x) {
  require_nonempty(x, "proj_simplex");
  const auto order = descending_order(x);
  double running = 0.0;
  double tau = 0.0;
  for (std::size_t j = 0; j < order.size(); ++j) {
    running += x(order[j]);
    const double candidate = (running - 1.0) / static_cast<double>(j + 1);
    if (x(order[j]) - candidate > 0.0) tau = candidate;
  }
  return (x.array() - tau).cwiseMax(0.0);
}

Vector proj_weighted_simplex(const Vector& x, const Vector& w) {
  require_nonempty(x, "proj_weighted_simplex");
  if (w.size() != x.size()) throw PreconditionError("proj_weighted_simplex: dimension mismatch");
  if (!(w.array() > 0.0).all() || !w.allFinite())
    throw PreconditionError("proj_weighted_simplex: weights must be positive");
  // q_i = max(x_i - tau c_i, 0) with c_i = 1/w_i; breakpoints at tau = x_i w_i.
  const Vector c = w.cwiseInverse();
  const Vector breaks = x.cwiseProduct(w);
  const auto order = descending_order(breaks);
  double cx = 0.0;
  double cc = 0.0;
  double tau = 0.0;
  for (const Eigen::Index i : order) {
    cx += c(i) * x(i);
    cc += c(i) * c(i);
    const double candidate = (cx - 1.0) / cc;
    if (breaks(i) > candidate) tau = candidate;
  }
  return (x - tau * c).cwiseMax(0.0);
}

Vector proj_upper_bounds(const Vector& x, const Vector& caps) {
  if (caps.size() != x.size()) throw PreconditionError("proj_upper_bounds: dimension mismatch");
  return x.cwiseMin(caps);
}

Vector proj_slab(const Vector& x, const Vector& xi, double lower, double upper) {
  if (xi.size() != x.size()) throw PreconditionError("proj_slab: dimension mismatch");
  const double nrm2 = xi.squaredNorm();
  if (nrm2 == 0.0) throw PreconditionError("proj_slab: normal vector must be nonzero");
  if (lower > upper) throw PreconditionError("proj_slab: lower bound exceeds upper bound");
  const double s = xi.dot(x);
  if (s > upper) return x - ((s - upper) / nrm2) * xi;
  if (s < lower) return x - ((s - lower) / nrm2) * xi;
  return x;
}

Vector proj_upper_bounds_on_hyperplane(const Vector& x, const Vector& w, const Vector& caps) {
  const Eigen::Index n = x.size();
  if (w.size() != n || caps.size() != n) throw PreconditionError("proj_upper_bounds_on_hyperplane: dimension mismatch");
  if (!(w.array() > 0.0).all()) throw PreconditionError("proj_upper_bounds_on_hyperplane: weights must be positive");
  double capped = w.dot(caps);
  if (capped < 1.0 - 1e-12) throw PreconditionError("proj_upper_bounds_on_hyperplane: empty intersection");

  // x_i(theta) = min(x_i - theta w_i, caps_i); coordinate i leaves its cap once theta passes its breakpoint.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const Vector brk = (x - caps).cwiseQuotient(w);
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return brk(a) < brk(b); });

  double free_x = 0.0;
  double free_w2 = 0.0;
  double theta = 0.0;
  bool found = false;
  for (const Eigen::Index i : order) {
    if (free_x - brk(i) * free_w2 + capped <= 1.0) {
      theta = free_w2 > 0.0 ? (free_x + capped - 1.0) / free_w2 : brk(i);
      found = true;
      break;
    }
    free_x += w(i) * x(i);
    free_w2 += w(i) * w(i);
    capped -= w(i) * caps(i);
  }
  if (!found) theta = (free_x - 1.0) / free_w2;
  return (x - theta * w).cwiseMin(caps);
}

Vector proj_slab_on_hyperplane(const Vector& x, const Vector& w, const Vector& xi, double lower, double upper) {
  if (w.size() != x.size() || xi.size() != x.size())
    throw PreconditionError("proj_slab_on_hyperplane: dimension mismatch");
  const double w2 = w.squaredNorm();
  if (w2 == 0.0) throw PreconditionError("proj_slab_on_hyperplane: hyperplane normal must be nonzero");
  const Vector on_plane = x + ((1.0 - w.dot(x)) / w2) * w;
  // On the hyperplane <xi, x> = <xi_perp, x> + shift with xi_perp orthogonal to w.
  const double shift = xi.dot(w) / w2;
  const Vector xi_perp = xi - shift * w;
  if (xi_perp.squaredNorm() <= 1e-24 * std::max(1.0, xi.squaredNorm())) {
    if (shift < lower - 1e-12 || shift > upper + 1e-12)
      throw PreconditionError("proj_slab_on_hyperplane: empty intersection");
    return on_plane;
  }
  return proj_slab(on_plane, xi_perp, lower - shift, upper - shift);
}

Vector proj_affine(const Vector& x, const Matrix& a, const Vector& b) { return AffineSet(a, b).project(x); }

std::vector<PrimalDualPoint> proj_diagonal_subspace(const std::vector<PrimalDualPoint>& z) {
  if (z.empty()) return {};
  PrimalDualPoint mean = z.front();
  for (std::size_t j = 1; j < z.size(); ++j) {
    if (z[j].x.size() != mean.x.size() || z[j].p.size() != mean.p.size())
      throw PreconditionError("proj_diagonal_subspace: blocks differ in shape");
    mean += z[j];
  }
  mean *= 1.0 / static_cast<double>(z.size());
  return std::vector<PrimalDualPoint>(z.size(), mean);
}

// ---------------------------------------------------------------------------
// Dykstra

DykstraResult dykstra(const Projector& proj_a, const Projector& proj_b, const Vector& x0, double tol,
                      int max_iter) {
  const double scale = std::max(1.0, x0.norm());
  Vector x = x0;
  Vector p = Vector::Zero(x0.size());
  Vector q = Vector::Zero(x0.size());
  DykstraResult out;
  for (int k = 1; k <= max_iter; ++k) {
    const Vector y = proj_a(x + p);
    p = x + p - y;
    Vector next = proj_b(y + q);
    q = y + q - next;
    const double step = (next - x).norm() + (y - next).norm();
    x = std::move(next);
    out.iterations = k;
    if (step <= tol * scale) {
      out.converged = true;
      break;
    }
  }
  out.point = std::move(x);
  return out;
}

Vector proj_ambiguity(const Vector& p, const AmbiguitySet& set, double tol, int max_iter) {
  if (p.size() != set.size()) throw PreconditionError("proj_ambiguity: dimension mismatch");
  const Projector simplex = [](const Vector& v) { return proj_simplex(v); };
  DykstraResult r;
  if (std::holds_alternative<AmbiguitySet::FullSimplex>(set.variant())) return proj_simplex(p);
  if (const auto* c = std::get_if<AmbiguitySet::CappedSimplex>(&set.variant())) {
    const Vector ones = Vector::Ones(p.size());
    r = dykstra([&](const Vector& v) { return proj_upper_bounds_on_hyperplane(v, ones, c->caps); }, simplex, p, tol,
                max_iter);
  } else {
    const auto& m = std::get<AmbiguitySet::MomentBox>(set.variant());
    const Vector ones = Vector::Ones(p.size());
    r = dykstra([&](const Vector& v) { return proj_slab_on_hyperplane(v, ones, m.values, m.lower, m.upper); },
                simplex, p, tol, max_iter);
  }
  if (!r.converged) throw ConvergenceError("proj_ambiguity: Dykstra did not converge", r.point, r.iterations);
  return r.point;
}

// ---------------------------------------------------------------------------
// Qualification

Qualification qualification_check(const AmbiguitySet& set) {
  const Eigen::Index n = set.size();
  const Vector uniform = Vector::Constant(n, 1.0 / static_cast<double>(n));

  if (std::holds_alternative<AmbiguitySet::FullSimplex>(set.variant())) return {true, uniform};

  if (const auto* c = std::get_if<AmbiguitySet::CappedSimplex>(&set.variant())) {
    if (c->caps.minCoeff() <= 0.0 || c->caps.sum() <= 1.0) return {false, Vector()};
    Vector w = c->caps / c->caps.sum();
    if ((w.array() <= 0.0).any() || (w.array() >= c->caps.array()).any()) return {false, Vector()};
    return {true, std::move(w)};
  }

  const auto& m = std::get<AmbiguitySet::MomentBox>(set.variant());
  Eigen::Index imin = 0;
  Eigen::Index imax = 0;
  const double lo_val = m.values.minCoeff(&imin);
  const double hi_val = m.values.maxCoeff(&imax);
  if (lo_val == hi_val) {
    if (m.lower < lo_val && lo_val < m.upper) return {true, uniform};
    return {false, Vector()};
  }
  const double a = std::max(lo_val, m.lower);
  const double b = std::min(hi_val, m.upper);
  if (!(a < b)) return {false, Vector()};

  // Blend the uniform point with a point on the segment between the two extreme vertices.
  const double target = 0.5 * (a + b);
  const double mean_uniform = m.values.dot(uniform);
  for (double theta = 0.5; theta > 1e-12; theta *= 0.5) {
    const double seg = (target - theta * mean_uniform) / (1.0 - theta);
    if (!(lo_val < seg && seg < hi_val)) continue;
    const double s = (seg - lo_val) / (hi_val - lo_val);
    Vector w = theta * uniform;
    w(imin) += (1.0 - theta) * (1.0 - s);
    w(imax) += (1.0 - theta) * s;
    const double mean = m.values.dot(w);
    if ((w.array() > 0.0).all() && m.lower < mean && mean < m.upper) return {true, std::move(w)};
  }
  return {false, Vector()};
}

}  // namespace dro
