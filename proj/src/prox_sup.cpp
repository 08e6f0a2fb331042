#include "dro/prox_sup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

namespace dro {

namespace {

void require_positive(double lambda, const char* what) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw PreconditionError(std::string(what) + ": lambda must be > 0");
}

// KKT form of argmin 1/2 p^T diag(d) p - b^T p over {sum p = 1, 0 <= p <= caps}:
// p(theta) = clip((b - theta) / d, 0, caps) with sum p(theta) = 1, nonincreasing in theta.
Vector clipped_allocation(const Vector& d, const Vector& b, const Vector& caps) {
  const auto at = [&](double theta) { return ((b.array() - theta) / d.array()).max(0.0).min(caps.array()).matrix(); };
  double hi = b.maxCoeff();
  double lo = (b.array() - d.array() * caps.array().max(1.0)).minCoeff() - 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, std::abs(lo) + std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (at(mid).sum() > 1.0 ? lo : hi) = mid;
  }
  // Exact solve on the active pattern found by bisection.
  const double mid = 0.5 * (lo + hi);
  const Vector raw = (b.array() - mid) / d.array();
  double num = -1.0;
  double den = 0.0;
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    if (raw(i) >= caps(i)) {
      num += caps(i);
    } else if (raw(i) > 0.0) {
      num += b(i) / d(i);
      den += 1.0 / d(i);
    }
  }
  const double theta = den > 0.0 ? num / den : mid;
  return at(std::clamp(theta, lo, hi));
}

// Moment box: the slab multiplier eta shifts b by -eta * values; <values, p(eta)> is nonincreasing in eta.
Vector moment_allocation(const Vector& d, const Vector& b, const AmbiguitySet::MomentBox& m) {
  const Vector no_caps = Vector::Constant(b.size(), std::numeric_limits<double>::infinity());
  const auto at = [&](double eta) { return clipped_allocation(d, b - eta * m.values, no_caps); };
  Vector p = at(0.0);
  const double s0 = m.values.dot(p);
  if (s0 >= m.lower && s0 <= m.upper) return p;
  const double target = s0 > m.upper ? m.upper : m.lower;
  const double dir = s0 > m.upper ? 1.0 : -1.0;
  double inner = 0.0;
  double outer = dir;
  for (int it = 0; it < 200 && dir * (m.values.dot(at(outer)) - target) > 0.0; ++it) {
    inner = outer;
    outer *= 2.0;
  }
  for (int it = 0; it < 200 && std::abs(outer - inner) > 1e-16 * std::max(1.0, std::abs(outer)); ++it) {
    const double mid = 0.5 * (inner + outer);
    (dir * (m.values.dot(at(mid)) - target) > 0.0 ? inner : outer) = mid;
  }
  return at(0.5 * (inner + outer));
}

// Dykstra stops at ~tol in the scaled variable, which badly scaled D amplifies in p. Re-solve exactly on
// the active set read off the approximate point and keep the result only if it is a certified KKT point.
std::optional<Vector> solve_on_active_set(const Vector& d, const Vector& b, const AmbiguitySet& set,
                                          const Vector& fixed, std::optional<double> slab) {
  const Eigen::Index n = b.size();
  const auto* box = std::get_if<AmbiguitySet::MomentBox>(&set.variant());
  const auto value = [&](Eigen::Index i) { return box ? box->values(i) : 0.0; };

  // Free coordinates: p_i = (b_i - theta - eta v_i) / d_i with sum p = 1 and, if active, <v, p> = slab.
  double rest = 1.0;
  double moment_rest = slab.value_or(0.0);
  double k00 = 0.0, k01 = 0.0, k11 = 0.0, r0 = 0.0, r1 = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isnan(fixed(i))) {
      rest -= fixed(i);
      moment_rest -= value(i) * fixed(i);
      continue;
    }
    k00 += 1.0 / d(i);
    k01 += value(i) / d(i);
    k11 += value(i) * value(i) / d(i);
    r0 += b(i) / d(i);
    r1 += value(i) * b(i) / d(i);
  }
  if (k00 == 0.0) return std::nullopt;
  double theta = (r0 - rest) / k00;
  double eta = 0.0;
  if (slab) {
    const double det = k00 * k11 - k01 * k01;
    if (std::abs(det) <= 1e-14 * std::max(k00 * k11, k01 * k01)) return std::nullopt;
    theta = (k11 * (r0 - rest) - k01 * (r1 - moment_rest)) / det;
    eta = (k00 * (r1 - moment_rest) - k01 * (r0 - rest)) / det;
  }

  Vector p(n);
  for (Eigen::Index i = 0; i < n; ++i)
    p(i) = std::isnan(fixed(i)) ? (b(i) - theta - eta * value(i)) / d(i) : fixed(i);
  if (set.violation(p) > 1e-10) return std::nullopt;
  const double slack = 1e-12 * std::max(1.0, b.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::isnan(fixed(i))) continue;
    const double unclipped = b(i) - theta - eta * value(i);
    if (fixed(i) == 0.0 && unclipped > slack) return std::nullopt;
    if (fixed(i) != 0.0 && unclipped < d(i) * fixed(i) - slack) return std::nullopt;
  }
  if (slab && (*slab == box->upper ? eta < -slack : eta > slack)) return std::nullopt;
  return p;
}

Vector polish(const Vector& d, const Vector& b, const AmbiguitySet& set, const Vector& approx) {
  const Eigen::Index n = b.size();
  const double tight = 1e-7;
  const auto* capped = std::get_if<AmbiguitySet::CappedSimplex>(&set.variant());
  const auto* box = std::get_if<AmbiguitySet::MomentBox>(&set.variant());

  Vector fixed = Vector::Constant(n, std::numeric_limits<double>::quiet_NaN());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (approx(i) <= tight) fixed(i) = 0.0;
    else if (capped && approx(i) >= capped->caps(i) - tight) fixed(i) = capped->caps(i);
  }
  std::optional<double> slab;
  if (box) {
    const double s = box->values.dot(approx);
    if (s >= box->upper - tight) slab = box->upper;
    else if (s <= box->lower + tight) slab = box->lower;
  }
  if (auto p = solve_on_active_set(d, b, set, fixed, slab)) return *p;
  // A nearly tight slab may still be inactive at the solution.
  if (slab)
    if (auto p = solve_on_active_set(d, b, set, fixed, std::nullopt)) return *p;
  return approx;
}

}  // namespace

AffineFamily::AffineFamily(Matrix s, Vector o) : slopes(std::move(s)), offsets(std::move(o)) {
  if (slopes.cols() != offsets.size() || slopes.cols() == 0 || slopes.rows() == 0)
    throw PreconditionError("AffineFamily: need N >= 1 slopes and N offsets");
  require_finite(slopes, "AffineFamily slopes");
  require_finite(offsets, "AffineFamily offsets");
  if ((slopes.colwise().squaredNorm().array() == 0.0).any())
    throw PreconditionError("AffineFamily: every slope a_i must be nonzero");
}

QuadraticAnchorFamily::QuadraticAnchorFamily(Matrix a) : anchors(std::move(a)) {
  if (anchors.cols() == 0 || anchors.rows() == 0) throw PreconditionError("QuadraticAnchorFamily: empty anchors");
  require_finite(anchors, "QuadraticAnchorFamily anchors");
}

QuadFormFamily::QuadFormFamily(Matrix qm, Matrix l, Vector c)
    : q(std::move(qm)), linear(std::move(l)), constants(std::move(c)) {
  if (q.rows() != q.cols() || q.rows() != linear.rows() || linear.cols() != constants.size() ||
      constants.size() == 0)
    throw PreconditionError("QuadFormFamily: inconsistent dimensions");
  require_finite(q, "QuadFormFamily Q");
  require_finite(linear, "QuadFormFamily b");
  require_finite(constants, "QuadFormFamily c");
  const SymmetricEigen eig = sym_eig(q);  // also rejects asymmetric Q
  if (eig.values(0) < -1e-10 * std::max(1.0, eig.values.cwiseAbs().maxCoeff()))
    throw PreconditionError("QuadFormFamily: Q must be positive semidefinite");
}

// ---------------------------------------------------------------------------

Vector solve_diag_qp(const Vector& d, const Vector& beta, const AmbiguitySet& set, double tol, int max_iter) {
  if (d.size() != beta.size() || d.size() != set.size())
    throw PreconditionError("solve_diag_qp: dimension mismatch");
  if (!d.allFinite() || !(d.array() > 0.0).all())
    throw PreconditionError("solve_diag_qp: diagonal must be positive");
  require_finite(beta, "solve_diag_qp beta");

  const Vector r = d.cwiseSqrt();
  const Vector start = beta.cwiseQuotient(r);
  // R Delta_N = {q >= 0 : sum q_i / r_i = 1}
  const Projector scaled_simplex = [&](const Vector& v) { return proj_weighted_simplex(v, r); };

  if (std::holds_alternative<AmbiguitySet::FullSimplex>(set.variant()))
    return scaled_simplex(start).cwiseQuotient(r);

  DykstraResult res;
  if (const auto* c = std::get_if<AmbiguitySet::CappedSimplex>(&set.variant())) {
    const Vector scaled_caps = r.cwiseProduct(c->caps);
    const Vector plane = r.cwiseInverse();
    res = dykstra([&](const Vector& v) { return proj_upper_bounds_on_hyperplane(v, plane, scaled_caps); },
                  scaled_simplex, start, tol, max_iter);
  } else {
    const auto& m = std::get<AmbiguitySet::MomentBox>(set.variant());
    const Vector scaled_values = m.values.cwiseQuotient(r);
    const Vector plane = r.cwiseInverse();
    res = dykstra(
        [&](const Vector& v) { return proj_slab_on_hyperplane(v, plane, scaled_values, m.lower, m.upper); },
        scaled_simplex, start, tol, max_iter);
  }
  if (res.converged) return polish(d, beta, set, res.point.cwiseQuotient(r));

  // Badly scaled D makes the transformed sets meet at shallow angles; fall back to the exact KKT search.
  if (const auto* c = std::get_if<AmbiguitySet::CappedSimplex>(&set.variant()))
    return polish(d, beta, set, clipped_allocation(d, beta, c->caps));
  return polish(d, beta, set, moment_allocation(d, beta, std::get<AmbiguitySet::MomentBox>(set.variant())));
}

Matrix prox_sup_affine(const Matrix& x, double lambda, const AffineFamily& family, const AmbiguitySet& set) {
  require_positive(lambda, "prox_sup_affine");
  if (x.rows() != family.dim() || x.cols() != family.count() || set.size() != family.count())
    throw PreconditionError("prox_sup_affine: dimension mismatch");
  const Vector d = lambda * family.slopes.colwise().squaredNorm().transpose();
  const Vector beta = family.slopes.cwiseProduct(x).colwise().sum().transpose() + family.offsets;
  const Vector p = solve_diag_qp(d, beta, set);
  return x - lambda * family.slopes * p.asDiagonal();
}

// ---------------------------------------------------------------------------

AllocationSolution solve_concave_allocation(const Vector& alpha, double lambda) {
  require_positive(lambda, "solve_concave_allocation");
  if (alpha.size() == 0) throw PreconditionError("solve_concave_allocation: empty alpha");
  if (!alpha.allFinite() || (alpha.array() < 0.0).any())
    throw PreconditionError("solve_concave_allocation: alpha must be finite and nonnegative");

  const Eigen::Index n = alpha.size();
  const double nd = static_cast<double>(n);
  AllocationSolution sol;
  sol.mu = Vector::Zero(n);

  if (alpha.maxCoeff() == 0.0) {
    sol.weights = Vector::Constant(n, 1.0 / nd);
    return sol;
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index l, Eigen::Index r) { return alpha(l) < alpha(r); });

  // tail[i] = sum of sqrt(alpha) over indices outside A_i
  std::vector<double> tail(static_cast<std::size_t>(n) + 1, 0.0);
  for (Eigen::Index i = n - 1; i >= 0; --i)
    tail[static_cast<std::size_t>(i)] = tail[static_cast<std::size_t>(i) + 1] + std::sqrt(alpha(order[static_cast<std::size_t>(i)]));

  Eigen::Index k = n - 1;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double lead = (nd - static_cast<double>(i) + 2.0 * lambda) * std::sqrt(alpha(order[static_cast<std::size_t>(i)]));
    if (lead > tail[static_cast<std::size_t>(i)]) {
      k = i;
      break;
    }
  }

  const double rest = tail[static_cast<std::size_t>(k)];
  const double scale = nd - static_cast<double>(k) + 2.0 * lambda;
  sol.weights = Vector::Zero(n);
  for (Eigen::Index j = k; j < n; ++j) {
    const Eigen::Index i = order[static_cast<std::size_t>(j)];
    sol.weights(i) = std::max(0.0, (scale * std::sqrt(alpha(i)) / rest - 1.0) / (2.0 * lambda));
  }
  sol.tau = rest * rest / (scale * scale);
  for (Eigen::Index j = 0; j < k; ++j) {
    const Eigen::Index i = order[static_cast<std::size_t>(j)];
    sol.mu(i) = sol.tau - alpha(i);
  }
  sol.cut = k;
  sol.kkt_residual = allocation_kkt_residual(alpha, lambda, sol);
  return sol;
}

double allocation_kkt_residual(const Vector& alpha, double lambda, const AllocationSolution& s) {
  double r = std::abs(s.weights.sum() - 1.0);
  for (Eigen::Index i = 0; i < alpha.size(); ++i) {
    const double denom = 1.0 + 2.0 * lambda * s.weights(i);
    r = std::max({r, std::abs(-alpha(i) / (denom * denom) + s.tau - s.mu(i)), std::abs(s.mu(i) * s.weights(i)),
                  -s.weights(i), -s.mu(i)});
  }
  return r;
}

Matrix prox_sup_quadratic(const Matrix& x, double lambda, const QuadraticAnchorFamily& family) {
  require_positive(lambda, "prox_sup_quadratic");
  if (x.rows() != family.dim() || x.cols() != family.count())
    throw PreconditionError("prox_sup_quadratic: dimension mismatch");
  const Vector alpha = (x - family.anchors).colwise().squaredNorm().transpose();
  const Vector p = solve_concave_allocation(alpha, lambda).weights;
  Matrix out(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    const double t = 2.0 * lambda * p(i);
    out.col(i) = (x.col(i) + t * family.anchors.col(i)) / (1.0 + t);
  }
  return out;
}

// ---------------------------------------------------------------------------

QuadFormProxResult prox_sup_quadform(const Vector& x, double lambda, const QuadFormFamily& family,
                                     const AmbiguitySet& set, const QuadFormProxOptions& opts) {
  require_positive(lambda, "prox_sup_quadform");
  if (x.size() != family.dim() || set.size() != family.count())
    throw PreconditionError("prox_sup_quadform: dimension mismatch");
  if (!qualification_check(set).qualified)
    throw PreconditionError("prox_sup_quadform: ambiguity set fails the qualification check");

  const Eigen::Index n = family.dim();
  const Eigen::Index nscen = family.count();
  const Matrix& b = family.linear;

  const SpdFactorization resolvent(Matrix::Identity(n, n) + 2.0 * lambda * family.q);
  const Matrix cb = resolvent.solve(b);
  const Vector cx = resolvent.solve(x);

  Matrix m = lambda * (b.transpose() * cb - lambda * cb.transpose() * family.q * cb - 0.5 * cb.transpose() * cb);
  m = 0.5 * (m + m.transpose());
  const Vector gamma =
      b.transpose() * resolvent.solve(Vector(2.0 * lambda * family.q * cx - 2.0 * x + cx)) - family.constants;

  const Matrix l = sqrt_psd(m);
  const double lnorm = op_norm(l);
  const double sigma = opts.sigma;
  if (!(sigma > 0.0)) throw PreconditionError("prox_sup_quadform: sigma must be > 0");
  const double tau = opts.tau.value_or(0.9 / (sigma * lnorm * lnorm + 1e-12));
  if (!(tau > 0.0) || tau * sigma * lnorm * lnorm >= 1.0)
    throw PreconditionError("prox_sup_quadform: step sizes must satisfy tau * sigma * ||L||^2 < 1");

  QuadFormProxResult out;
  Vector p = Vector::Constant(nscen, 1.0 / static_cast<double>(nscen));
  Vector p_bar = p;
  Vector q = Vector::Zero(nscen);
  Vector u_prev = p;
  const double shrink = 2.0 / (sigma + 2.0);
  for (int k = 1; k <= opts.max_iter; ++k) {
    Vector q_next = shrink * (q + sigma * (l * p_bar));
    Vector u = p - tau * (l * q_next + gamma);
    Vector next = proj_ambiguity(u, set);
    p_bar = next + u - u_prev;  // extrapolate with unprojected points so fixed points are KKT points
    u_prev = std::move(u);
    // p alone can sit on a vertex for several steps while q is still moving.
    const double step = std::max((next - p).norm(), (q_next - q).norm());
    q = std::move(q_next);
    p = std::move(next);
    out.iterations = k;
    out.inner_objective.push_back(p.dot(gamma) + p.dot(m * p));
    if (step <= opts.tol) {
      out.converged = true;
      break;
    }
  }
  out.x = cx - lambda * (cb * p);
  out.weights = std::move(p);
  return out;
}

}  // namespace dro
