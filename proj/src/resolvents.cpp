#include "dro/resolvents.hpp"

#include <algorithm>
#include <cmath>

namespace dro {

namespace {

void check_block(const PrimalDualPoint& z, double gamma, Eigen::Index i, Eigen::Index dim, const char* what) {
  if (!(gamma > 0.0)) throw PreconditionError(std::string(what) + ": gamma must be > 0");
  if (i < 0 || i >= z.p.size()) throw PreconditionError(std::string(what) + ": scenario index out of range");
  if (z.x.size() != dim) throw PreconditionError(std::string(what) + ": dimension mismatch");
}

}  // namespace

PrimalDualPoint resolvent_Bi_affine(const PrimalDualPoint& z, double gamma, Eigen::Index i,
                                    const Eigen::Ref<const Vector>& a, double offset) {
  check_block(z, gamma, i, a.size(), "resolvent_Bi_affine");
  PrimalDualPoint out = z;
  const double s = z.p(i) + gamma * (a.dot(z.x) + offset);
  if (s <= 0.0) {
    out.p(i) = 0.0;
    return out;
  }
  const double w = s / (1.0 + gamma * gamma * a.squaredNorm());
  out.p(i) = w;
  out.x.noalias() -= (gamma * w) * a;
  return out;
}

PrimalDualPoint resolvent_Bi_quadratic(const PrimalDualPoint& z, double gamma, Eigen::Index i,
                                       const Eigen::Ref<const Vector>& anchor, double tol) {
  check_block(z, gamma, i, anchor.size(), "resolvent_Bi_quadratic");
  PrimalDualPoint out = z;
  const double alpha = (z.x - anchor).squaredNorm();
  const double top = z.p(i) + gamma * alpha;
  if (top <= 0.0) {
    out.p(i) = 0.0;
    return out;
  }

  // g(w) = w - p_i - gamma alpha / (1 + 2 gamma w)^2 is increasing, g(0) < 0 <= g(top).
  const auto g = [&](double w) {
    const double d = 1.0 + 2.0 * gamma * w;
    return w - z.p(i) - gamma * alpha / (d * d);
  };
  const auto dg = [&](double w) {
    const double d = 1.0 + 2.0 * gamma * w;
    return 1.0 + 4.0 * gamma * gamma * alpha / (d * d * d);
  };

  double lo = 0.0;
  double hi = top;
  double w = top;
  bool solved = false;
  for (int it = 0; it < 200; ++it) {
    const double gw = g(w);
    if (std::abs(gw) <= tol * std::max(1.0, top)) {
      solved = true;
      break;
    }
    if (gw < 0.0) lo = w; else hi = w;
    double next = w - gw / dg(w);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo <= 1e-16 * std::max(1.0, top)) {
      w = 0.5 * (lo + hi);
      solved = true;
      break;
    }
    w = next;
  }
  if (!solved) throw ConvergenceError("resolvent_Bi_quadratic: scalar root-finder failed", z.p, 200);

  const double t = 2.0 * gamma * w;
  out.p(i) = w;
  out.x = (z.x + t * anchor) / (1.0 + t);
  return out;
}

PrimalDualPoint resolvent_A1(const PrimalDualPoint& z, const FeasibleSet& q) {
  return {project(q, z.x), proj_hyperplane_sum1(z.p)};
}

PrimalDualPoint resolvent_A2(const PrimalDualPoint& z, const Vector& caps) {
  return {z.x, proj_upper_bounds(z.p, caps)};
}

PrimalDualPoint resolvent_A3(const PrimalDualPoint& z, const Vector& values, double lower, double upper) {
  return {z.x, proj_slab(z.p, values, lower, upper)};
}

}  // namespace dro
