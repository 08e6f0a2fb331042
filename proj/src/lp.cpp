#include "dro/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace dro {

void LinearProgram::validate() const {
  const Eigen::Index n = objective.size();
  if (static_cast<Eigen::Index>(signs.size()) != n) throw PreconditionError("LinearProgram: signs size mismatch");
  if (ineq.rows() != ineq_rhs.size() || (ineq.rows() > 0 && ineq.cols() != n))
    throw PreconditionError("LinearProgram: inequality block has inconsistent dimensions");
  if (eq.rows() != eq_rhs.size() || (eq.rows() > 0 && eq.cols() != n))
    throw PreconditionError("LinearProgram: equality block has inconsistent dimensions");
  require_finite(objective, "LinearProgram objective");
  require_finite(ineq, "LinearProgram G");
  require_finite(ineq_rhs, "LinearProgram g");
  require_finite(eq, "LinearProgram A");
  require_finite(eq_rhs, "LinearProgram b");
}

std::string_view to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::NumericBreakdown: return "numeric_breakdown";
    case LpStatus::IterationLimit: return "iteration_limit";
  }
  return "unknown";
}

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-9;

struct Tableau {
  Matrix t;  // rows: constraints; last column: right-hand side
  Vector d;  // reduced costs; last entry: minus the objective value
  std::vector<Eigen::Index> basis;

  [[nodiscard]] Eigen::Index rhs() const { return t.cols() - 1; }

  void pivot(Eigen::Index r, Eigen::Index c) {
    t.row(r) /= t(r, c);
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
      if (i != r && t(i, c) != 0.0) t.row(i) -= t(i, c) * t.row(r);
    }
    d -= d(c) * t.row(r).transpose();
    basis[static_cast<std::size_t>(r)] = c;
  }
};

enum class Outcome { Optimal, Unbounded, Breakdown, Limit };

// Bland's rule: lowest-index improving column, lowest-index basic variable among ratio ties.
Outcome run_simplex(Tableau& tab, Eigen::Index usable, int& pivots, int max_pivots) {
  const Eigen::Index rhs = tab.rhs();
  while (true) {
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < usable; ++j) {
      if (tab.d(j) < -kCostTol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) return Outcome::Optimal;

    Eigen::Index leave = -1;
    double best = std::numeric_limits<double>::infinity();
    bool tiny = false;
    for (Eigen::Index i = 0; i < tab.t.rows(); ++i) {
      const double a = tab.t(i, enter);
      if (a > kPivotTol) {
        const double ratio = tab.t(i, rhs) / a;
        const double slack = 1e-12 * std::max(1.0, std::abs(best));
        if (leave < 0 || ratio < best - slack ||
            (ratio <= best + slack && tab.basis[static_cast<std::size_t>(i)] < tab.basis[static_cast<std::size_t>(leave)])) {
          if (leave < 0 || ratio < best - slack) best = ratio;
          leave = i;
        }
      } else if (a > 0.0) {
        tiny = true;
      }
    }
    if (leave < 0) return tiny ? Outcome::Breakdown : Outcome::Unbounded;
    if (pivots >= max_pivots) return Outcome::Limit;
    tab.pivot(leave, enter);
    ++pivots;
  }
}

LpStatus to_status(Outcome o) {
  switch (o) {
    case Outcome::Optimal: return LpStatus::Optimal;
    case Outcome::Unbounded: return LpStatus::Unbounded;
    case Outcome::Breakdown: return LpStatus::NumericBreakdown;
    case Outcome::Limit: return LpStatus::IterationLimit;
  }
  return LpStatus::NumericBreakdown;
}

}  // namespace

LpResult lp_solve(const LinearProgram& lp, int max_pivots) {
  lp.validate();
  const Eigen::Index nv = lp.num_vars();
  const Eigen::Index nin = lp.ineq.rows();
  const Eigen::Index neq = lp.eq.rows();
  const Eigen::Index m = nin + neq;

  // Standard-form columns: split variables, then one slack per inequality.
  std::vector<Eigen::Index> plus(static_cast<std::size_t>(nv));
  std::vector<Eigen::Index> minus(static_cast<std::size_t>(nv), -1);
  Eigen::Index ncol = 0;
  for (Eigen::Index j = 0; j < nv; ++j) {
    plus[static_cast<std::size_t>(j)] = ncol++;
    if (lp.signs[static_cast<std::size_t>(j)] == VarSign::Free) minus[static_cast<std::size_t>(j)] = ncol++;
  }
  const Eigen::Index nsplit = ncol;
  const Eigen::Index structural = nsplit + nin;

  Matrix rows = Matrix::Zero(m, structural);
  Vector rhs(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const bool is_ineq = i < nin;
    const auto coeffs = is_ineq ? lp.ineq.row(i) : lp.eq.row(i - nin);
    for (Eigen::Index j = 0; j < nv; ++j) {
      rows(i, plus[static_cast<std::size_t>(j)]) = coeffs(j);
      if (minus[static_cast<std::size_t>(j)] >= 0) rows(i, minus[static_cast<std::size_t>(j)]) = -coeffs(j);
    }
    if (is_ineq) rows(i, nsplit + i) = 1.0;
    rhs(i) = is_ineq ? lp.ineq_rhs(i) : lp.eq_rhs(i - nin);
    if (rhs(i) < 0.0) {
      rows.row(i) *= -1.0;
      rhs(i) = -rhs(i);
    }
  }

  // Rows whose slack kept a +1 start with the slack basic; the rest get an artificial.
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
  std::vector<Eigen::Index> needs_art;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (i < nin && rows(i, nsplit + i) > 0.0) {
      basis[static_cast<std::size_t>(i)] = nsplit + i;
    } else {
      needs_art.push_back(i);
    }
  }
  const Eigen::Index nart = static_cast<Eigen::Index>(needs_art.size());

  Tableau tab;
  tab.t = Matrix::Zero(m, structural + nart + 1);
  tab.t.leftCols(structural) = rows;
  tab.t.col(structural + nart) = rhs;
  for (Eigen::Index k = 0; k < nart; ++k) {
    const Eigen::Index i = needs_art[static_cast<std::size_t>(k)];
    tab.t(i, structural + k) = 1.0;
    basis[static_cast<std::size_t>(i)] = structural + k;
  }
  tab.basis = basis;

  LpResult out;
  int pivots = 0;

  // Phase 1: minimize the sum of artificials.
  tab.d = Vector::Zero(tab.t.cols());
  for (Eigen::Index k = 0; k < nart; ++k) tab.d(structural + k) = 1.0;
  for (const Eigen::Index i : needs_art) tab.d -= tab.t.row(i).transpose();
  if (nart > 0) {
    const Outcome o = run_simplex(tab, structural, pivots, max_pivots);
    if (o == Outcome::Breakdown || o == Outcome::Limit) {
      out.status = to_status(o);
      out.pivots = pivots;
      return out;
    }
    const double infeas = -tab.d(tab.rhs());
    const double scale = std::max(1.0, rhs.size() > 0 ? rhs.cwiseAbs().maxCoeff() : 0.0);
    if (infeas > 1e-9 * scale) {
      out.status = LpStatus::Infeasible;
      out.pivots = pivots;
      return out;
    }
  }

  // Drive remaining artificials out of the basis; rows where that is impossible are redundant.
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (tab.basis[static_cast<std::size_t>(i)] < structural) {
      keep.push_back(i);
      continue;
    }
    Eigen::Index col = -1;
    for (Eigen::Index j = 0; j < structural; ++j) {
      if (std::abs(tab.t(i, j)) > 1e-9) {
        col = j;
        break;
      }
    }
    if (col >= 0) {
      tab.pivot(i, col);
      ++pivots;
      keep.push_back(i);
    }
  }

  Tableau phase2;
  phase2.t = Matrix(static_cast<Eigen::Index>(keep.size()), structural + 1);
  for (std::size_t r = 0; r < keep.size(); ++r) {
    phase2.t.row(static_cast<Eigen::Index>(r)).head(structural) = tab.t.row(keep[r]).head(structural);
    phase2.t(static_cast<Eigen::Index>(r), structural) = tab.t(keep[r], tab.rhs());
    phase2.basis.push_back(tab.basis[static_cast<std::size_t>(keep[r])]);
  }

  Vector cost = Vector::Zero(structural + 1);
  for (Eigen::Index j = 0; j < nv; ++j) {
    cost(plus[static_cast<std::size_t>(j)]) = lp.objective(j);
    if (minus[static_cast<std::size_t>(j)] >= 0) cost(minus[static_cast<std::size_t>(j)]) = -lp.objective(j);
  }
  phase2.d = cost;
  for (Eigen::Index r = 0; r < phase2.t.rows(); ++r)
    phase2.d -= cost(phase2.basis[static_cast<std::size_t>(r)]) * phase2.t.row(r).transpose();

  const Outcome o = run_simplex(phase2, structural, pivots, max_pivots);
  out.pivots = pivots;
  out.status = to_status(o);
  if (o != Outcome::Optimal) return out;

  Vector std_sol = Vector::Zero(structural);
  for (Eigen::Index r = 0; r < phase2.t.rows(); ++r)
    std_sol(phase2.basis[static_cast<std::size_t>(r)]) = phase2.t(r, structural);
  out.solution = Vector(nv);
  for (Eigen::Index j = 0; j < nv; ++j) {
    double v = std_sol(plus[static_cast<std::size_t>(j)]);
    if (minus[static_cast<std::size_t>(j)] >= 0) v -= std_sol(minus[static_cast<std::size_t>(j)]);
    out.solution(j) = v;
  }
  out.optimum = lp.objective.dot(out.solution);
  return out;
}

// ---------------------------------------------------------------------------
// MPS

namespace {

std::string fit12(double v) {
  char buf[64];
  for (int prec = 12; prec >= 1; --prec) {
    std::snprintf(buf, sizeof buf, "%.*G", prec, v);
    if (std::string(buf).size() <= 12) return buf;
  }
  return buf;
}

std::string code(char prefix, Eigen::Index k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%07ld", prefix, static_cast<long>(k + 1));
  return buf;
}

void entry(std::ostream& os, std::string_view f1, std::string_view f2, std::string_view f3, double value) {
  char buf[96];
  std::snprintf(buf, sizeof buf, " %-2.2s %-8.8s  %-8.8s  %12s", std::string(f1).c_str(), std::string(f2).c_str(),
                std::string(f3).c_str(), fit12(value).c_str());
  os << buf << '\n';
}

}  // namespace

void write_mps(std::ostream& os, const LinearProgram& lp, std::string_view name) {
  lp.validate();
  const Eigen::Index nv = lp.num_vars();
  os << "NAME          " << name << '\n';
  os << "ROWS\n";
  os << " N  COST\n";
  for (Eigen::Index i = 0; i < lp.ineq.rows(); ++i) os << " L  " << code('L', i) << '\n';
  for (Eigen::Index i = 0; i < lp.eq.rows(); ++i) os << " E  " << code('E', i) << '\n';
  os << "COLUMNS\n";
  for (Eigen::Index j = 0; j < nv; ++j) {
    const std::string col = code('X', j);
    if (lp.objective(j) != 0.0) entry(os, "", col, "COST", lp.objective(j));
    for (Eigen::Index i = 0; i < lp.ineq.rows(); ++i)
      if (lp.ineq(i, j) != 0.0) entry(os, "", col, code('L', i), lp.ineq(i, j));
    for (Eigen::Index i = 0; i < lp.eq.rows(); ++i)
      if (lp.eq(i, j) != 0.0) entry(os, "", col, code('E', i), lp.eq(i, j));
  }
  os << "RHS\n";
  for (Eigen::Index i = 0; i < lp.ineq.rows(); ++i)
    if (lp.ineq_rhs(i) != 0.0) entry(os, "", "RHS", code('L', i), lp.ineq_rhs(i));
  for (Eigen::Index i = 0; i < lp.eq.rows(); ++i)
    if (lp.eq_rhs(i) != 0.0) entry(os, "", "RHS", code('E', i), lp.eq_rhs(i));
  os << "BOUNDS\n";
  for (Eigen::Index j = 0; j < nv; ++j) {
    if (lp.signs[static_cast<std::size_t>(j)] == VarSign::Free) {
      char buf[64];
      std::snprintf(buf, sizeof buf, " FR %-8.8s  %-8.8s", "BND", code('X', j).c_str());
      os << buf << '\n';
    }
  }
  os << "ENDATA\n";
}

}  // namespace dro
