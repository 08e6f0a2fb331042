#pragma once

#include "dro/linalg.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace dro {

enum class VarSign { Free, NonNegative };

/// minimize c^T v  subject to  G v <= g,  A v = b,  v_j >= 0 where signs[j] == NonNegative.
struct LinearProgram {
  Vector objective;
  Matrix ineq;
  Vector ineq_rhs;
  Matrix eq;
  Vector eq_rhs;
  std::vector<VarSign> signs;

  [[nodiscard]] Eigen::Index num_vars() const { return objective.size(); }
  /// Throws PreconditionError on inconsistent dimensions or non-finite data.
  void validate() const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, NumericBreakdown, IterationLimit };

[[nodiscard]] std::string_view to_string(LpStatus s);

struct LpResult {
  LpStatus status = LpStatus::NumericBreakdown;
  double optimum = 0.0;
  Vector solution;
  int pivots = 0;
};

/// Two-phase dense tableau simplex with Bland's rule. Free variables are split as v = v+ - v-.
[[nodiscard]] LpResult lp_solve(const LinearProgram& lp, int max_pivots = 100000);

/// Fixed-format MPS (NAME/ROWS/COLUMNS/RHS/BOUNDS/ENDATA). Rows are COST, L0000001.., E0000001..;
/// columns are X0000001..; numeric fields are 12 characters wide.
void write_mps(std::ostream& os, const LinearProgram& lp, std::string_view name = "DROLP");

}  // namespace dro
