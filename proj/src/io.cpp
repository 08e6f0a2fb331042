#include "dro/io.hpp"

namespace dro {

namespace {

Vector to_vector(const Json& j, const char* what) {
  if (!j.is_array()) throw PreconditionError(std::string(what) + ": expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw PreconditionError(std::string(what) + ": expected numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

Matrix to_rows(const Json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw PreconditionError(std::string(what) + ": expected a non-empty array of rows");
  const Vector first = to_vector(j[0], what);
  Matrix m(static_cast<Eigen::Index>(j.size()), first.size());
  for (std::size_t r = 0; r < j.size(); ++r) {
    const Vector row = to_vector(j[r], what);
    if (row.size() != first.size()) throw PreconditionError(std::string(what) + ": ragged rows");
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return m;
}

// One vector per scenario, stored as matrix columns.
Matrix to_columns(const Json& j, const char* what) { return to_rows(j, what).transpose(); }

Json from_vector(const Vector& v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); }

Json from_rows(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(from_vector(m.row(r).transpose()));
  return out;
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw PreconditionError(std::string("missing field '") + key + "'");
  return j.at(key);
}

template <typename T>
T scalar(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) throw PreconditionError(std::string("field '") + key + "' must be a string");
  } else {
    if (!v.is_number()) throw PreconditionError(std::string("field '") + key + "' must be a number");
  }
  return v.get<T>();
}

template <typename T>
T scalar_or(const Json& j, const char* key, T fallback) {
  return j.contains(key) ? scalar<T>(j, key) : fallback;
}

template <typename F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

AmbiguitySet ambiguity_from_json(const Json& j) {
  return guarded([&] {
    const auto type = scalar<std::string>(j, "type");
    if (type == "simplex") {
      const auto n = scalar<long>(j, "N");
      if (n < 1) throw PreconditionError("ambiguity: N must be >= 1");
      return AmbiguitySet::full_simplex(n);
    }
    if (type == "capped") return AmbiguitySet::capped(to_vector(field(j, "caps"), "caps"));
    if (type == "moment")
      return AmbiguitySet::moment_box(to_vector(field(j, "values"), "values"), scalar<double>(j, "lower"),
                                      scalar<double>(j, "upper"));
    throw PreconditionError("ambiguity: unknown type '" + type + "'");
  });
}

ProblemInstance instance_from_json(const Json& j) {
  return guarded([&] {
    if (j.is_object() && j.contains("generate")) {
      const Json& g = j.at("generate");
      const auto n = scalar<long>(g, "n");
      return gen_instance(n, scalar_or<long>(g, "m", n), scalar<long>(g, "N"),
                          parse_smooth_variant(scalar_or<std::string>(g, "h", "quadratic")),
                          parse_ambiguity_variant(scalar_or<std::string>(g, "P", "simplex")),
                          scalar_or<std::uint64_t>(g, "seed", 0));
    }

    const Json& hj = field(j, "h");
    const auto htype = scalar<std::string>(hj, "type");
    std::optional<SmoothTerm> h;
    if (htype == "quadratic") h = SmoothTerm::quadratic(to_rows(field(hj, "M"), "M"));
    else if (htype == "linear") h = SmoothTerm::linear(to_vector(field(hj, "c"), "c"));
    else throw PreconditionError("h: unknown type '" + htype + "'");

    const Json& fj = field(j, "family");
    const auto ftype = scalar<std::string>(fj, "type");
    std::optional<CostFamily> family;
    if (ftype == "affine") {
      family.emplace(AffineFamily(to_columns(field(fj, "slopes"), "slopes"), to_vector(field(fj, "offsets"), "offsets")));
    } else if (ftype == "quadratic_anchor") {
      family.emplace(QuadraticAnchorFamily(to_columns(field(fj, "anchors"), "anchors")));
    } else if (ftype == "quadform") {
      family.emplace(QuadFormFamily(to_rows(field(fj, "Q"), "Q"), to_columns(field(fj, "linear"), "linear"),
                                    to_vector(field(fj, "constants"), "constants")));
    } else {
      throw PreconditionError("family: unknown type '" + ftype + "'");
    }

    FeasibleSet feasible = WholeSpace{};
    if (j.contains("feasible")) {
      const Json& qj = j.at("feasible");
      const auto qtype = scalar<std::string>(qj, "type");
      if (qtype == "affine") feasible = AffineSet(to_rows(field(qj, "A"), "A"), to_vector(field(qj, "b"), "b"));
      else if (qtype != "whole") throw PreconditionError("feasible: unknown type '" + qtype + "'");
    }

    Subspace subspace = Subspace::Consensus;
    const auto sub = scalar_or<std::string>(j, "subspace", "consensus");
    if (sub == "separable") subspace = Subspace::Separable;
    else if (sub != "consensus") throw PreconditionError("subspace: expected 'consensus' or 'separable'");

    ProblemInstance inst{std::move(*h), std::move(*family), ambiguity_from_json(field(j, "ambiguity")),
                         std::move(feasible), subspace};
    inst.validate();
    return inst;
  });
}

Json instance_to_json(const ProblemInstance& inst) {
  Json j;
  if (inst.h.is_linear()) j["h"] = {{"type", "linear"}, {"c", from_vector(inst.h.cost())}};
  else j["h"] = {{"type", "quadratic"}, {"M", from_rows(inst.h.hessian())}};

  std::visit(
      [&](const auto& f) {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, AffineFamily>) {
          j["family"] = {{"type", "affine"}, {"slopes", from_rows(f.slopes.transpose())},
                         {"offsets", from_vector(f.offsets)}};
        } else if constexpr (std::is_same_v<F, QuadraticAnchorFamily>) {
          j["family"] = {{"type", "quadratic_anchor"}, {"anchors", from_rows(f.anchors.transpose())}};
        } else {
          j["family"] = {{"type", "quadform"}, {"Q", from_rows(f.q)}, {"linear", from_rows(f.linear.transpose())},
                         {"constants", from_vector(f.constants)}};
        }
      },
      inst.family);

  std::visit(
      [&](const auto& v) {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, AmbiguitySet::FullSimplex>) {
          j["ambiguity"] = {{"type", "simplex"}, {"N", inst.scenarios()}};
        } else if constexpr (std::is_same_v<V, AmbiguitySet::CappedSimplex>) {
          j["ambiguity"] = {{"type", "capped"}, {"caps", from_vector(v.caps)}};
        } else {
          j["ambiguity"] = {{"type", "moment"}, {"values", from_vector(v.values)}, {"lower", v.lower}, {"upper", v.upper}};
        }
      },
      inst.ambiguity.variant());

  if (const auto* q = std::get_if<AffineSet>(&inst.feasible))
    j["feasible"] = {{"type", "affine"}, {"A", from_rows(q->a())}, {"b", from_vector(q->b())}};
  else
    j["feasible"] = {{"type", "whole"}};
  j["subspace"] = inst.subspace == Subspace::Consensus ? "consensus" : "separable";
  return j;
}

CouetteSpec couette_from_json(const Json& j) {
  return guarded([&] {
    CouetteSpec spec;
    spec.stresses = to_vector(field(j, "stresses"), "stresses");
    spec.radius_ratio = scalar<double>(j, "radius_ratio");
    spec.degree = scalar<int>(j, "degree");
    spec.measurements = to_columns(field(j, "measurements"), "measurements");
    spec.regularization = scalar<double>(j, "regularization");
    spec.validate();
    return spec;
  });
}

DenoiseSpec denoise_from_json(const Json& j) {
  return guarded([&] {
    if (j.is_object() && j.contains("generate")) {
      const Json& g = j.at("generate");
      return staircase_spec(scalar<long>(g, "n"), scalar<long>(g, "N"), scalar_or<double>(g, "noise", 0.1),
                            scalar_or<double>(g, "regularization", 1.0), scalar_or<std::uint64_t>(g, "seed", 0));
    }
    DenoiseSpec spec;
    spec.measurements = to_columns(field(j, "measurements"), "measurements");
    spec.regularization = scalar<double>(j, "regularization");
    spec.validate();
    return spec;
  });
}

BenchPlan bench_plan_from_json(const Json& j) {
  return guarded([&] {
    BenchPlan plan;
    for (const Json& c : field(j, "cells")) {
      const Vector v = to_vector(c, "cells");
      if (v.size() != 3) throw PreconditionError("cells: each cell is [n, m, N]");
      plan.cells.push_back({static_cast<Eigen::Index>(v(0)), static_cast<Eigen::Index>(v(1)),
                            static_cast<Eigen::Index>(v(2))});
    }
    plan.instances = scalar_or<int>(j, "instances", 20);
    plan.seed = scalar_or<std::uint64_t>(j, "seed", 0);
    if (j.contains("solvers")) {
      plan.solvers = j.at("solvers").get<std::vector<std::string>>();
    } else {
      for (const SolverKind k : kAllSolvers) plan.solvers.emplace_back(solver_name(k));
    }
    if (j.contains("h")) {
      plan.smooth.clear();
      for (const auto& s : j.at("h").get<std::vector<std::string>>()) plan.smooth.push_back(parse_smooth_variant(s));
    }
    if (j.contains("P")) {
      plan.ambiguity.clear();
      for (const auto& s : j.at("P").get<std::vector<std::string>>())
        plan.ambiguity.push_back(parse_ambiguity_variant(s));
    }
    plan.tol = scalar_or<double>(j, "tol", 1e-5);
    plan.max_iter = scalar_or<int>(j, "max_iter", 30000);
    plan.validate();
    return plan;
  });
}

Json report_to_json(const SolverReport& rep) {
  Json j;
  j["solver"] = rep.solver;
  j["converged"] = rep.converged;
  j["iterations"] = rep.iterations;
  j["objective"] = rep.objective;
  j["final_residual"] = rep.residuals.empty() ? 0.0 : rep.residuals.back();
  j["x"] = from_rows(rep.x.transpose());
  j["p"] = from_vector(rep.p);
  return j;
}

}  // namespace dro
