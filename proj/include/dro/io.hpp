#pragma once

#include "dro/apps.hpp"
#include "dro/solvers.hpp"

#include <json.hpp>

namespace dro {

// JSON schema. Matrices are arrays of rows; the families list one vector per scenario.
//
// instance:
//   { "h":         {"type": "quadratic", "M": [[...]]} | {"type": "linear", "c": [...]},
//     "family":    {"type": "affine", "slopes": [a_1, ...], "offsets": [...]}
//                | {"type": "quadratic_anchor", "anchors": [xi_1, ...]}
//                | {"type": "quadform", "Q": [[...]], "linear": [b_1, ...], "constants": [...]},
//     "ambiguity": {"type": "simplex", "N": 3} | {"type": "capped", "caps": [...]}
//                | {"type": "moment", "values": [...], "lower": l, "upper": u},
//     "feasible":  {"type": "whole"} | {"type": "affine", "A": [[...]], "b": [...]},   (default whole)
//     "subspace":  "consensus" | "separable" }                                        (default consensus)
//   or { "generate": {"n", "m", "N", "h", "P", "seed"} }.
//
// couette: {"stresses", "radius_ratio", "degree", "measurements": [Omega^1, ...], "regularization",
//           "ambiguity" (optional, default simplex)}
// denoise: {"measurements": [b^1, ...], "regularization"}
//          or {"generate": {"n", "N", "noise", "regularization", "seed"}}
// bench:   {"cells": [[n, m, N], ...], "instances", "seed", "solvers": [...], "h": [...], "P": [...],
//           "tol", "max_iter"}

using Json = nlohmann::json;

/// All parsers throw PreconditionError on malformed input.
[[nodiscard]] ProblemInstance instance_from_json(const Json& j);
[[nodiscard]] Json instance_to_json(const ProblemInstance& inst);
[[nodiscard]] AmbiguitySet ambiguity_from_json(const Json& j);
[[nodiscard]] CouetteSpec couette_from_json(const Json& j);
[[nodiscard]] DenoiseSpec denoise_from_json(const Json& j);
[[nodiscard]] BenchPlan bench_plan_from_json(const Json& j);

[[nodiscard]] Json report_to_json(const SolverReport& rep);

}  // namespace dro
