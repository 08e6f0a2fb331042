#include "dro/apps.hpp"
#include "dro/dual_lp.hpp"
#include "dro/io.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace dro;

namespace {

py::dict report_dict(const SolverReport& r) {
  py::dict d;
  d["solver"] = r.solver;
  d["x"] = r.x;
  d["p"] = r.p;
  d["iterations"] = r.iterations;
  d["converged"] = r.converged;
  d["objective"] = r.objective;
  d["residuals"] = r.residuals;
  return d;
}

SolverConfig make_config(std::optional<double> lambda, std::optional<double> gamma, double tol, int max_iter) {
  SolverConfig cfg;
  cfg.lambda = lambda;
  cfg.gamma = gamma;
  cfg.tol = tol;
  cfg.max_iter = max_iter;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Discrete distributionally robust optimization: projections, prox operators and splitting solvers";

  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

  py::class_<AmbiguitySet>(m, "AmbiguitySet")
      .def_static("full_simplex", &AmbiguitySet::full_simplex, py::arg("n"))
      .def_static("capped", &AmbiguitySet::capped, py::arg("caps"))
      .def_static("moment_box", &AmbiguitySet::moment_box, py::arg("values"), py::arg("lower"), py::arg("upper"))
      .def_property_readonly("size", &AmbiguitySet::size)
      .def_property_readonly("kind", [](const AmbiguitySet& s) { return std::string(s.kind()); })
      .def("violation", &AmbiguitySet::violation, py::arg("p"));

  m.def("proj_simplex", &proj_simplex, py::arg("x"));
  m.def("proj_weighted_simplex", &proj_weighted_simplex, py::arg("x"), py::arg("w"));
  m.def(
      "proj_ambiguity", [](const Vector& p, const AmbiguitySet& s) { return proj_ambiguity(p, s); }, py::arg("p"),
      py::arg("set"));

  m.def(
      "solve_concave_allocation",
      [](const Vector& alpha, double lambda) {
        const AllocationSolution s = solve_concave_allocation(alpha, lambda);
        py::dict d;
        d["weights"] = s.weights;
        d["tau"] = s.tau;
        d["mu"] = s.mu;
        d["cut"] = s.cut ? py::object(py::int_(*s.cut)) : py::object(py::none());
        d["kkt_residual"] = s.kkt_residual;
        return d;
      },
      py::arg("alpha"), py::arg("lam"));
  m.def(
      "prox_sup_affine",
      [](const Matrix& x, double lambda, const Matrix& slopes, const Vector& offsets, const AmbiguitySet& s) {
        return prox_sup_affine(x, lambda, AffineFamily(slopes, offsets), s);
      },
      py::arg("x"), py::arg("lam"), py::arg("slopes"), py::arg("offsets"), py::arg("set"));
  m.def(
      "prox_sup_quadratic",
      [](const Matrix& x, double lambda, const Matrix& anchors) {
        return prox_sup_quadratic(x, lambda, QuadraticAnchorFamily(anchors));
      },
      py::arg("x"), py::arg("lam"), py::arg("anchors"));

  py::class_<ProblemInstance>(m, "ProblemInstance")
      .def_static(
          "from_json", [](const std::string& text) { return instance_from_json(Json::parse(text)); },
          py::arg("text"))
      .def_static(
          "generate",
          [](Eigen::Index n, Eigen::Index count, const std::string& h, const std::string& p, std::uint64_t seed) {
            return gen_instance(n, n, count, parse_smooth_variant(h), parse_ambiguity_variant(p), seed);
          },
          py::arg("n"), py::arg("N"), py::arg("h") = "quadratic", py::arg("P") = "simplex", py::arg("seed") = 0)
      .def("to_json", [](const ProblemInstance& i) { return instance_to_json(i).dump(); })
      .def_property_readonly("dim", &ProblemInstance::dim)
      .def_property_readonly("scenarios", &ProblemInstance::scenarios)
      .def("objective", [](const ProblemInstance& i, const Matrix& x) { return objective_eval(x, i); }, py::arg("x"));

  m.def(
      "solve",
      [](const ProblemInstance& inst, const std::string& solver, std::optional<double> lambda,
         std::optional<double> gamma, double tol, int max_iter) {
        return report_dict(solve(parse_solver(solver), inst, make_config(lambda, gamma, tol, max_iter)));
      },
      py::arg("instance"), py::arg("solver") = "prox_max", py::arg("lam") = py::none(), py::arg("gamma") = py::none(),
      py::arg("tol") = 1e-5, py::arg("max_iter") = 30000);

  m.def(
      "dual_lp_optimum",
      [](const ProblemInstance& inst) {
        const LpResult r = lp_solve(build_dual_lp(inst));
        if (r.status != LpStatus::Optimal) throw std::runtime_error("dual LP: " + std::string(to_string(r.status)));
        return py::make_tuple(r.optimum, dual_lp_primal(r, inst));
      },
      py::arg("instance"));

  m.def(
      "couette_solve",
      [](const std::string& spec_json) {
        const Json j = Json::parse(spec_json);
        const CouetteSpec spec = couette_from_json(j);
        const AmbiguitySet set = j.contains("ambiguity") ? ambiguity_from_json(j.at("ambiguity"))
                                                         : AmbiguitySet::full_simplex(spec.measurements.cols());
        const QuadFormProxResult r = couette_solve(spec, set);
        return py::make_tuple(r.x, r.weights, r.converged);
      },
      py::arg("spec_json"));

  m.def(
      "denoise",
      [](const Matrix& measurements, double regularization, double tol, int max_iter) {
        DenoiseSpec spec;
        spec.measurements = measurements;
        spec.regularization = regularization;
        return report_dict(denoise_solve(spec, make_config(std::nullopt, std::nullopt, tol, max_iter)));
      },
      py::arg("measurements"), py::arg("regularization"), py::arg("tol") = 1e-5, py::arg("max_iter") = 30000);
}
