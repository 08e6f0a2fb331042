#include "dro/apps.hpp"
#include "dro/dual_lp.hpp"
#include "dro/io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

constexpr int kOk = 0;
constexpr int kNotConverged = 1;
constexpr int kUsage = 2;

struct Options {
  std::string solver = "prox_max";
  std::optional<double> tol;
  std::optional<int> max_iter;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string input;
};

dro::Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw dro::PreconditionError("cannot open '" + path + "'");
  try {
    return dro::Json::parse(in);
  } catch (const dro::Json::parse_error& e) {
    throw dro::PreconditionError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void apply_seed(dro::Json& j, const Options& o) {
  if (o.seed && j.is_object() && j.contains("generate")) j["generate"]["seed"] = *o.seed;
}

dro::SolverConfig config(const Options& o) {
  dro::SolverConfig cfg;
  if (o.tol) cfg.tol = *o.tol;
  if (o.max_iter) cfg.max_iter = *o.max_iter;
  return cfg;
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out);
  if (!f) throw dro::PreconditionError("cannot write '" + o.out + "'");
  f << text;
}

int run_solve(const Options& o) {
  dro::Json j = read_json(o.input);
  apply_seed(j, o);
  const dro::ProblemInstance inst = dro::instance_from_json(j);
  const dro::SolverReport rep = dro::solve(dro::parse_solver(o.solver), inst, config(o));
  emit(o, dro::report_to_json(rep).dump(2) + "\n");
  return rep.converged ? kOk : kNotConverged;
}

int run_bench(const Options& o) {
  dro::BenchPlan plan = dro::bench_plan_from_json(read_json(o.input));
  if (o.seed) plan.seed = *o.seed;
  if (o.tol) plan.tol = *o.tol;
  if (o.max_iter) plan.max_iter = *o.max_iter;
  std::ostringstream csv;
  dro::write_bench_csv(csv, dro::bench_run(plan));
  emit(o, csv.str());
  return kOk;
}

int run_couette(const Options& o) {
  const dro::Json j = read_json(o.input);
  const dro::CouetteSpec spec = dro::couette_from_json(j);
  const dro::AmbiguitySet set = j.contains("ambiguity")
                                    ? dro::ambiguity_from_json(j.at("ambiguity"))
                                    : dro::AmbiguitySet::full_simplex(spec.measurements.cols());
  dro::QuadFormProxOptions opts;
  if (o.tol) opts.tol = *o.tol;
  if (o.max_iter) opts.max_iter = *o.max_iter;
  const dro::QuadFormProxResult res = dro::couette_solve(spec, set, opts);
  dro::Json out;
  out["x"] = std::vector<double>(res.x.data(), res.x.data() + res.x.size());
  out["weights"] = std::vector<double>(res.weights.data(), res.weights.data() + res.weights.size());
  out["iterations"] = res.iterations;
  out["converged"] = res.converged;
  emit(o, out.dump(2) + "\n");
  return res.converged ? kOk : kNotConverged;
}

int run_denoise(const Options& o) {
  dro::Json j = read_json(o.input);
  apply_seed(j, o);
  const dro::DenoiseSpec spec = dro::denoise_from_json(j);
  const dro::SolverReport rep = dro::solve(dro::parse_solver(o.solver), dro::denoise_instance(spec), config(o));
  emit(o, dro::report_to_json(rep).dump(2) + "\n");
  return rep.converged ? kOk : kNotConverged;
}

int run_export(const Options& o) {
  dro::Json j = read_json(o.input);
  apply_seed(j, o);
  std::ostringstream mps;
  dro::write_mps(mps, dro::build_dual_lp(dro::instance_from_json(j)));
  emit(o, mps.str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete distributionally robust optimization solvers"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand
  Options o;
  app.add_option("--solver", o.solver, "prox_max | distributed_fb | fb_subspaces | davis_yin");
  app.add_option("--tol", o.tol, "stopping tolerance");
  app.add_option("--max-iter", o.max_iter, "iteration budget");
  app.add_option("--seed", o.seed, "seed for generated instances and benchmark plans");
  app.add_option("--out", o.out, "output file (default: standard output)");

  struct Sub {
    const char* name;
    const char* help;
    int (*run)(const Options&);
  };
  const Sub subs[] = {
      {"solve", "solve an instance and print the report as JSON", run_solve},
      {"bench", "run a benchmark plan and print CSV", run_bench},
      {"couette", "fit a Couette rheology model", run_couette},
      {"denoise", "denoise several measurements of a signal", run_denoise},
      {"export-lp", "write the dual LP of a linear instance in MPS format", run_export},
  };
  std::vector<std::pair<CLI::App*, const Sub*>> handlers;
  for (const Sub& s : subs) {
    CLI::App* cmd = app.add_subcommand(s.name, s.help);
    cmd->add_option("input", o.input, "JSON input file")->required();
    handlers.emplace_back(cmd, &s);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    (void)app.exit(e);
    return kUsage;
  }

  try {
    (void)dro::parse_solver(o.solver);
    for (const auto& [cmd, sub] : handlers)
      if (cmd->parsed()) return sub->run(o);
  } catch (const dro::PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNotConverged;
  }
  return kUsage;
}
