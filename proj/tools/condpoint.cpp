#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "condpoint/error.hpp"
#include "condpoint/scenario.hpp"

namespace {

using condpoint::Error;
using condpoint::ErrorKind;
using nlohmann::json;
namespace io = condpoint::io;

struct Globals {
  std::optional<std::uint64_t> seed;
  double tol = 0.0;
  std::string out;
};

int exit_code(ErrorKind kind) { return kind == ErrorKind::Config ? 2 : 3; }

void report_failure(const std::string& kind, const std::string& message) {
  io::Json j = io::document("condpoint.failures");
  io::Json e = io::Json::object();
  e["error"] = kind;
  e["message"] = message;
  j["failures"] = io::Json::array({e});
  std::cerr << io::dump(j);
}

condpoint::Model model_for(const std::string& path, const Globals& g) {
  auto model = condpoint::load_model(path);
  if (g.seed) model.set_seed(*g.seed);
  if (model.space().kind() == condpoint::SpaceKind::Sampler && !model.has_seed()) {
    throw Error(ErrorKind::Config, "sampler spaces need a seed (config 'seed' or --seed)");
  }
  return model;
}

int emit(const condpoint::TaskResult& r, const Globals& g, const std::string& csv_path) {
  const std::string text = io::dump(r.json);
  if (g.out.empty()) {
    std::cout << text;
  } else {
    io::write_text(g.out, text);
  }
  if (!csv_path.empty()) io::write_text(csv_path, r.csv);
  return r.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"condpoint: pointwise conditional expectation by shrinking windows"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Master seed for samplers");
  app.add_option("--tol", g.tol, "Tolerance (task-specific; 0 keeps defaults)");
  app.add_option("--out", g.out, "Output file (run: output directory)");

  // window
  auto* window = app.add_subcommand("window", "E[X|Y=y] by shrinking windows");
  std::string w_space, w_x, w_y, w_grid, w_family, w_csv;
  std::vector<double> w_at;
  std::optional<double> w_eps0;
  std::optional<std::size_t> w_depth, w_nmin;
  window->add_option("--space", w_space, "Space config (JSON)")->required();
  window->add_option("--x", w_x, "Variable X")->required();
  window->add_option("--y", w_y, "Variable Y")->required();
  auto* at_opt = window->add_option("--at", w_at, "Target value(s) y");
  auto* grid_opt = window->add_option("--grid", w_grid, "Target grid a:b:n");
  at_opt->excludes(grid_opt);
  window->add_option("--eps0", w_eps0, "First window half-width (default: sd of Y)");
  window->add_option("--depth", w_depth, "Number of windows");
  window->add_option("--n-min", w_nmin, "Sampler starvation threshold");
  window->add_option("--family", w_family, "symmetric | left | right");
  window->add_option("--csv", w_csv, "Also write the table as CSV");

  // density
  auto* density = app.add_subcommand("density", "E[g(Z)|Y=y] from the density ratio");
  std::string d_joint, d_z, d_y, d_grid, d_emit, d_expect;
  std::vector<double> d_at;
  density->add_option("--joint", d_joint, "Joint grid config (JSON)")->required();
  density->add_option("--z", d_z, "Coordinate Z (default: first)");
  density->add_option("--y", d_y, "Coordinate Y (default: second)");
  auto* d_at_opt = density->add_option("--at", d_at, "Value(s) y");
  auto* d_grid_opt = density->add_option("--grid", d_grid, "Grid a:b:n");
  d_at_opt->excludes(d_grid_opt);
  density->add_option("--emit-density", d_emit, "CSV of f_{Z|Y=y}(z)");
  density->add_option("--expect", d_expect, "Test function g of z (default: z)");

  // factorize
  auto* fact = app.add_subcommand("factorize", "Extract phi with g = phi(Y)");
  std::string f_space, f_g, f_y, f_expect, f_csv;
  std::vector<double> f_levels;
  fact->add_option("--space", f_space, "Space config (JSON)")->required();
  fact->add_option("--g", f_g, "Function g")->required();
  fact->add_option("--y", f_y, "Variable Y")->required();
  fact->add_option("--levels", f_levels, "Level values (default: attained values)");
  fact->add_option("--expect-verdict", f_expect, "Factored | NotMeasurable");
  fact->add_option("--csv", f_csv, "Also write the level table as CSV");

  // paradox
  auto* paradox = app.add_subcommand("paradox", "Borel-Kolmogorov instance");
  std::string p_instance = "ratio-normal", p_csv;
  std::size_t p_n = 800;
  paradox->add_option("--instance", p_instance, "ratio-normal | ratio-normal-mc");
  paradox->add_option("--n", p_n, "Grid nodes per axis (even)");
  paradox->add_option("--csv", p_csv, "Conditional densities per family as CSV");

  // verify
  auto* verify = app.add_subcommand("verify", "Partition conditioning and version checks");
  std::string v_space, v_x, v_partition, v_candidate, v_coarse, v_fine;
  std::vector<std::string> v_generators, v_conditional, v_total;
  verify->add_option("--space", v_space, "Space config (JSON)")->required();
  verify->add_option("--x", v_x, "Variable X");
  verify->add_option("--partition", v_partition, "Partition name");
  verify->add_option("--candidate", v_candidate, "Candidate version Z");
  verify->add_option("--generators", v_generators, "Generating events (without --partition)");
  verify->add_option("--conditional", v_conditional, "Events A for E[X|A]");
  verify->add_option("--total-probability", v_total, "Events A for the law of total probability");
  verify->add_option("--too-coarse", v_coarse, "Null event for the too-coarse demonstration");
  verify->add_option("--too-fine", v_fine, "Null event for the too-fine demonstration");

  // run
  auto* run = app.add_subcommand("run", "Run a scenario suite");
  std::string r_suite;
  bool r_parallel = false;
  unsigned r_threads = 0;
  run->add_option("suite", r_suite, "Scenario suite (JSON)")->required();
  run->add_flag("--parallel", r_parallel, "Run scenarios concurrently");
  run->add_option("--threads", r_threads, "Worker threads (0: all cores)");

  // compare
  auto* cmp = app.add_subcommand("compare", "Compare two (y, value) tables");
  std::string c_a, c_b;
  cmp->add_option("a", c_a, "file.json[:/json/pointer]")->required();
  cmp->add_option("b", c_b, "file.json[:/json/pointer]")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (window->parsed()) {
      json p;
      p["x"] = w_x;
      p["y"] = w_y;
      if (!w_grid.empty()) p["grid"] = w_grid;
      else if (!w_at.empty()) p["at"] = w_at;
      else throw Error(ErrorKind::Config, "window needs --at or --grid");
      json sched = json::object();
      if (w_eps0) sched["eps0"] = *w_eps0;
      if (w_depth) sched["depth"] = *w_depth;
      if (!sched.empty()) p["schedule"] = sched;
      if (w_nmin) p["n_min"] = *w_nmin;
      if (!w_family.empty()) p["family"] = w_family;
      return emit(condpoint::run_window_task(model_for(w_space, g), p, g.tol), g, w_csv);
    }
    if (density->parsed()) {
      json p;
      if (!d_z.empty()) p["z"] = d_z;
      if (!d_y.empty()) p["y"] = d_y;
      if (!d_grid.empty()) p["grid"] = d_grid;
      else if (!d_at.empty()) p["at"] = d_at;
      else throw Error(ErrorKind::Config, "density needs --at or --grid");
      if (!d_expect.empty()) p["expect"] = d_expect;
      if (!d_emit.empty()) p["emit_density"] = true;
      return emit(condpoint::run_density_task(model_for(d_joint, g), p, g.tol), g, d_emit);
    }
    if (fact->parsed()) {
      json p;
      p["g"] = f_g;
      p["y"] = f_y;
      if (!f_levels.empty()) p["levels"] = f_levels;
      if (!f_expect.empty()) p["expect_verdict"] = f_expect;
      return emit(condpoint::run_factorize_task(model_for(f_space, g), p), g, f_csv);
    }
    if (paradox->parsed()) {
      json p;
      p["instance"] = p_instance;
      p["n"] = p_n;
      return emit(condpoint::run_paradox_task(p, g.seed.value_or(20240917)), g, p_csv);
    }
    if (verify->parsed()) {
      json p = json::object();
      if (!v_x.empty()) p["x"] = v_x;
      if (!v_partition.empty()) p["partition"] = v_partition;
      if (!v_candidate.empty()) p["candidate"] = v_candidate;
      if (!v_generators.empty()) p["generators"] = v_generators;
      if (!v_conditional.empty()) p["conditional"] = v_conditional;
      if (!v_total.empty()) p["total_probability"] = v_total;
      if (!v_coarse.empty()) p["too_coarse"] = v_coarse;
      if (!v_fine.empty()) p["too_fine"] = v_fine;
      return emit(condpoint::run_verify_task(model_for(v_space, g), p, g.tol), g, "");
    }
    if (run->parsed()) {
      condpoint::SuiteOptions opt;
      opt.out_dir = g.out.empty() ? "out" : g.out;
      opt.seed = g.seed.value_or(0);
      opt.parallel = r_parallel;
      opt.threads = r_threads;
      const auto result = condpoint::run_suite(r_suite, opt);
      io::write_text(opt.out_dir / "summary.json", io::dump(result.summary()));
      std::cout << io::dump(result.summary());
      if (!result.pass()) {
        std::cerr << io::dump(result.failures());
        return 1;
      }
      return 0;
    }
    if (cmp->parsed()) {
      const auto report = condpoint::compare(condpoint::read_table(c_a), condpoint::read_table(c_b),
                                             g.tol > 0.0 ? g.tol : 1e-3);
      condpoint::TaskResult r{report.pass, condpoint::to_json(report), ""};
      return emit(r, g, "");
    }
  } catch (const Error& e) {
    report_failure(e.kind() == ErrorKind::Config ? "ConfigError" : "TaskError",
                   std::string(condpoint::to_string(e.kind())) + ": " + e.what());
    return exit_code(e.kind());
  } catch (const nlohmann::json::exception& e) {
    report_failure("ConfigError", e.what());
    return 2;
  } catch (const std::exception& e) {
    report_failure("TaskError", e.what());
    return 3;
  }
  return 0;
}
