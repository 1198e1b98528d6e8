#include "condpoint/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "condpoint/density.hpp"
#include "condpoint/error.hpp"
#include "condpoint/factorization.hpp"
#include "condpoint/parallel.hpp"
#include "condpoint/pathology.hpp"
#include "condpoint/rng.hpp"
#include "condpoint/serialize.hpp"

namespace condpoint {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& why) { throw Error(ErrorKind::Config, why); }

std::string str_param(const json& p, const char* key, const std::string& fallback = "") {
  if (!p.contains(key)) {
    if (fallback.empty()) fail(std::string("task parameters need '") + key + "'");
    return fallback;
  }
  return p.at(key).get<std::string>();
}

/// "at": number or list, or "grid": axis.
std::vector<double> y_points(const json& p) {
  if (p.contains("at")) {
    const json& at = p.at("at");
    if (at.is_array()) {
      std::vector<double> out;
      for (const auto& e : at) out.push_back(io::read_number(e));
      return out;
    }
    return {io::read_number(at)};
  }
  if (p.contains("grid")) {
    const json& g = p.at("grid");
    Axis a = g.is_string() ? Axis::parse(g.get<std::string>()) : parse_axis(g);
    if (a.n == 1) return {a.lo};
    return a.nodes();
  }
  fail("task parameters need 'at' or 'grid'");
}

/// Oracle as an expression in `y` (e.g. "y/2").
std::optional<Expr> oracle_of(const json& p) {
  if (!p.contains("oracle")) return std::nullopt;
  return Expr::parse(p.at("oracle").get<std::string>());
}

double eval_oracle(const Expr& e, double y) {
  return e.evaluate([&](std::string_view id) -> double {
    if (id == "y") return y;
    fail("oracle may only use 'y'");
  });
}

}  // namespace

TaskResult run_window_task(const Model& model, const json& params, double tol, unsigned threads) {
  const auto x = model.variable(str_param(params, "x"));
  const auto y = model.variable(str_param(params, "y"));
  GridOptions opt;
  opt.threads = threads;
  if (params.contains("schedule")) opt.window.schedule = parse_schedule(params.at("schedule"));
  if (params.contains("family")) opt.window.family = parse_window_family(params.at("family").get<std::string>());
  if (params.contains("n_min")) opt.window.n_min = params.at("n_min").get<std::size_t>();
  opt.window.tol = params.contains("tol") ? io::read_number(params.at("tol")) : tol;
  const auto ys = y_points(params);
  const auto phi = evaluate_on_grid(model.space(), x, y, ys, opt);

  TaskResult r;
  r.json = io::to_json(phi);
  r.csv = io::to_csv(phi);
  r.pass = std::all_of(phi.flags.begin(), phi.flags.end(), [](const std::string& f) { return f.empty(); });
  if (const auto oracle = oracle_of(params)) {
    const double otol = params.contains("oracle_tol") ? io::read_number(params.at("oracle_tol")) : 0.0;
    const double ose = params.contains("oracle_se") ? io::read_number(params.at("oracle_se")) : 0.0;
    io::Json check = io::Json::object();
    std::vector<double> expected;
    std::vector<double> error;
    std::vector<double> allowed;
    for (std::size_t i = 0; i < ys.size(); ++i) {
      expected.push_back(eval_oracle(*oracle, ys[i]));
      error.push_back(std::fabs(phi.value(i) - expected.back()));
      double se = 0.0;
      if (phi.traces[i] && !phi.traces[i]->std_errors.empty()) se = phi.traces[i]->std_errors.back();
      allowed.push_back(std::max(otol, ose * se));
      if (!(error.back() <= allowed.back())) r.pass = false;
    }
    check["expr"] = params.at("oracle");
    check["expected"] = io::numbers(expected);
    check["abs_error"] = io::numbers(error);
    check["allowed"] = io::numbers(allowed);
    r.json["oracle"] = check;
  }
  r.json["pass"] = r.pass;
  return r;
}

TaskResult run_density_task(const Model& model, const json& params, double /*tol*/) {
  const auto& coords = model.space().coordinates();
  if (coords.size() != 2) fail("density task needs a grid2d space");
  io::DensityTable d;
  d.z_name = str_param(params, "z", coords[0]);
  d.y_name = str_param(params, "y", coords[1]);
  const auto joint = JointDensity::from_space(model.space(), d.z_name, d.y_name);
  d.g = str_param(params, "expect", d.z_name);
  const auto g = Expr::parse(d.g);
  const bool emit = params.value("emit_density", false);
  const auto oracle = oracle_of(params);
  const double otol = params.contains("oracle_tol") ? io::read_number(params.at("oracle_tol")) : 0.0;
  TaskResult r;
  r.pass = true;
  std::vector<double> expected;
  for (double y : y_points(params)) {
    d.y.push_back(y);
    try {
      auto cd = conditional_density(joint, y);
      d.marginal.push_back(cd.marginal);
      d.defect.push_back(cd.defect);
      d.value.push_back(conditional_expectation_via_density(joint, y, g));
      d.flags.emplace_back();
      if (emit) d.densities.push_back(std::move(cd));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NullMarginal && e.kind() != ErrorKind::OutOfRectangle) throw;
      d.marginal.push_back(NAN);
      d.defect.push_back(NAN);
      d.value.push_back(NAN);
      d.flags.push_back(std::string(to_string(e.kind())) + ": " + e.what());
      r.pass = false;
    }
    if (oracle) {
      expected.push_back(eval_oracle(*oracle, y));
      if (!(std::fabs(d.value.back() - expected.back()) <= otol)) r.pass = false;
    }
  }
  r.json = io::to_json(d);
  if (oracle) {
    io::Json check = io::Json::object();
    check["expr"] = params.at("oracle");
    check["expected"] = io::numbers(expected);
    check["allowed"] = io::number(otol);
    r.json["oracle"] = check;
  }
  r.json["pass"] = r.pass;
  if (emit) r.csv = io::density_csv(d);
  return r;
}

TaskResult run_factorize_task(const Model& model, const json& params) {
  const auto g = model.variable(str_param(params, "g"));
  const auto y = model.variable(str_param(params, "y"));
  std::vector<double> levels;
  if (params.contains("levels")) levels = y_points(json{{"at", params.at("levels")}});
  const auto res = factorize(model.space(), g, y, levels);
  const std::string expect = str_param(params, "expect_verdict", "Factored");
  TaskResult r;
  r.json = io::to_json(res);
  r.pass = to_string(res.verdict) == expect;
  r.json["expected_verdict"] = expect;
  r.json["pass"] = r.pass;
  io::Csv csv({"y", "phi", "witnesses", "empty"});
  for (const auto& ls : res.levels) {
    csv.row({io::csv_number(ls.y), io::csv_number(ls.phi), std::to_string(ls.witnesses.size()),
             ls.empty ? "true" : "false"});
  }
  r.csv = csv.str();
  return r;
}

TaskResult run_verify_task(const Model& model, const json& params, double tol) {
  TaskResult r;
  r.json = io::document("condpoint.verification");
  r.pass = true;
  const ProbabilitySpace& space = model.space();
  VerifyOptions vopt;
  if (tol > 0.0) vopt.integral_tol = tol;
  const bool expect_pass = params.value("expect_pass", true);

  std::optional<RandomVariable> x;
  if (params.contains("x")) {
    x = model.variable(params.at("x").get<std::string>());
    r.json["x"] = x->name();
    r.json["expectation"] = io::number(expectation(space, *x).value);
  }
  if (params.contains("conditional")) {
    if (!x) fail("'conditional' needs 'x'");
    io::Json cond = io::Json::array();
    for (const auto& name : params.at("conditional")) {
      const auto ev = model.event(name.get<std::string>());
      const auto ce = cond_expectation_event(space, *x, ev);
      io::Json e = io::Json::object();
      e["event"] = ev.label();
      e["probability"] = io::number(ce.probability);
      e["value"] = io::number(ce.value);
      e["degenerate"] = ce.degenerate;
      cond.push_back(e);
    }
    r.json["conditional"] = cond;
  }
  if (params.contains("partition")) {
    const std::string pname = params.at("partition").get<std::string>();
    const auto part = model.partition(pname);
    r.json["partition"] = pname;
    if (x) {
      const auto pce = partition_cond_exp(space, *x, part);
      r.json["cond_exp"] = io::to_json(pce);
      const auto cells = model.partition_cells(pname);
      std::optional<RandomVariable> candidate;
      if (params.contains("candidate")) {
        candidate = model.variable(params.at("candidate").get<std::string>());
      } else if (space.kind() != SpaceKind::Sampler) {
        candidate = pce.as_variable("E[" + x->name() + "|" + pname + "]", space);
      }
      if (candidate) {
        const auto rep = verify_cond_exp(space, *x, *candidate, cells, vopt);
        r.json["candidate"] = candidate->name();
        r.json["report"] = io::to_json(rep);
        if (rep.pass() != expect_pass) r.pass = false;
      }
    }
    if (params.contains("total_probability")) {
      io::Json tps = io::Json::array();
      for (const auto& name : params.at("total_probability")) {
        const auto ev = model.event(name.get<std::string>());
        const auto tp = total_probability(space, ev, part);
        const double direct = probability(space, ev).value;
        io::Json e = io::Json::object();
        e["event"] = ev.label();
        e["total_probability"] = io::number(tp.value);
        e["probability"] = io::number(direct);
        e["conditionals"] = io::numbers(tp.conditionals);
        tps.push_back(e);
        if (!(std::fabs(tp.value - direct) <= 1e-12)) r.pass = false;
      }
      r.json["total_probability"] = tps;
    }
    if (params.contains("bayes")) {
      io::Json bs = io::Json::array();
      for (const auto& b : params.at("bayes")) {
        const auto ev = model.event(b.at("event").get<std::string>());
        const std::size_t k = b.at("cell").get<std::size_t>();
        io::Json e = io::Json::object();
        e["event"] = ev.label();
        e["cell"] = k;
        e["posterior"] = io::number(bayes_discrete(space, ev, part, k));
        bs.push_back(e);
      }
      r.json["bayes"] = bs;
    }
  } else if (params.contains("candidate")) {
    if (!x) fail("'candidate' needs 'x'");
    std::vector<Event> gens;
    for (const auto& name : params.value("generators", json::array())) gens.push_back(model.event(name.get<std::string>()));
    const auto candidate = model.variable(params.at("candidate").get<std::string>());
    const auto rep = verify_cond_exp(space, *x, candidate, gens, vopt);
    r.json["candidate"] = candidate.name();
    r.json["report"] = io::to_json(rep);
    if (rep.pass() != expect_pass) r.pass = false;
  }
  if (params.contains("too_coarse")) {
    if (!x) fail("'too_coarse' needs 'x'");
    const auto demo = too_coarse_demo(space, *x, model.event(params.at("too_coarse").get<std::string>()));
    r.json["too_coarse"] = io::to_json(demo);
    if (!demo.mean_report.pass() || !demo.alternative_report.pass()) r.pass = false;
  }
  if (params.contains("too_fine")) {
    if (!x) fail("'too_fine' needs 'x'");
    const auto demo = too_fine_demo(space, *x, model.event(params.at("too_fine").get<std::string>()));
    r.json["too_fine"] = io::to_json(demo);
  }
  r.json["pass"] = r.pass;
  return r;
}

TaskResult run_paradox_task(const json& params, std::uint64_t seed) {
  const std::string name = str_param(params, "instance", "ratio-normal");
  const std::size_t n = params.value("n", std::size_t{800});
  const auto outcome = run_paradox(paradox_instance(name, seed, n));
  TaskResult r;
  r.json = io::to_json(outcome);
  r.pass = outcome.pass();
  if (!outcome.main.families.empty() && !outcome.main.families.front().z.empty()) {
    r.csv = io::paradox_csv(outcome);
  }
  return r;
}

bool SuiteResult::pass() const {
  return std::all_of(scenarios.begin(), scenarios.end(), [](const ScenarioOutcome& s) { return s.pass; });
}

io::Json SuiteResult::summary() const {
  io::Json j = io::document("condpoint.summary");
  j["pass"] = pass();
  io::Json list = io::Json::array();
  for (const auto& s : scenarios) {
    io::Json e = io::Json::object();
    e["name"] = s.name;
    e["task"] = s.task;
    e["pass"] = s.pass;
    e["artifacts"] = s.artifacts;
    if (!s.error_kind.empty()) {
      e["error"] = s.error_kind;
      e["message"] = s.message;
    }
    list.push_back(e);
  }
  j["scenarios"] = list;
  return j;
}

io::Json SuiteResult::failures() const {
  io::Json j = io::document("condpoint.failures");
  io::Json list = io::Json::array();
  for (const auto& s : scenarios) {
    if (s.pass) continue;
    io::Json e = io::Json::object();
    e["name"] = s.name;
    e["task"] = s.task;
    e["error"] = s.error_kind.empty() ? "VerdictFailed" : s.error_kind;
    e["message"] = s.message;
    list.push_back(e);
  }
  j["failures"] = list;
  return j;
}

SuiteResult run_suite(const std::filesystem::path& suite, const SuiteOptions& options) {
  const json doc = parse_json_file(suite);
  if (!doc.is_object() || doc.value("schema_version", 0) != io::kSchemaVersion) {
    fail(suite.string() + ": suite needs \"schema_version\": 1");
  }
  const json list = doc.value("scenarios", json::array());
  if (!list.is_array()) fail(suite.string() + ": 'scenarios' must be a list");
  const auto base = suite.parent_path();

  struct Prepared {
    std::string name;
    std::string task;
    json params;
    std::optional<Model> model;
    std::uint64_t seed = 0;
    double tol = 0.0;
    std::string json_out;
    std::string csv_out;
  };
  static const std::vector<std::string> kTasks{"window", "density", "factorize", "paradox", "verify"};
  std::vector<Prepared> prepared;
  std::map<std::string, int> seen;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const json& s = list[i];
    Prepared p;
    p.name = s.at("name").get<std::string>();
    if (seen[p.name]++) fail("scenario name '" + p.name + "' used twice");
    p.task = s.at("task").get<std::string>();
    if (std::find(kTasks.begin(), kTasks.end(), p.task) == kTasks.end()) {
      fail("scenario '" + p.name + "' has unknown task '" + p.task + "'");
    }
    p.params = s.value("params", json::object());
    p.seed = s.contains("seed") ? s.at("seed").get<std::uint64_t>() : rng::derive_seed(options.seed, i);
    p.tol = s.contains("tol") ? io::read_number(s.at("tol")) : 0.0;
    if (p.task != "paradox") {
      if (!s.contains("config")) fail("scenario '" + p.name + "' needs 'config'");
      p.model = load_model(base / s.at("config").get<std::string>());
      if (p.model->space().kind() == SpaceKind::Sampler && (s.contains("seed") || !p.model->has_seed())) {
        p.model->set_seed(p.seed);
      }
    }
    const json outs = s.value("outputs", json::object());
    p.json_out = outs.value("json", p.name + ".json");
    p.csv_out = outs.value("csv", p.name + ".csv");
    prepared.push_back(std::move(p));
  }

  SuiteResult result;
  result.scenarios.resize(prepared.size());
  const unsigned inner = options.parallel ? 1U : options.threads;
  auto run_one = [&](std::size_t i) {
    const Prepared& p = prepared[i];
    ScenarioOutcome& o = result.scenarios[i];
    o.name = p.name;
    o.task = p.task;
    try {
      TaskResult r;
      if (p.task == "window") r = run_window_task(*p.model, p.params, p.tol, inner);
      else if (p.task == "density") r = run_density_task(*p.model, p.params, p.tol);
      else if (p.task == "factorize") r = run_factorize_task(*p.model, p.params);
      else if (p.task == "verify") r = run_verify_task(*p.model, p.params, p.tol);
      else r = run_paradox_task(p.params, p.seed);
      r.json["scenario"] = p.name;
      r.json["seed"] = p.seed;
      io::write_text(options.out_dir / p.json_out, io::dump(r.json));
      o.artifacts.push_back(p.json_out);
      if (!r.csv.empty()) {
        io::write_text(options.out_dir / p.csv_out, r.csv);
        o.artifacts.push_back(p.csv_out);
      }
      o.pass = r.pass;
      if (!r.pass) o.message = "a requested verdict was not reached";
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Config) throw;
      o.pass = false;
      o.error_kind = "TaskError";
      o.message = std::string(to_string(e.kind())) + ": " + e.what();
    }
  };
  parallel_for(prepared.size(), run_one, options.parallel ? options.threads : 1U);
  return result;
}

Table read_table(const std::string& spec) {
  std::string path = spec;
  std::string pointer;
  const auto cut = spec.find(":/");
  if (cut != std::string::npos) {
    path = spec.substr(0, cut);
    pointer = spec.substr(cut + 1);
  }
  const json doc = parse_json_file(path);
  json node = doc;
  if (!pointer.empty()) {
    try {
      node = doc.at(json::json_pointer(pointer));
    } catch (const json::exception& e) {
      fail(spec + ": " + e.what());
    }
  }
  Table t;
  t.source = spec;
  if (node.contains("trace") && node.at("trace").is_object()) node = node.at("trace");
  if (node.contains("table")) {
    for (const auto& v : node.at("table").at("y")) t.y.push_back(io::read_number(v));
    for (const auto& v : node.at("table").at("value")) t.value.push_back(io::read_number(v));
  } else if (node.contains("y") && node.contains("value") && !node.at("y").is_array()) {
    t.y.push_back(io::read_number(node.at("y")));
    t.value.push_back(io::read_number(node.at("value")));
  } else {
    fail(spec + ": no (y, value) table found");
  }
  if (t.y.size() != t.value.size()) fail(spec + ": y and value lists differ in length");
  return t;
}

CompareReport compare(const Table& a, const Table& b, double tol) {
  if (a.y.size() != b.y.size()) {
    throw Error(ErrorKind::GridMismatch, a.source + " has " + std::to_string(a.y.size()) + " nodes, " +
                                             b.source + " has " + std::to_string(b.y.size()));
  }
  for (std::size_t i = 0; i < a.y.size(); ++i) {
    if (!(std::fabs(a.y[i] - b.y[i]) <= 1e-9 * std::max(1.0, std::fabs(a.y[i])))) {
      throw Error(ErrorKind::GridMismatch, "node " + std::to_string(i) + " differs between the traces");
    }
  }
  CompareReport r;
  r.a = a;
  r.b = b;
  r.tol = tol;
  r.pass = true;
  for (std::size_t i = 0; i < a.y.size(); ++i) {
    const double d = std::fabs(a.value[i] - b.value[i]);
    r.diff.push_back(d);
    if (!(d <= tol)) r.pass = false;
    r.max_diff = std::isnan(d) || std::isnan(r.max_diff) ? NAN : std::max(r.max_diff, d);
  }
  return r;
}

io::Json to_json(const CompareReport& r) {
  io::Json j = io::document("condpoint.compare");
  j["a"] = r.a.source;
  j["b"] = r.b.source;
  j["tol"] = io::number(r.tol);
  j["pass"] = r.pass;
  j["max_diff"] = io::number(r.max_diff);
  j["margin"] = io::number(r.max_diff - r.tol);
  j["y"] = io::numbers(r.a.y);
  j["a_values"] = io::numbers(r.a.value);
  j["b_values"] = io::numbers(r.b.value);
  j["diff"] = io::numbers(r.diff);
  return j;
}

}  // namespace condpoint
