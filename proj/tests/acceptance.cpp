// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "condpoint/density.hpp"
#include "condpoint/factorization.hpp"
#include "condpoint/json_out.hpp"
#include "condpoint/partition.hpp"
#include "condpoint/pathology.hpp"
#include "condpoint/window.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace condpoint;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, const std::function<Outcome()>& body) {
  auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s %2d %-28s %.3fs  %s\n", o.pass ? "PASS" : "FAIL", id, title, secs,
              o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

RandomVariable var(const char* name, const char* text) {
  return RandomVariable::expression(name, text);
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Byte comparison of every file under two directories.
bool same_tree(const fs::path& a, const fs::path& b, std::size_t& files, std::string& diff) {
  files = 0;
  std::vector<fs::path> rel;
  for (const auto& e : fs::recursive_directory_iterator(a))
    if (e.is_regular_file()) rel.push_back(fs::relative(e.path(), a));
  std::size_t other = 0;
  for (const auto& e : fs::recursive_directory_iterator(b))
    if (e.is_regular_file()) ++other;
  if (other != rel.size()) {
    diff = "file counts differ";
    return false;
  }
  for (const auto& r : rel) {
    ++files;
    if (!fs::exists(b / r) || io::read_text(a / r) != io::read_text(b / r)) {
      diff = r.string();
      return false;
    }
  }
  return true;
}

}  // namespace

int main() {
  criterion(1, "dice exactness", [] {
    auto d = testing::dice();
    auto t0 = Clock::now();
    auto X = var("X", "w");
    Partition halves(d, {Event::atoms({"1", "2"}), Event::atoms({"3", "4", "5", "6"})});
    auto ce = partition_cond_exp(d, X, halves);
    Partition trivial(d, {Event::all()});
    double whole = partition_cond_exp(d, X, trivial).values[0];
    double empty = cond_expectation_event(d, X, Event::none()).value;
    double secs = seconds_since(t0);
    double err = std::max({std::fabs(ce.values[0] - 1.5), std::fabs(ce.values[1] - 4.5),
                           std::fabs(empty), std::fabs(whole - 3.5)});
    return Outcome{err <= 1e-12 && secs < 1e-3,
                   fmt("max error %.2e, %.1f us", err, secs * 1e6)};
  });

  criterion(2, "Gaussian posterior", [] {
    auto t0 = Clock::now();
    const std::vector<double> ys{-2, -1, 0, 1, 2};
    auto grid = testing::model("gaussian-posterior");
    auto phi = evaluate_on_grid(grid.space(), grid.variable("X"), grid.variable("Y"), ys);
    double grid_err = 0;
    bool ok = true;
    for (std::size_t i = 0; i < ys.size(); ++i) {
      ok = ok && phi.ok(i);
      grid_err = std::max(grid_err, std::fabs(phi.value(i) - oracle::posterior_mean(ys[i])));
    }
    auto mc = testing::model("gaussian-posterior-mc");
    mc.set_seed(20240917);
    auto mphi = evaluate_on_grid(mc.space(), mc.variable("X"), mc.variable("Y"), ys);
    double worst_se = 0;
    for (std::size_t i = 0; i < ys.size(); ++i) {
      ok = ok && mphi.ok(i);
      const auto& t = *mphi.traces[i];
      double se = t.std_errors.back();
      worst_se = std::max(worst_se, std::fabs(t.value - oracle::posterior_mean(ys[i])) / se);
    }
    double secs = seconds_since(t0);
    ok = ok && grid_err <= 1e-4 && worst_se <= 3 && secs < 30;
    return Outcome{ok, fmt("grid max error %.2e, sampler max |err|/se %.2f", grid_err, worst_se)};
  });

  criterion(3, "window-density agreement", [] {
    auto t0 = Clock::now();
    double worst = 0;
    for (const char* name :
         {"bivariate-normal-rho0", "bivariate-normal-rho05", "bivariate-normal-rho09"}) {
      auto m = testing::model(name);
      std::vector<double> ys;
      for (int i = 0; i < 21; ++i) ys.push_back(-2 + 0.2 * i);
      auto phi = evaluate_on_grid(m.space(), m.variable("Z"), m.variable("Y"), ys);
      auto joint = JointDensity::from_space(m.space(), "z", "y");
      for (std::size_t i = 0; i < ys.size(); ++i) {
        double d = conditional_expectation_via_density(joint, ys[i], [](double z) { return z; });
        worst = std::max(worst, phi.ok(i) ? std::fabs(phi.value(i) - d) : INFINITY);
      }
    }
    double secs = seconds_since(t0);
    return Outcome{worst <= 1e-3 && secs < 60, fmt("max |window - density| %.2e", worst)};
  });

  criterion(4, "tower property", [] {
    double discrete = 0;
    auto dice = testing::model("dice");
    auto coin = testing::model("coin-pair");
    auto check = [&](const Model& m, const char* x, const Partition& p) {
      auto X = m.variable(x);
      auto ce = partition_cond_exp(m.space(), X, p);
      double tower = 0;
      for (std::size_t i = 0; i < ce.values.size(); ++i) tower += ce.values[i] * ce.probabilities[i];
      return std::fabs(tower - expectation(m.space(), X).value);
    };
    for (const char* x : {"X", "X2"}) {
      discrete = std::max(discrete, check(dice, x, dice.partition("halves")));
      discrete = std::max(discrete, check(dice, x, dice.partition("trivial")));
      discrete = std::max(discrete, check(dice, x, Partition::by_values(dice.space(), dice.variable("parity"))));
    }
    discrete = std::max(discrete, check(coin, "S", coin.partition("by_first")));
    auto aug = testing::model("dice-augmented");
    discrete = std::max(discrete, check(aug, "X", Partition::by_values(aug.space(), aug.variable("X"))));

    double grid_err = 0, grid_tol = 0;
    for (const char* name : {"gaussian-posterior", "uniform-square"}) {
      auto m = testing::model(name);
      bool gauss = std::string(name) == "gaussian-posterior";
      auto cut = Expr::parse(gauss ? "x + e <= 0" : "y <= 0.5");
      Partition p(m.space(), {Event::predicate(cut), Event::complement(Event::predicate(cut))});
      grid_err = std::max(grid_err, check(m, gauss ? "X" : "Z", p));
      grid_tol = std::max(grid_tol, m.space().grid_metadata()->tolerance);
    }
    return Outcome{discrete <= 1e-12 && grid_err <= grid_tol,
                   fmt("discrete %.2e, grid %.2e (tol %.0e)", discrete, grid_err, grid_tol)};
  });

  criterion(5, "total probability", [] {
    testing::Gen g(2024);
    auto dice = testing::model("dice");
    auto coin = testing::model("coin-pair");
    auto dp = dice.partition("halves");
    auto cp = coin.partition("by_first");
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
      for (auto [m, p] : {std::pair{&dice, &dp}, std::pair{&coin, &cp}}) {
        std::vector<std::string> ids;
        for (const auto& id : m->space().atoms()->ids)
          if (g.coin()) ids.push_back(id);
        auto a = Event::atoms(ids);
        worst = std::max(worst, std::fabs(total_probability(m->space(), a, *p).value -
                                          probability(m->space(), a).value));
      }
    }
    return Outcome{worst <= 1e-12, fmt("200 events, max error %.2e", worst)};
  });

  criterion(6, "factorization", [] {
    auto fig = testing::model("constant-level");
    auto r = factorize(fig.space(), fig.variable("g"), fig.variable("f"));
    bool counter = r.verdict == FactorVerdict::NotMeasurable && r.offending().size() == 1 &&
                   r.levels[r.offending()[0]].witnesses.size() == 2;
    testing::Gen g(6);
    bool exact = true;
    std::size_t trips = 0;
    for (const char* name : {"dice", "coin-pair", "dice-augmented", "null-pair"}) {
      auto m = testing::model(name);
      const auto& coords = m.space().atoms()->coords;
      for (int rep = 0; rep < 20; ++rep) {
        // Y = first coordinate (or c1 + c2), phi a random table on its values.
        std::vector<double> y = coords[0];
        if (coords.size() > 1)
          for (std::size_t i = 0; i < y.size(); ++i) y[i] += coords[1][i];
        std::vector<double> phi_of(8);
        for (auto& v : phi_of) v = g.uniform(-5, 5);
        std::vector<double> gv;
        for (double v : y) gv.push_back(phi_of[static_cast<std::size_t>(v)]);
        auto res = factorize(m.space(), RandomVariable::table("g", gv), RandomVariable::table("Y", y));
        exact = exact && res.verdict == FactorVerdict::Factored;
        for (const auto& lvl : res.levels)
          exact = exact && lvl.phi == phi_of[static_cast<std::size_t>(lvl.y)];
        ++trips;
      }
    }
    return Outcome{counter && exact,
                   std::string("constant-level ") + (counter ? "NotMeasurable, 2 witnesses" : "wrong") +
                       "; " + std::to_string(trips) + " round trips " + (exact ? "exact" : "inexact")};
  });

  criterion(7, "non-uniqueness", [] {
    auto m = testing::model("dice-augmented");
    auto demo = too_coarse_demo(m.space(), m.variable("X"), m.event("null"));
    double worst = std::max(demo.mean_report.max_residual(), demo.alternative_report.max_residual());
    bool ok = demo.mean_report.pass() && demo.alternative_report.pass() && worst <= 1e-12 &&
              demo.differing_points == std::vector<std::string>{"a0"};
    return Outcome{ok, fmt("max residual %.2e, versions differ only on the null atom", worst)};
  });

  criterion(8, "paradox margin", [] {
    auto fx = testing::paradox_fixture();
    auto out = run_paradox(paradox_instance("ratio-normal"));
    double gap = out.main.discrepancy;
    bool ok = out.main.all_converged && std::fabs(gap - fx.gap) <= 1e-2 &&
              gap > 10 * out.main.combined_tolerance &&
              out.control.discrepancy <= out.control.combined_tolerance;
    return Outcome{ok, fmt("gap %.6f (oracle %.1f), combined tol %.1e", gap, fx.gap,
                           out.main.combined_tolerance) +
                           fmt(", control gap %.1e", out.control.discrepancy)};
  });

  criterion(9, "convergence order", [] {
    auto m = testing::model("gaussian-posterior");
    double smooth = INFINITY;
    for (double y : {1.0, 2.0})
      smooth = std::min(smooth, convergence_order(window_estimate(m.space(), m.variable("X"),
                                                                  m.variable("Y"), y)));
    WindowOptions opt;
    opt.schedule.depth = 24;
    double kink = convergence_order(window_estimate(m.space(), m.variable("K"), m.variable("Y"), 0.0, opt));
    return Outcome{smooth >= 1.8 && std::fabs(kink - 1.0) <= 0.2,
                   fmt("smooth %.3f, kink %.3f", smooth, kink)};
  });

  criterion(10, "determinism", [] {
    auto base = fs::temp_directory_path() / "condpoint-acceptance";
    fs::remove_all(base);
    auto suite = (testing::source_dir() / "scenarios" / "suite.json").string();
    for (const char* run : {"a", "b"}) {
      std::string cmd = std::string(CONDPOINT_CLI) + " --seed 99 --out " + (base / run).string() +
                        " run " + suite + " > /dev/null 2>&1";
      if (std::system(cmd.c_str()) != 0) return Outcome{false, std::string("run ") + run + " failed"};
    }
    std::size_t files = 0;
    std::string diff;
    bool same = same_tree(base / "a", base / "b", files, diff);
    fs::remove_all(base);
    return Outcome{same && files > 0, same ? std::to_string(files) + " artifacts byte-identical"
                                           : "differs: " + diff};
  });

  return failures == 0 ? 0 : 1;
}
