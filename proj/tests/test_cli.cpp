#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "condpoint/json_out.hpp"
#include "support.hpp"

namespace fs = std::filesystem;

namespace {
int run(const std::string& args, const fs::path& out = {}, const fs::path& err = {}) {
  std::string cmd = std::string(CONDPOINT_CLI) + " " + args;
  cmd += " > " + (out.empty() ? std::string("/dev/null") : out.string());
  cmd += " 2> " + (err.empty() ? std::string("/dev/null") : err.string());
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}
std::string cfg(const char* name) { return testing::config_path(name).string(); }
fs::path tmp(const char* name) {
  auto p = fs::temp_directory_path() / "condpoint-cli" / name;
  fs::create_directories(p.parent_path());
  return p;
}
}  // namespace

TEST_CASE("window subcommand writes a pointwise artifact") {
  auto out = tmp("window.json");
  CHECK(run("window --space " + cfg("dice") + " --x X2 --y Y --at 3", out) == 0);
  auto j = nlohmann::json::parse(condpoint::io::read_text(out));
  CHECK(j["schema"] == "condpoint.pointwise");
  CHECK(condpoint::io::read_number(j["table"]["value"][0]) == 9.0);
}

TEST_CASE("factorize verdict expectations drive the exit code") {
  CHECK(run("factorize --space " + cfg("constant-level") + " --g g --y f --expect-verdict NotMeasurable") == 0);
  CHECK(run("factorize --space " + cfg("constant-level") + " --g g --y f --expect-verdict Factored") == 1);
}

TEST_CASE("errors map to exit codes with a failure document on stderr") {
  auto err = tmp("err.json");
  CHECK(run("window --space /nonexistent.json --x X --y Y --at 0", {}, err) == 2);
  auto j = nlohmann::json::parse(condpoint::io::read_text(err));
  CHECK(j["schema"] == "condpoint.failures");
  // A non-approachable node is a flagged verdict, not a task error.
  CHECK(run("window --space " + cfg("dice") + " --x X --y Y --at 3.5", {}, err) == 1);
  CHECK(run("window --space " + cfg("gaussian-posterior-mc") + " --x X --y Y --at 0") == 2);
}

TEST_CASE("empty suite succeeds and writes only the summary") {
  auto dir = tmp("empty-run");
  fs::remove_all(dir);
  auto suite = (testing::source_dir() / "scenarios" / "empty.json").string();
  CHECK(run("run " + suite + " --out " + dir.string()) == 0);
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++files;
  CHECK(files == 1);
  CHECK(fs::exists(dir / "summary.json"));
}

TEST_CASE("compare subcommand") {
  auto a = tmp("cmp-a.json"), b = tmp("cmp-b.json"), out = tmp("cmp.json");
  CHECK(run("window --space " + cfg("dice") + " --x X2 --y Y --at 3", a) == 0);
  CHECK(run("window --space " + cfg("dice") + " --x X2 --y Y --at 4", b) == 0);
  CHECK(run("compare " + a.string() + " " + a.string(), out) == 0);
  CHECK(run("compare " + a.string() + " " + b.string()) == 3);
}

TEST_CASE("parallel runs write the same bytes as sequential runs") {
  auto seq = tmp("suite-seq"), par = tmp("suite-par");
  fs::remove_all(seq);
  fs::remove_all(par);
  auto suite = (testing::source_dir() / "scenarios" / "suite.json").string();
  REQUIRE(run("--seed 3 --out " + seq.string() + " run " + suite) == 0);
  REQUIRE(run("--seed 3 --out " + par.string() + " run " + suite + " --parallel") == 0);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(seq)) {
    CAPTURE(e.path().filename().string());
    CHECK(condpoint::io::read_text(e.path()) ==
          condpoint::io::read_text(par / e.path().filename()));
    ++files;
  }
  CHECK(files > 20);
}
