#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <string>

#include "condpoint/config.hpp"
#include "condpoint/error.hpp"
#include "condpoint/json_out.hpp"
#include "condpoint/scenario.hpp"
#include "support.hpp"

using namespace condpoint;

namespace {
template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Task;
}
nlohmann::json dice_config() { return parse_json_file(testing::config_path("dice")); }
}  // namespace

TEST_CASE("weights and axes") {
  CHECK(parse_weight("1/6") == 1.0 / 6);
  CHECK(parse_weight(0.25) == 0.25);
  CHECK(kind_of([] { parse_weight("1/0"); }) == ErrorKind::Config);
  CHECK(kind_of([] { parse_weight("x"); }) == ErrorKind::Config);
  auto a = parse_axis("-1:1:5");
  CHECK(a.n == 5);
  CHECK(a.pitch() == 0.5);
  CHECK(kind_of([] { parse_axis("1:0:5"); }) == ErrorKind::Config);
  auto s = parse_schedule(nlohmann::json{{"eps0", 2}, {"depth", 4}});
  CHECK(s.values(1).size() == 4);
}

TEST_CASE("config validation") {
  auto j = dice_config();
  CHECK_NOTHROW(parse_model(j));
  auto no_version = j;
  no_version.erase("schema_version");
  CHECK(kind_of([&] { parse_model(no_version); }) == ErrorKind::Config);
  auto bad_kind = j;
  bad_kind["space"]["kind"] = "lattice";
  CHECK(kind_of([&] { parse_model(bad_kind); }) == ErrorKind::Config);
  auto bad_weights = j;
  bad_weights["space"]["atoms"][0]["weight"] = "1/2";
  CHECK(kind_of([&] { parse_model(bad_weights); }) == ErrorKind::Config);
  auto bad_expr = j;
  bad_expr["variables"]["X"] = "w +";
  CHECK(kind_of([&] { parse_model(bad_expr); }) == ErrorKind::Config);
  CHECK(kind_of([] { load_model("/nonexistent/config.json"); }) == ErrorKind::Config);
}

TEST_CASE("model names, expressions and partitions") {
  auto m = parse_model(dice_config());
  CHECK(expectation(m.space(), m.variable("X + X2")).value == doctest::Approx(3.5 + 91.0 / 6));
  CHECK(probability(m.space(), m.event("odd")).value == doctest::Approx(0.5));
  CHECK(probability(m.space(), m.event("small")).value == doctest::Approx(1.0 / 3));
  CHECK(probability(m.space(), m.event("w >= 5")).value == doctest::Approx(1.0 / 3));
  CHECK(m.partition("halves").size() == 2);
  CHECK(kind_of([&] { m.partition("nope"); }) == ErrorKind::Config);
}

TEST_CASE("JSON numbers round-trip at 17 digits") {
  io::Json j = io::document("condpoint.test");
  j["x"] = io::number(0.1);
  j["inf"] = io::number(std::numeric_limits<double>::infinity());
  j["nan"] = io::number(std::nan(""));
  j["v"] = io::numbers({1.0 / 3, -2.5});
  auto text = io::dump(j);
  CHECK(text.find("0.10000000000000001") != std::string::npos);
  CHECK(text.find("\"inf\"") != std::string::npos);
  CHECK(text.back() == '\n');
  auto back = nlohmann::json::parse(text);
  CHECK(back["schema"] == "condpoint.test");
  CHECK(back["schema_version"] == 1);
  CHECK(io::read_number(back["x"]) == 0.1);
  CHECK(io::read_number(back["v"][0]) == 1.0 / 3);
  CHECK(std::isinf(io::read_number(back["inf"])));
  CHECK(std::isnan(io::read_number(back["nan"])));
  io::Csv csv({"a", "b"});
  csv.row({"1", "2"});
  CHECK(csv.str() == "a,b\n1,2\n");
}

TEST_CASE("compare tables") {
  Table a{"a", {0, 1, 2}, {0.0, 0.5, 1.0}};
  Table b{"b", {0, 1, 2}, {0.0, 0.5005, 1.0}};
  auto r = compare(a, b, 1e-3);
  CHECK(r.pass);
  CHECK(r.max_diff == doctest::Approx(5e-4));
  CHECK_FALSE(compare(a, b, 1e-4).pass);
  Table c{"c", {0, 1}, {0, 0}};
  CHECK(kind_of([&] { compare(a, c, 1); }) == ErrorKind::GridMismatch);
  auto j = to_json(r);
  CHECK(j["schema"] == "condpoint.compare");
}

TEST_CASE("suite artifacts carry their schemas") {
  auto dir = std::filesystem::temp_directory_path() / "condpoint-io-suite";
  std::filesystem::remove_all(dir);
  SuiteOptions opt;
  opt.out_dir = dir;
  opt.seed = 5;
  auto result = run_suite(testing::source_dir() / "scenarios" / "suite.json", opt);
  CHECK(result.pass());
  CHECK(result.summary()["schema"] == "condpoint.summary");
  std::size_t seen = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    auto j = parse_json_file(entry.path());
    CAPTURE(entry.path().string());
    REQUIRE(j.contains("schema"));
    CHECK(j["schema_version"] == 1);
    auto schema = j["schema"].get<std::string>();
    CHECK(schema.rfind("condpoint.", 0) == 0);
    if (schema == "condpoint.pointwise") {
      CHECK(j.contains("table"));
      // Every pointwise artifact reads back as a comparable table.
      auto t = read_table(entry.path().string());
      CHECK(compare(t, t, 0).pass);
    }
    ++seen;
  }
  CHECK(seen >= result.scenarios.size());
  std::filesystem::remove_all(dir);
}

TEST_CASE("bad suites are config errors") {
  auto dir = std::filesystem::temp_directory_path() / "condpoint-bad-suite";
  std::filesystem::create_directories(dir);
  io::write_text(dir / "suite.json",
                 R"({"schema_version": 1, "scenarios": [{"name": "x", "task": "window", "config": "missing.json", "params": {}}]})");
  SuiteOptions opt;
  opt.out_dir = dir / "out";
  CHECK(kind_of([&] { run_suite(dir / "suite.json", opt); }) == ErrorKind::Config);
  io::write_text(dir / "empty.json", R"({"schema_version": 1, "scenarios": []})");
  auto r = run_suite(dir / "empty.json", opt);
  CHECK(r.pass());
  CHECK(r.scenarios.empty());
  std::filesystem::remove_all(dir);
}
