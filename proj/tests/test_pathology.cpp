#include <doctest.h>

#include <cmath>
#include <vector>

#include "condpoint/error.hpp"
#include "condpoint/pathology.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
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
}  // namespace

TEST_CASE("the frozen paradox fixture matches an independent quadrature") {
  auto fx = testing::paradox_fixture();
  auto sq = [](double z) { return z * z; };
  auto ab = [](double z) { return std::fabs(z); };
  CHECK(std::fabs(oracle::limit_via_y(sq) - fx.second_moment_via_y) < 1e-9);
  CHECK(std::fabs(oracle::limit_via_w(sq) - fx.second_moment_via_w) < 1e-9);
  CHECK(std::fabs(oracle::limit_via_y(ab) - fx.abs_mean_via_y) < 1e-9);
  CHECK(std::fabs(oracle::limit_via_w(ab) - fx.abs_mean_via_w) < 1e-9);
  CHECK(fx.gap == doctest::Approx(fx.second_moment_via_w - fx.second_moment_via_y));
}

TEST_CASE("too coarse: two versions differing on a null atom") {
  auto m = testing::model("dice-augmented");
  auto demo = too_coarse_demo(m.space(), m.variable("X"), m.event("null"));
  CHECK(demo.mean_report.pass());
  CHECK(demo.alternative_report.pass());
  CHECK(demo.mean_report.max_residual() <= 1e-12);
  CHECK(demo.alternative_report.max_residual() <= 1e-12);
  CHECK(demo.differing_points == std::vector<std::string>{"a0"});
  CHECK(std::fabs(demo.expectation - 3.5) < 1e-12);

  auto empty = too_coarse_demo(m.space(), m.variable("X"), Event::none());
  CHECK(empty.differing_points.empty());
  CHECK(kind_of([&] { too_coarse_demo(m.space(), m.variable("X"), Event::atoms({"1"})); }) ==
        ErrorKind::NotNull);
}

TEST_CASE("too fine: conditioning on every event returns X on the null set") {
  auto m = testing::model("null-pair");
  auto demo = too_fine_demo(m.space(), m.variable("X"), m.event("null"));
  CHECK(demo.witnesses == std::vector<double>{0, 1});
  CHECK(kind_of([&] { too_fine_demo(m.space(), m.variable("X"), Event::none()); }) ==
        ErrorKind::DegenerateA);
  CHECK(kind_of([&] { too_fine_demo(m.space(), m.variable("X"), Event::all()); }) ==
        ErrorKind::NotNull);

  auto u = testing::model("uniform-square");
  auto line = too_fine_demo(u.space(), u.variable("Z"), u.event("line"));
  REQUIRE(line.witnesses.size() > 100);
  CHECK(line.witnesses.front() == doctest::Approx(0.0));
  CHECK(line.witnesses.back() == doctest::Approx(1.0));
}

TEST_CASE("Borel-Kolmogorov on the grid instance") {
  auto fx = testing::paradox_fixture();
  auto inst = paradox_instance("ratio-normal");
  auto out = run_paradox(inst);
  CHECK(out.pass());
  REQUIRE(out.main.families.size() == 2);
  const auto& via_y = out.main.families[0];
  const auto& via_w = out.main.families[1];
  CHECK(std::fabs(via_y.trace.value - fx.second_moment_via_y) < 1e-3);
  CHECK(std::fabs(via_w.trace.value - fx.second_moment_via_w) < 1e-3);
  CHECK(std::fabs(via_y.abs_mean - fx.abs_mean_via_y) < 1e-3);
  CHECK(std::fabs(via_w.abs_mean - fx.abs_mean_via_w) < 1e-3);
  CHECK(std::fabs(out.main.discrepancy - fx.gap) < 1e-2);
  CHECK(out.main.discrepancy > 10 * out.main.combined_tolerance);
  CHECK(out.control.discrepancy <= out.control.combined_tolerance);

  // Limiting conditional densities: phi(z) and |z| phi(z) / E|Z|.
  double worst_y = 0, worst_w = 0;
  for (std::size_t i = 0; i < via_y.z.size(); ++i) {
    double z = via_y.z[i];
    worst_y = std::max(worst_y, std::fabs(via_y.density[i] - oracle::normal_pdf(z)));
    worst_w = std::max(worst_w, std::fabs(via_w.density[i] -
                                          std::fabs(z) * oracle::normal_pdf(z) / fx.abs_mean_via_y));
  }
  CHECK(worst_y < 1e-3);
  CHECK(worst_w < 1e-2);
}

TEST_CASE("paradox gap is stable under grid refinement") {
  auto coarse = run_paradox(paradox_instance("ratio-normal", 1, 600));
  auto fine = run_paradox(paradox_instance("ratio-normal", 1, 800));
  CHECK(std::fabs(coarse.main.discrepancy - fine.main.discrepancy) < 1e-3);
}

TEST_CASE("paradox gap is stable across sampler seeds") {
  auto a = run_paradox(paradox_instance("ratio-normal-mc", 1));
  auto b = run_paradox(paradox_instance("ratio-normal-mc", 2));
  CHECK(a.pass());
  CHECK(b.pass());
  double tol = std::max(a.main.combined_tolerance, b.main.combined_tolerance);
  CHECK(std::fabs(a.main.discrepancy - b.main.discrepancy) < 2 * tol);
}

TEST_CASE("families that do not shrink are rejected") {
  auto inst = paradox_instance("ratio-normal", 1, 200);
  ApproximationFamily flat{"flat", RandomVariable::expression("flat", "0 * y"), 0.0, Schedule{1.0}};
  CHECK(kind_of([&] {
          borel_kolmogorov(inst.space, inst.statistic, "z", {flat}, inst.options, "{Y = 0}");
        }) == ErrorKind::FamilyNotShrinking);
  ApproximationFamily far{"far", RandomVariable::expression("Y", "y"), 100.0, Schedule{1.0}};
  CHECK(kind_of([&] {
          borel_kolmogorov(inst.space, inst.statistic, "z", {far}, inst.options, "{Y = 100}");
        }) == ErrorKind::FamilyNotShrinking);
}
