#include <doctest.h>

#include <cmath>
#include <vector>

#include "condpoint/error.hpp"
#include "condpoint/measure.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace condpoint;
using testing::Gen;

namespace {
RandomVariable var(const char* name, const char* text) {
  return RandomVariable::expression(name, text);
}
ProbabilitySpace normal_line(std::size_t n = 4001) {
  return ProbabilitySpace::grid1d("w", Axis{-10, 10, n},
                                  Distribution::normal({0.0}, {1.0}), 1e-8);
}
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

TEST_CASE("dice probabilities and expectations") {
  auto d = testing::dice();
  auto X = var("X", "w");
  CHECK(probability(d, Event::atoms({"1", "2"})).value == doctest::Approx(1.0 / 3).epsilon(1e-14));
  CHECK(probability(d, Event::all()).value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(probability(d, Event::none()).value == 0.0);
  CHECK(std::fabs(expectation(d, X).value - 3.5) < 1e-12);
  auto low = cond_expectation_event(d, X, Event::atoms({"1", "2"}));
  auto high = cond_expectation_event(d, X, Event::atoms({"3", "4", "5", "6"}));
  CHECK(std::fabs(low.value - 1.5) < 1e-12);
  CHECK(std::fabs(high.value - 4.5) < 1e-12);
  auto empty = cond_expectation_event(d, X, Event::none());
  CHECK(empty.degenerate);
  CHECK(empty.value == 0.0);
}

TEST_CASE("standard normal on a grid") {
  auto s = normal_line();
  auto w = var("w", "w");
  CHECK(probability(s, Event::interval(w, -INFINITY, 0, false, true)).value ==
        doctest::Approx(0.5).epsilon(1e-8));
  CHECK(probability(s, Event::all()).value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(expectation(s, var("sq", "w^2")).value == doctest::Approx(1.0).epsilon(1e-6));
  // Interval probabilities against the normal CDF.
  Gen g(3);
  for (int i = 0; i < 25; ++i) {
    double a = g.uniform(-3, 1), b = a + g.uniform(0.01, 2);
    double p = probability(s, Event::interval(w, a, b)).value;
    CHECK(std::fabs(p - (oracle::normal_cdf(b) - oracle::normal_cdf(a))) < 1e-5);
  }
}

TEST_CASE("probability of Omega is one on every space kind") {
  auto mc = ProbabilitySpace::sampler({"a", "b"}, Distribution::bivariate_normal(0.3), 5, 1000);
  for (const auto* s : {&mc}) CHECK(probability(*s, Event::all()).value == doctest::Approx(1.0));
  auto grid = testing::bivariate_grid(0.3, 201);
  CHECK(probability(grid, Event::all()).value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(probability(testing::coin_pair(), Event::all()).value == doctest::Approx(1.0));
}

TEST_CASE("constant variables and linearity") {
  Gen g(5);
  for (int trial = 0; trial < 30; ++trial) {
    auto s = testing::random_discrete(g, 8, 3);
    double c = g.uniform(-4, 4);
    auto cst = RandomVariable::expression("c", Expr::constant(c));
    CHECK(std::fabs(expectation(s, cst).value - c) < 1e-12);
    double a = g.uniform(-2, 2), b = g.uniform(-2, 2);
    auto X = var("X", "u"), Y = var("Y", "k^2");
    auto comb = RandomVariable::expression(
        "aX+bY", Expr::parse(std::to_string(a) + "*u + " + std::to_string(b) + "*k^2"));
    double lhs = expectation(s, comb).value;
    double ra = std::stod(std::to_string(a)), rb = std::stod(std::to_string(b));
    double rhs = ra * expectation(s, X).value + rb * expectation(s, Y).value;
    CHECK(std::fabs(lhs - rhs) < 1e-12);
    // E[X | Omega] = E[X]
    CHECK(std::fabs(cond_expectation_event(s, X, Event::all()).value - expectation(s, X).value) <
          1e-12);
  }
}

TEST_CASE("pushforward laws") {
  auto d = testing::dice();
  auto parity = pushforward(d, var("parity", "w % 2"));
  REQUIRE(parity.atoms());
  REQUIRE(parity.atoms()->weights.size() == 2);
  CHECK(parity.atoms()->weights[0] == doctest::Approx(0.5));
  CHECK(parity.atoms()->weights[1] == doctest::Approx(0.5));
  auto ident = pushforward(d, var("w", "w"));
  CHECK(ident.atoms()->weights.size() == 6);

  auto grid = testing::bivariate_grid(0.5, 401);
  auto law = pushforward(grid, var("y", "y"), Axis{-6, 6, 241});
  REQUIRE(law.grid1d());
  const auto& g1 = *law.grid1d();
  double worst = 0;
  for (std::size_t i = 0; i < g1.axis.n; ++i)
    worst = std::max(worst, std::fabs(g1.density[i] - oracle::normal_pdf(g1.axis.node(i))));
  CHECK(worst < 2e-3);
  CHECK(kind_of([&] { pushforward(d, var("w", "w"), Axis{100, 200, 11}); }) ==
        ErrorKind::EmptyRange);
}

TEST_CASE("sampler estimates are deterministic per seed") {
  auto a = ProbabilitySpace::sampler({"z", "y"}, Distribution::bivariate_normal(0.5), 42, 20000);
  auto X = var("Z", "z");
  auto e1 = expectation(a, X), e2 = expectation(a, X);
  CHECK(e1.value == e2.value);
  CHECK(e1.std_error == e2.std_error);
  CHECK(std::fabs(e1.value) < 4 * e1.std_error + 1e-12);
  auto other = expectation(a.with_seed(43), X);
  CHECK(other.value != e1.value);
}

TEST_CASE("invariant violations raise named errors") {
  CHECK(kind_of([] {
          ProbabilitySpace::discrete({"w"}, {"a", "b"}, {0.5, 0.6}, {{0, 1}});
        }) == ErrorKind::Config);
  CHECK(kind_of([] {
          ProbabilitySpace::discrete({"w"}, {"a", "b"}, {1.5, -0.5}, {{0, 1}});
        }) == ErrorKind::Config);
  // Density mass mostly outside the rectangle: quadrature integral is off.
  CHECK(kind_of([] {
          ProbabilitySpace::grid1d("w", Axis{0, 1, 101}, Distribution::normal({0.0}, {1.0}), 1e-8);
        }) == ErrorKind::Config);
  auto d = testing::dice();
  CHECK(kind_of([&] { probability(d, Event::predicate(Expr::parse("log(w - 3)"))); }) ==
        ErrorKind::UndefinedPredicate);
  auto s = ProbabilitySpace::grid1d("w", Axis{-1, 1, 201}, std::vector<double>(201, 0.5), 1e-8);
  CHECK(kind_of([&] { expectation(s, var("inv", "1 / w")); }) == ErrorKind::NonIntegrable);
}
