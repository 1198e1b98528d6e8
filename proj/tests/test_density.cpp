#include <doctest.h>

#include <cmath>
#include <vector>

#include "condpoint/density.hpp"
#include "condpoint/error.hpp"
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
JointDensity bivariate(double rho, std::size_t n = 801) {
  return JointDensity::from_space(testing::bivariate_grid(rho, n), "z", "y");
}
JointDensity tabulated(std::size_t n, double lo, double hi,
                       const std::function<double(double, double)>& f, double tol = 1e-6) {
  Axis a{lo, hi, n};
  std::vector<double> v(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) v[i * n + j] = f(a.node(i), a.node(j));
  return JointDensity("z", a, "y", a, v, tol);
}
}  // namespace

TEST_CASE("marginals") {
  auto j = bivariate(0.0);
  for (double y : {-2.0, -0.3, 0.0, 1.7}) CHECK(std::fabs(marginal(j, y) - oracle::normal_pdf(y)) < 1e-8);
  auto prod = tabulated(401, -8, 8, [](double z, double y) {
    return oracle::normal_pdf(z, 0, 2) * oracle::normal_pdf(y, 1, 0.5);
  });
  CHECK(std::fabs(marginal(prod, 0.4) - oracle::normal_pdf(0.4, 1, 0.5)) < 1e-7);
  auto uni = tabulated(101, 0, 1, [](double, double) { return 1.0; });
  CHECK(marginal(uni, 0.3) == doctest::Approx(1.0));
  CHECK(kind_of([&] { marginal(uni, 1.5); }) == ErrorKind::OutOfRectangle);
}

TEST_CASE("conditional density of a correlated normal") {
  auto j = bivariate(0.5);
  auto c = conditional_density(j, 1.0);
  double worst = 0;
  for (std::size_t i = 0; i < c.z_axis.n; ++i)
    worst = std::max(worst, std::fabs(c.values[i] - oracle::bivariate_cond_density(0.5, 1.0, c.z_axis.node(i))));
  CHECK(worst < 1e-6);
  CHECK(std::fabs(c.defect) < 1e-10);
  // Normalized and non-negative.
  double integral = 0;
  for (std::size_t i = 0; i < c.z_axis.n; ++i) {
    CHECK(c.values[i] >= 0);
    integral += c.z_axis.weight(i) * c.values[i];
  }
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-12));
  // The conditional CDF rises monotonically from 0 to 1.
  double cdf = 0, prev = 0;
  for (std::size_t i = 0; i < c.z_axis.n; ++i) {
    cdf += c.z_axis.weight(i) * c.values[i];
    CHECK(cdf >= prev);
    prev = cdf;
  }
  CHECK(cdf == doctest::Approx(1.0));
}

TEST_CASE("independence gives back the z marginal") {
  auto j = bivariate(0.0);
  auto c = conditional_density(j, -1.3);
  for (std::size_t i = 0; i < c.z_axis.n; i += 40)
    CHECK(std::fabs(c.values[i] - oracle::normal_pdf(c.z_axis.node(i))) < 1e-8);
}

TEST_CASE("Gaussian posterior by the density route") {
  auto m = testing::model("gaussian-posterior-joint");
  auto j = JointDensity::from_space(m.space(), "x", "y");
  auto c = conditional_density(j, 2.0);
  for (std::size_t i = 0; i < c.z_axis.n; i += 20)
    CHECK(std::fabs(c.values[i] - oracle::normal_pdf(c.z_axis.node(i), 1.0, 0.5)) < 1e-6);
  CHECK(std::fabs(conditional_expectation_via_density(j, 2.0, [](double z) { return z; }) - 1.0) < 1e-8);
  CHECK(conditional_expectation_via_density(j, 2.0, [](double) { return 1.0; }) == doctest::Approx(1.0));
  CHECK(std::fabs(conditional_expectation_via_density(j, 2.0, Expr::parse("x^2")) - 1.5) < 1e-6);
}

TEST_CASE("conditional means along y and reconstruction of E[g(Z)]") {
  auto j = bivariate(0.9);
  for (double y : {-2.0, 0.5, 1.5})
    CHECK(std::fabs(conditional_expectation_via_density(j, y, [](double z) { return z; }) - 0.9 * y) < 1e-8);
  // int E[Z^2|y] f_Y(y) dy = E[Z^2] = 1.
  double total = 0;
  const auto& ya = j.y_axis();
  for (std::size_t i = 0; i < ya.n; i += 1) {
    double f = marginal(j, ya.node(i));
    if (f <= kDensityFloor) continue;
    total += ya.weight(i) * f *
             conditional_expectation_via_density(j, ya.node(i), [](double z) { return z * z; });
  }
  CHECK(std::fabs(total - 1.0) < 1e-6);
}

TEST_CASE("null marginals are refused") {
  auto half = tabulated(101, 0, 2, [](double z, double y) { return (z <= 1 && y <= 1) ? 1.0 : 0.0; }, 0.05);
  CHECK(kind_of([&] { conditional_density(half, 1.5); }) == ErrorKind::NullMarginal);
  CHECK_NOTHROW(conditional_density(half, 0.5));
}

TEST_CASE("window and density routes agree") {
  for (double rho : {0.0, 0.5, 0.9}) {
    auto s = testing::bivariate_grid(rho, 801);
    auto j = JointDensity::from_space(s, "z", "y");
    auto phi = evaluate_on_grid(s, RandomVariable::expression("Z", "z"),
                                RandomVariable::expression("Y", "y"), {-1.5, 0.25, 1.0});
    for (std::size_t i = 0; i < phi.y.size(); ++i) {
      double d = conditional_expectation_via_density(j, phi.y[i], [](double z) { return z; });
      CHECK(std::fabs(phi.value(i) - d) < 1e-3);
    }
  }
}
