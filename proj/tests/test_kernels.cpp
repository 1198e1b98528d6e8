#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "condpoint/kernels.hpp"
#include "support.hpp"

using namespace condpoint::kernels;
using testing::Gen;

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

bool rel_close(double a, double b, double rtol = 1e-12) {
  return std::fabs(a - b) <= rtol * (1.0 + std::fabs(a) + std::fabs(b));
}

IntervalBounds random_bounds(Gen& g, const std::vector<double>& v) {
  IntervalBounds b{g.uniform(-2, 1), g.uniform(-1, 2), g.coin(), g.coin()};
  // Hit exact data values so that closedness matters.
  if (!v.empty() && g.coin(0.3)) b.lo = v[g.index(v.size())];
  if (!v.empty() && g.coin(0.3)) b.hi = v[g.index(v.size())];
  if (g.coin(0.1)) b.lo = -std::numeric_limits<double>::infinity();
  if (g.coin(0.1)) b.hi = std::numeric_limits<double>::infinity();
  return b;
}

// Brute-force reference: subdivide each cell and sum midpoint contributions.
CutSums cut_cells_brute(const std::vector<double>& f, const std::vector<double>& xf,
                        const std::vector<double>& v, IntervalBounds b, int sub = 4000) {
  CutSums out;
  for (std::size_t j = 0; j + 1 < v.size(); ++j) {
    for (int s = 0; s < sub; ++s) {
      double t = (s + 0.5) / sub;
      double vt = v[j] + (v[j + 1] - v[j]) * t;
      bool in = (vt > b.lo || (b.lo_closed && vt == b.lo)) &&
                (vt < b.hi || (b.hi_closed && vt == b.hi));
      if (!in) continue;
      out.mass += (f[j] + (f[j + 1] - f[j]) * t) / sub;
      out.moment += (xf[j] + (xf[j + 1] - xf[j]) * t) / sub;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("scalar dot and masked sums match direct loops") {
  Gen g(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = g.index(70);
    auto w = g.vec(n, 0, 1), x = g.vec(n, -5, 5), v = g.vec(n, -2, 2);
    auto b = random_bounds(g, v);
    auto s = scalar::kTable.masked_sums(w.data(), x.data(), v.data(), n, b);
    double sw = 0, sx = 0;
    std::size_t c = 0;
    for (std::size_t i = 0; i < n; ++i) {
      bool in = (v[i] > b.lo || (b.lo_closed && v[i] == b.lo)) &&
                (v[i] < b.hi || (b.hi_closed && v[i] == b.hi));
      if (!in) continue;
      sw += w[i];
      sx += w[i] * x[i];
      ++c;
    }
    CHECK(s.count == c);
    CHECK(rel_close(s.weight, sw));
    CHECK(rel_close(s.moment, sx));
  }
}

TEST_CASE("cut-cell sums agree with brute-force subdivision") {
  Gen g(12);
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t n = 2 + g.index(12);
    auto f = g.vec(n, 0, 1), x = g.vec(n, -1, 1), v = g.vec(n, -2, 2);
    std::vector<double> xf(n);
    for (std::size_t i = 0; i < n; ++i) xf[i] = x[i] * f[i];
    IntervalBounds b{g.uniform(-2, 0), g.uniform(0, 2), false, false};
    auto exact = scalar::kTable.cut_cell_sums(f.data(), xf.data(), v.data(), n, b);
    auto brute = cut_cells_brute(f, xf, v, b);
    CHECK(std::fabs(exact.mass - brute.mass) < 1e-3);
    CHECK(std::fabs(exact.moment - brute.moment) < 1e-3);
  }
}

TEST_CASE("flat cells honour closedness") {
  std::vector<double> f{1, 1, 1}, xf{1, 1, 1}, v{0.5, 0.5, 0.5};
  auto open = scalar::kTable.cut_cell_sums(f.data(), xf.data(), v.data(), 3, {0.5, 1, false, false});
  auto closed = scalar::kTable.cut_cell_sums(f.data(), xf.data(), v.data(), 3, {0.5, 1, true, false});
  CHECK(open.mass == 0.0);
  CHECK(closed.mass == doctest::Approx(2.0));
}

TEST_CASE("AVX2 kernels are equivalent to the scalar reference") {
  if (!available(Backend::Avx2)) {
    MESSAGE("AVX2 backend not available; equivalence skipped");
    CHECK_THROWS(force_backend(Backend::Avx2));
    return;
  }
  const auto& ref = table(Backend::Scalar);
  const auto& simd = table(Backend::Avx2);
  Gen g(13);
  for (int trial = 0; trial < 500; ++trial) {
    std::size_t n = g.index(131);
    auto a = g.vec(n, -3, 3), b = g.vec(n, -3, 3);
    CHECK(rel_close(ref.dot(a.data(), b.data(), n), simd.dot(a.data(), b.data(), n)));

    auto w = g.vec(n, 0, 1), x = g.vec(n, -5, 5);
    std::vector<double> v(n);
    for (auto& vi : v) vi = std::round(g.uniform(-2, 2) * 4) / 4;  // ties with bounds
    auto bounds = random_bounds(g, v);
    // Values outside the window may be NaN; neither backend may read them.
    for (std::size_t i = 0; i < n; ++i) {
      bool in = (v[i] > bounds.lo || (bounds.lo_closed && v[i] == bounds.lo)) &&
                (v[i] < bounds.hi || (bounds.hi_closed && v[i] == bounds.hi));
      if (!in && g.coin(0.3)) x[i] = kNaN;
    }
    auto r = ref.masked_sums(w.data(), x.data(), v.data(), n, bounds);
    auto s = simd.masked_sums(w.data(), x.data(), v.data(), n, bounds);
    CHECK(r.count == s.count);
    CHECK(rel_close(r.weight, s.weight));
    CHECK(rel_close(r.moment, s.moment));
    CHECK(rel_close(r.second, s.second));

    auto f = g.vec(n, 0, 1);
    std::vector<double> xf(n), vv = g.vec(n, -2, 2);
    for (std::size_t i = 0; i < n; ++i) xf[i] = f[i] * g.uniform(-1, 1);
    if (n > 3 && g.coin(0.3)) vv[1] = vv[2];  // a flat cell
    auto cb = random_bounds(g, vv);
    auto rc = ref.cut_cell_sums(f.data(), xf.data(), vv.data(), n, cb);
    auto sc = simd.cut_cell_sums(f.data(), xf.data(), vv.data(), n, cb);
    CHECK(rel_close(rc.mass, sc.mass));
    CHECK(rel_close(rc.moment, sc.moment));
  }
}

TEST_CASE("span wrappers follow the pinned backend") {
  auto before = active_backend();
  force_backend(Backend::Scalar);
  CHECK(active_backend() == Backend::Scalar);
  std::vector<double> a{1, 2, 3}, b{4, 5, 6};
  CHECK(dot(a, b) == 32.0);
  force_backend(before);
  CHECK(to_string(Backend::Scalar) == "scalar");
}
