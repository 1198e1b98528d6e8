#include <algorithm>
#include <cmath>

#include "condpoint/kernels.hpp"

namespace condpoint::kernels::scalar {
namespace {

bool inside(double v, const IntervalBounds& b) {
  const bool above = v > b.lo || (b.lo_closed && v == b.lo);
  const bool below = v < b.hi || (b.hi_closed && v == b.hi);
  return above && below;
}

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

MaskedSums masked_sums(const double* w, const double* x, const double* v,
                       std::size_t n, IntervalBounds bounds) {
  MaskedSums out;
  for (std::size_t i = 0; i < n; ++i) {
    if (!inside(v[i], bounds)) continue;
    const double wx = w[i] * x[i];
    out.weight += w[i];
    out.moment += wx;
    out.second += wx * x[i];
    ++out.count;
  }
  return out;
}

CutSums cut_cell_sums(const double* f, const double* xf, const double* v,
                      std::size_t n, IntervalBounds bounds) {
  CutSums out;
  if (n < 2) return out;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const double va = v[j];
    const double vb = v[j + 1];
    if (!std::isfinite(va) || !std::isfinite(vb)) continue;
    const double d = vb - va;
    double s_lo;
    double s_hi;
    if (d != 0.0) {
      const double t1 = (bounds.lo - va) / d;
      const double t2 = (bounds.hi - va) / d;
      s_lo = std::max(std::min(t1, t2), 0.0);
      s_hi = std::min(std::max(t1, t2), 1.0);
    } else if (inside(va, bounds)) {
      s_lo = 0.0;
      s_hi = 1.0;
    } else {
      continue;
    }
    const double len = s_hi - s_lo;
    if (!(len > 0.0)) continue;
    const double mid = 0.5 * (s_lo + s_hi);
    out.mass += len * (f[j] + (f[j + 1] - f[j]) * mid);
    out.moment += len * (xf[j] + (xf[j + 1] - xf[j]) * mid);
  }
  return out;
}

}  // namespace

const KernelTable kTable{&dot, &masked_sums, &cut_cell_sums};

}  // namespace condpoint::kernels::scalar
