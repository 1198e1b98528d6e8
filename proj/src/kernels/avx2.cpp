#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "condpoint/kernels.hpp"

namespace condpoint::kernels::avx2 {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline __m256d in_bounds(__m256d v, __m256d lo, __m256d hi,
                         const IntervalBounds& b) {
  const __m256d above = b.lo_closed ? _mm256_cmp_pd(v, lo, _CMP_GE_OQ)
                                    : _mm256_cmp_pd(v, lo, _CMP_GT_OQ);
  const __m256d below = b.hi_closed ? _mm256_cmp_pd(v, hi, _CMP_LE_OQ)
                                    : _mm256_cmp_pd(v, hi, _CMP_LT_OQ);
  return _mm256_and_pd(above, below);
}

inline bool inside(double v, const IntervalBounds& b) {
  const bool above = v > b.lo || (b.lo_closed && v == b.lo);
  const bool below = v < b.hi || (b.hi_closed && v == b.hi);
  return above && below;
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4),
                           acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

MaskedSums masked_sums(const double* w, const double* x, const double* v,
                       std::size_t n, IntervalBounds bounds) {
  const __m256d lo = _mm256_set1_pd(bounds.lo);
  const __m256d hi = _mm256_set1_pd(bounds.hi);
  __m256d acc_w = _mm256_setzero_pd();
  __m256d acc_m = _mm256_setzero_pd();
  __m256d acc_s = _mm256_setzero_pd();
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d mask = in_bounds(_mm256_loadu_pd(v + i), lo, hi, bounds);
    const int bits = _mm256_movemask_pd(mask);
    if (bits == 0) continue;
    count += static_cast<std::size_t>(__builtin_popcount(bits));
    const __m256d wv = _mm256_loadu_pd(w + i);
    const __m256d xv = _mm256_loadu_pd(x + i);
    const __m256d wx = _mm256_mul_pd(wv, xv);
    acc_w = _mm256_add_pd(acc_w, _mm256_and_pd(mask, wv));
    acc_m = _mm256_add_pd(acc_m, _mm256_and_pd(mask, wx));
    acc_s = _mm256_add_pd(acc_s, _mm256_and_pd(mask, _mm256_mul_pd(wx, xv)));
  }
  MaskedSums out{hsum(acc_w), hsum(acc_m), hsum(acc_s), count};
  for (; i < n; ++i) {
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
  const std::size_t cells = n - 1;
  const __m256d lo = _mm256_set1_pd(bounds.lo);
  const __m256d hi = _mm256_set1_pd(bounds.hi);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d half = _mm256_set1_pd(0.5);
  __m256d acc_mass = zero;
  __m256d acc_moment = zero;
  std::size_t j = 0;
  for (; j + 4 <= cells; j += 4) {
    const __m256d va = _mm256_loadu_pd(v + j);
    const __m256d vb = _mm256_loadu_pd(v + j + 1);
    const __m256d finite =
        _mm256_and_pd(_mm256_cmp_pd(_mm256_sub_pd(va, va), zero, _CMP_EQ_OQ),
                      _mm256_cmp_pd(_mm256_sub_pd(vb, vb), zero, _CMP_EQ_OQ));
    const __m256d d = _mm256_sub_pd(vb, va);
    const __m256d flat = _mm256_cmp_pd(d, zero, _CMP_EQ_OQ);
    const __m256d t1 = _mm256_div_pd(_mm256_sub_pd(lo, va), d);
    const __m256d t2 = _mm256_div_pd(_mm256_sub_pd(hi, va), d);
    __m256d s_lo = _mm256_max_pd(_mm256_min_pd(t1, t2), zero);
    __m256d s_hi = _mm256_min_pd(_mm256_max_pd(t1, t2), one);
    s_lo = _mm256_blendv_pd(s_lo, zero, flat);
    s_hi = _mm256_blendv_pd(s_hi, one, flat);
    const __m256d len = _mm256_sub_pd(s_hi, s_lo);
    const __m256d flat_ok = _mm256_or_pd(
        _mm256_xor_pd(flat, _mm256_castsi256_pd(_mm256_set1_epi64x(-1))),
        in_bounds(va, lo, hi, bounds));
    const __m256d valid = _mm256_and_pd(
        _mm256_and_pd(finite, flat_ok), _mm256_cmp_pd(len, zero, _CMP_GT_OQ));
    if (_mm256_movemask_pd(valid) == 0) continue;
    const __m256d mid = _mm256_mul_pd(half, _mm256_add_pd(s_lo, s_hi));
    const __m256d fa = _mm256_loadu_pd(f + j);
    const __m256d fb = _mm256_loadu_pd(f + j + 1);
    const __m256d ga = _mm256_loadu_pd(xf + j);
    const __m256d gb = _mm256_loadu_pd(xf + j + 1);
    const __m256d fm = _mm256_fmadd_pd(_mm256_sub_pd(fb, fa), mid, fa);
    const __m256d gm = _mm256_fmadd_pd(_mm256_sub_pd(gb, ga), mid, ga);
    acc_mass = _mm256_add_pd(acc_mass, _mm256_and_pd(valid, _mm256_mul_pd(len, fm)));
    acc_moment =
        _mm256_add_pd(acc_moment, _mm256_and_pd(valid, _mm256_mul_pd(len, gm)));
  }
  out.mass = hsum(acc_mass);
  out.moment = hsum(acc_moment);
  for (; j < cells; ++j) {
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

}  // namespace condpoint::kernels::avx2
