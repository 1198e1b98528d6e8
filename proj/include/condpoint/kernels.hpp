#pragma once

// Data-parallel inner loops shared by every integrator in the library.
//
// Each kernel has a scalar reference implementation and, on x86-64 builds
// with compiler support, an AVX2/FMA variant. The variant is picked once at
// startup from the CPU feature bits; tests can pin a backend to check that
// both produce the same sums.

#include <cstddef>
#include <span>
#include <string_view>

namespace condpoint::kernels {

/// Bounds of an interval event {lo (<|<=) v (<|<=) hi}. Infinite bounds are
/// allowed.
struct IntervalBounds {
  double lo;
  double hi;
  bool lo_closed = false;
  bool hi_closed = false;
};

/// Sums over the points whose value lies inside the interval.
struct MaskedSums {
  double weight = 0.0;  // sum w
  double moment = 0.0;  // sum w x
  double second = 0.0;  // sum w x^2
  std::size_t count = 0;
};

/// Integrals along one grid line of the piecewise-linear interpolants of f
/// and x*f over the part of the line where the (also piecewise-linear)
/// variable lies inside the interval. Results are in units of the line
/// pitch; callers multiply by it.
struct CutSums {
  double mass = 0.0;
  double moment = 0.0;
};

enum class Backend { Scalar, Avx2 };

std::string_view to_string(Backend backend);

struct KernelTable {
  double (*dot)(const double* a, const double* b, std::size_t n);
  MaskedSums (*masked_sums)(const double* w, const double* x, const double* v,
                            std::size_t n, IntervalBounds bounds);
  CutSums (*cut_cell_sums)(const double* f, const double* xf, const double* v,
                           std::size_t n, IntervalBounds bounds);
};

bool available(Backend backend);
Backend active_backend();
/// Pins the backend used by the span wrappers below. Throws if the backend
/// is not available on this machine.
void force_backend(Backend backend);
const KernelTable& table(Backend backend);

double dot(std::span<const double> a, std::span<const double> b);
MaskedSums masked_sums(std::span<const double> w, std::span<const double> x,
                       std::span<const double> v, IntervalBounds bounds);
CutSums cut_cell_sums(std::span<const double> f, std::span<const double> xf,
                      std::span<const double> v, IntervalBounds bounds);

namespace scalar {
extern const KernelTable kTable;
}
#if defined(CONDPOINT_HAVE_AVX2)
namespace avx2 {
extern const KernelTable kTable;
}
#endif

}  // namespace condpoint::kernels
