#include <atomic>
#include <cassert>
#include <stdexcept>

#include "condpoint/kernels.hpp"

namespace condpoint::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(CONDPOINT_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend detect() { return cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar; }

std::atomic<Backend>& current() {
  static std::atomic<Backend> backend{detect()};
  return backend;
}

}  // namespace

std::string_view to_string(Backend backend) {
  return backend == Backend::Avx2 ? "avx2" : "scalar";
}

bool available(Backend backend) {
  if (backend == Backend::Scalar) return true;
  static const bool avx2 = cpu_has_avx2();
  return avx2;
}

Backend active_backend() { return current().load(std::memory_order_relaxed); }

void force_backend(Backend backend) {
  if (!available(backend)) {
    throw std::runtime_error("kernel backend not available on this CPU: " +
                             std::string(to_string(backend)));
  }
  current().store(backend, std::memory_order_relaxed);
}

const KernelTable& table(Backend backend) {
#if defined(CONDPOINT_HAVE_AVX2)
  if (backend == Backend::Avx2) return avx2::kTable;
#endif
  (void)backend;
  return scalar::kTable;
}

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return table(active_backend()).dot(a.data(), b.data(), a.size());
}

MaskedSums masked_sums(std::span<const double> w, std::span<const double> x,
                       std::span<const double> v, IntervalBounds bounds) {
  assert(w.size() == x.size() && x.size() == v.size());
  return table(active_backend()).masked_sums(w.data(), x.data(), v.data(),
                                             v.size(), bounds);
}

CutSums cut_cell_sums(std::span<const double> f, std::span<const double> xf,
                      std::span<const double> v, IntervalBounds bounds) {
  assert(f.size() == xf.size() && xf.size() == v.size());
  return table(active_backend()).cut_cell_sums(f.data(), xf.data(), v.data(),
                                               v.size(), bounds);
}

}  // namespace condpoint::kernels
