#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "condpoint/config.hpp"
#include "condpoint/space.hpp"

namespace testing {

inline std::filesystem::path source_dir() { return CONDPOINT_SOURCE_DIR; }
inline std::filesystem::path config_path(const std::string& name) {
  return source_dir() / "scenarios" / "configs" / (name + ".json");
}
inline condpoint::Model model(const std::string& name) {
  return condpoint::load_model(config_path(name));
}

// Seeded generator for hand-rolled property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }
  bool coin(double p = 0.5) { return uniform() < p; }
  std::vector<double> vec(std::size_t n, double lo, double hi) {
    std::vector<double> out(n);
    for (auto& v : out) v = uniform(lo, hi);
    return out;
  }

 private:
  std::mt19937_64 engine_;
};

inline condpoint::ProbabilitySpace dice() {
  std::vector<std::string> ids;
  std::vector<double> coords;
  for (int i = 1; i <= 6; ++i) {
    ids.push_back(std::to_string(i));
    coords.push_back(i);
  }
  return condpoint::ProbabilitySpace::discrete({"w"}, ids, std::vector<double>(6, 1.0 / 6.0),
                                               {coords});
}

inline condpoint::ProbabilitySpace coin_pair() {
  return condpoint::ProbabilitySpace::discrete({"c1", "c2"}, {"00", "01", "10", "11"},
                                               std::vector<double>(4, 0.25),
                                               {{0, 0, 1, 1}, {0, 1, 0, 1}});
}

// Random finite space with `n` atoms, integer-valued coordinate `k` in
// [0, levels) and real coordinate `u`. Some atoms may carry zero weight.
inline condpoint::ProbabilitySpace random_discrete(Gen& g, std::size_t n, int levels,
                                                   bool allow_null = true) {
  std::vector<std::string> ids;
  std::vector<double> w, k, u;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ids.push_back("a" + std::to_string(i));
    double wi = (allow_null && g.coin(0.15)) ? 0.0 : g.uniform(0.1, 1.0);
    w.push_back(wi);
    total += wi;
    k.push_back(static_cast<double>(g.index(static_cast<std::size_t>(levels))));
    u.push_back(g.uniform(-3, 3));
  }
  if (total == 0.0) {
    w[0] = 1.0;
    total = 1.0;
  }
  for (auto& wi : w) wi /= total;
  return condpoint::ProbabilitySpace::discrete({"k", "u"}, ids, w, {k, u});
}

inline condpoint::ProbabilitySpace bivariate_grid(double rho, std::size_t n = 401,
                                                  double half = 8.0) {
  condpoint::Axis a{-half, half, n};
  return condpoint::ProbabilitySpace::grid2d(
      {"z", "y"}, {a, a}, condpoint::Distribution::bivariate_normal(rho), 1e-8);
}

inline bool near(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

}  // namespace testing
