#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "condpoint/space.hpp"

namespace condpoint {

enum class FactorVerdict { Factored, NotMeasurable };

std::string_view to_string(FactorVerdict v);

/// g restricted to one level set {Y = y} (a thin band {|Y - y| <= band} on
/// grids).
struct LevelSet {
  double y = 0.0;
  std::size_t size = 0;              // points in the level set or band
  std::vector<std::string> members;  // atom ids (discrete spaces)
  /// Distinct g-values found; on grids, those of the band group whose Y
  /// value lies nearest to y.
  std::vector<double> witnesses;
  /// Grids: band points grouped by their Y value, one row per group that is
  /// not single-valued.
  std::vector<double> conflicting_groups;
  bool empty = false;
  double phi = 0.0;  // NaN unless the level is single-valued and non-empty
};

struct FactorizationResult {
  std::string g_name;
  std::string y_name;
  FactorVerdict verdict = FactorVerdict::Factored;
  std::vector<LevelSet> levels;
  double band = 0.0;           // 0 on discrete spaces
  double witness_tol = 1e-12;  // 1e-12 discrete, 1e-10 on grid bands

  /// Indices of levels with more than one witness.
  std::vector<std::size_t> offending() const;
};

/// Collects g over each level set of Y. `levels` empty means every value Y
/// attains (discrete spaces only). Samplers are rejected with Error(Task).
FactorizationResult factorize(const ProbabilitySpace& space, const RandomVariable& g,
                              const RandomVariable& y, std::vector<double> levels = {});

/// E[X|Y](w) for any w with Y(w) = y, after checking that every such w gives
/// the same value. Throws Error(EmptyLevelSet) or Error(NotMeasurable).
double pointwise_from_any_omega(const ProbabilitySpace& space, const RandomVariable& condexp,
                                const RandomVariable& y, double at);

}  // namespace condpoint
