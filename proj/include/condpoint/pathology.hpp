#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "condpoint/partition.hpp"
#include "condpoint/space.hpp"
#include "condpoint/window.hpp"

namespace condpoint {

/// Two versions of E[X | {empty, A, A^c, Omega}] for a null event A.
struct TooCoarseDemo {
  std::string event;
  double expectation = 0.0;  // E[X]
  double alternative = 17.0;
  RandomVariable mean_everywhere;  // E[X] on all of Omega
  RandomVariable alternative_on_a;  // 17 on A, E[X] elsewhere
  VerificationReport mean_report;
  VerificationReport alternative_report;
  /// Points where the two versions disagree (atom ids or node indices).
  std::vector<std::string> differing_points;
};

/// Throws Error(NotNull) when P(A) > 0 under node quadrature, the measure
/// the verification uses.
TooCoarseDemo too_coarse_demo(const ProbabilitySpace& space, const RandomVariable& x,
                              const Event& a, double alternative = 17.0);

/// E[X | all events] = X restricted to the null event A: its distinct values.
struct TooFineDemo {
  std::string event;
  std::size_t points = 0;
  std::vector<double> witnesses;
  double band = 0.0;  // grids: half-width of the level band
};

/// Throws Error(NotNull) or Error(DegenerateA).
TooFineDemo too_fine_demo(const ProbabilitySpace& space, const RandomVariable& x, const Event& a);

/// A shrinking family {|V - target| < eps} targeting the null event {V = target}.
struct ApproximationFamily {
  std::string name;
  RandomVariable variable;
  double target = 0.0;
  Schedule schedule;

  Event at(double eps) const;
};

struct FamilyResult {
  std::string name;
  std::string variable;
  WindowTrace trace;
  double abs_mean = 0.0;  // E[|Z| | window] at the last window
  double error = 0.0;     // error bound attached to trace.value
  /// Grids: conditional density of Z on the grid lines at the last window.
  std::vector<double> z;
  std::vector<double> density;
};

struct ParadoxReport {
  std::string null_event;
  std::string statistic;
  std::vector<FamilyResult> families;
  /// Largest pairwise gap between converged limits (NaN if fewer than two).
  double discrepancy = 0.0;
  double combined_tolerance = 0.0;
  bool all_converged = false;
};

/// Runs every family on the same statistic. Throws Error(FamilyNotShrinking)
/// if some family loses all mass or fails to shrink over its schedule.
ParadoxReport borel_kolmogorov(const ProbabilitySpace& space, const RandomVariable& statistic,
                               const std::string& z_name,
                               const std::vector<ApproximationFamily>& families,
                               const WindowOptions& options, const std::string& null_event);

/// A shipped paradox instance: independent standard normals (z, y); families
/// via Y and via W = y/z, and the control pair of two Y-schedules.
struct ParadoxInstance {
  std::string name;
  ProbabilitySpace space;
  RandomVariable statistic;
  std::vector<ApproximationFamily> families;
  std::vector<ApproximationFamily> control;
  WindowOptions options;
};

struct ParadoxOutcome {
  std::string instance;
  ParadoxReport main;
  ParadoxReport control;

  /// Families converge, the gap exceeds 10x the combined tolerance, and the
  /// control gap stays within its combined tolerance.
  bool pass() const;
};

std::vector<std::string> paradox_instance_names();
/// "ratio-normal" (grid, n nodes per axis) or "ratio-normal-mc" (sampler).
ParadoxInstance paradox_instance(std::string_view name, std::uint64_t seed = 20240917,
                                 std::size_t n = 800);
ParadoxOutcome run_paradox(const ParadoxInstance& instance);

}  // namespace condpoint
