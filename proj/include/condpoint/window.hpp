#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "condpoint/measure.hpp"
#include "condpoint/space.hpp"

namespace condpoint {

enum class Verdict { Converged, Plateaued, Diverged, Starved };
/// Symmetric: (y-eps, y+eps). Left: (y-eps, y]. Right: [y, y+eps).
enum class WindowFamily { Symmetric, Left, Right };
/// Which half of the dual tolerance decided the verdict.
enum class ToleranceBound { Difference, Statistical };

std::string_view to_string(Verdict v);
std::string_view to_string(WindowFamily f);
std::string_view to_string(ToleranceBound b);
Verdict parse_verdict(std::string_view text);
WindowFamily parse_window_family(std::string_view text);

/// eps_k = eps0 * ratio^k, k < depth. eps0 <= 0 means one standard
/// deviation of Y. A non-empty `explicit_eps` overrides the geometric rule.
struct Schedule {
  double eps0 = 0.0;
  double ratio = 0.5;
  std::size_t depth = 20;
  std::vector<double> explicit_eps;

  std::vector<double> values(double sd_y) const;
};

struct WindowOptions {
  Schedule schedule;
  /// Successive-difference tolerance; <= 0 picks 1e-6.
  double tol = 0.0;
  double statistical_factor = 3.0;
  std::size_t n_min = 100;
  WindowFamily family = WindowFamily::Symmetric;
  /// Switch to one-sided windows at the edge of the support of Y.
  bool one_sided_at_boundary = true;
  /// Sampler sub-stream.
  std::uint64_t stream = 0;
};

struct WindowTrace {
  std::string x_name;
  std::string y_name;
  SpaceKind space_kind = SpaceKind::DiscreteAtoms;
  double y = 0.0;
  WindowFamily family = WindowFamily::Symmetric;
  bool boundary = false;  // one-sided because y sits on the support edge

  std::vector<double> eps;
  std::vector<double> estimates;
  std::vector<double> probabilities;
  std::vector<double> std_errors;   // samplers only
  std::vector<std::size_t> counts;  // samplers only

  double value = 0.0;  // last accepted estimate
  std::optional<double> extrapolated;
  std::optional<double> local_order;  // empirical order used by the Richardson step
  Verdict verdict = Verdict::Plateaued;
  ToleranceBound bound = ToleranceBound::Difference;
  double tolerance = 0.0;        // the bound actually applied at the last step
  double last_difference = 0.0;  // |e_K - e_{K-1}|
  /// Smallest eps the grid resolves (0 off grids).
  double resolution_floor = 0.0;
  std::string note;
};

class IntervalQuery;

/// Runs the shrinking-window schedule on a prepared (X, Y) query.
WindowTrace window_trace(const IntervalQuery& query, double y, const WindowOptions& options,
                         double sd_y);

/// E[X | Y in window_k] for each eps_k of the schedule and the limit verdict.
/// Throws Error(NonApproachablePoint) when a window holds no mass.
WindowTrace window_estimate(const ProbabilitySpace& space, const RandomVariable& x,
                            const RandomVariable& y, double at,
                            const WindowOptions& options = {});

/// Empirical order p in |e_k - e_last| ~ eps_k^p. +infinity when the
/// estimates do not move. Throws Error(InsufficientTrace).
double convergence_order(const WindowTrace& trace);

/// phi_X on a y-grid, one trace per node.
struct PointwiseCondExp {
  std::string x_name;
  std::string y_name;
  std::vector<double> y;
  std::vector<std::optional<WindowTrace>> traces;
  /// Empty when the node converged; otherwise the verdict or error kind.
  std::vector<std::string> flags;
  /// Empirical convergence order per node (NaN when not measurable).
  std::vector<double> orders;

  bool ok(std::size_t i) const { return flags[i].empty(); }
  /// NaN for flagged nodes.
  double value(std::size_t i) const;
};

struct GridOptions {
  WindowOptions window;
  unsigned threads = 0;
};

/// Sampler nodes draw from sub-stream (seed, node index).
PointwiseCondExp evaluate_on_grid(const ProbabilitySpace& space, const RandomVariable& x,
                                  const RandomVariable& y, const std::vector<double>& y_grid,
                                  const GridOptions& options = {});

/// Weighted standard deviation of Y over the points.
double standard_deviation(const PointSet& points, std::span<const double> v);

}  // namespace condpoint
