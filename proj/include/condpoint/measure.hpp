#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "condpoint/kernels.hpp"
#include "condpoint/space.hpp"

namespace condpoint {

/// A point value; sampler-backed values carry a standard error and the
/// number of rows that contributed.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t count = 0;
};

/// E[X|A] for a regular event, or the zero branch when P(A) = 0 (exactly on
/// discrete spaces, below kProbabilityFloor otherwise).
struct ConditionalEstimate {
  double value = 0.0;
  double probability = 0.0;
  double std_error = 0.0;
  std::size_t count = 0;
  bool degenerate = false;
};

/// P(A), E[1_A X] and E[1_A X^2] over one event.
struct Moments {
  double mass = 0.0;
  double moment = 0.0;
  double second = 0.0;
  std::size_t count = 0;
};

/// A space bound to one materialization of its points. The space must
/// outlive the integrator.
class Integrator {
 public:
  explicit Integrator(const ProbabilitySpace& space, int sweep_axis = -1,
                      std::uint64_t stream = 0);

  const ProbabilitySpace& space() const { return *space_; }
  const PointSet& points() const { return points_; }
  std::vector<double> values(const RandomVariable& x) const { return x.evaluate(points_); }

  Moments total(std::span<const double> x) const;
  Moments integrate(std::span<const double> x, const Event& a) const;
  /// Interval events on grids integrate the piecewise-linear interpolants
  /// along each line exactly over the cut part of every cell.
  Moments integrate_interval(std::span<const double> x, std::span<const double> v,
                             kernels::IntervalBounds bounds) const;
  Moments integrate_mask(std::span<const double> x,
                         std::span<const std::uint8_t> mask) const;

 private:
  const ProbabilitySpace* space_;
  PointSet points_;
};

/// Repeated interval queries for one (X, V) pair, e.g. the shrinking windows
/// {V in (y - eps, y + eps)}.
class IntervalQuery {
 public:
  IntervalQuery(const Integrator& integrator, std::vector<double> x,
                std::vector<double> v);

  Moments operator()(kernels::IntervalBounds bounds) const;
  /// Grids only: window mass on each line, in canonical units.
  std::vector<double> line_masses(kernels::IntervalBounds bounds) const;

  const Integrator& integrator() const { return *integrator_; }
  std::span<const double> x() const { return x_; }
  std::span<const double> v() const { return v_; }
  /// Range of V over points carrying positive weight.
  double support_min() const { return support_min_; }
  double support_max() const { return support_max_; }
  /// Smallest window half-width the grid resolves: the median change of V
  /// across one cell along the sweep axis (0 off grids).
  double resolution() const { return resolution_; }

 private:
  const Integrator* integrator_;
  std::vector<double> x_;
  std::vector<double> v_;
  std::vector<double> xf_;
  double support_min_ = 0.0;
  double support_max_ = 0.0;
  double resolution_ = 0.0;
};

/// Sweep axis along which `v` varies most on a 2D grid (the variable's hint
/// wins); -1 for other spaces.
int preferred_sweep_axis(const ProbabilitySpace& space, const RandomVariable& v);

ConditionalEstimate conditional_from(const Moments& m, SpaceKind kind);

Estimate probability(const ProbabilitySpace& space, const Event& a);
Estimate expectation(const ProbabilitySpace& space, const RandomVariable& x);
ConditionalEstimate cond_expectation_event(const ProbabilitySpace& space,
                                           const RandomVariable& x, const Event& a);

/// The law of Y as a space of its own: atoms (discrete spaces, or samplers
/// with few distinct values) or a 1D density grid on `bins`.
ProbabilitySpace pushforward(const ProbabilitySpace& space, const RandomVariable& y,
                             std::optional<Axis> bins = std::nullopt);

}  // namespace condpoint
