#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "condpoint/expr.hpp"
#include "condpoint/space.hpp"
#include "condpoint/window.hpp"

namespace condpoint {

/// f_{Z,Y} on nodes of the rectangle z_axis x y_axis, stored as
/// values[iz * y_axis.n + iy]. Normalized to trapezoid integral 1 at
/// construction; the raw integral is kept.
class JointDensity {
 public:
  JointDensity(std::string z_name, Axis z_axis, std::string y_name, Axis y_axis,
               std::vector<double> values, double tolerance);
  /// Joint of two coordinates of a 2D grid space.
  static JointDensity from_space(const ProbabilitySpace& space, std::string_view z,
                                 std::string_view y);

  const std::string& z_name() const { return z_name_; }
  const std::string& y_name() const { return y_name_; }
  const Axis& z_axis() const { return z_; }
  const Axis& y_axis() const { return y_; }
  double at(std::size_t iz, std::size_t iy) const { return values_[iz * y_.n + iy]; }
  double tolerance() const { return tolerance_; }
  double raw_integral() const { return raw_; }
  /// The column z -> f(z, y), linear between y nodes.
  std::vector<double> column(double y) const;

 private:
  std::string z_name_;
  std::string y_name_;
  Axis z_;
  Axis y_;
  std::vector<double> values_;
  double tolerance_;
  double raw_ = 1.0;
};

struct ConditionalDensity {
  double y = 0.0;
  Axis z_axis;
  std::vector<double> values;
  double marginal = 0.0;  // f_Y(y)
  /// Trapezoid integral of the raw ratio minus 1, before renormalization.
  double defect = 0.0;
};

inline constexpr double kDensityFloor = 1e-12;

/// f_Y(y) by trapezoid quadrature along z. Throws Error(OutOfRectangle).
double marginal(const JointDensity& joint, double y);

/// Throws Error(NullMarginal) when f_Y(y) <= floor.
ConditionalDensity conditional_density(const JointDensity& joint, double y,
                                       double floor = kDensityFloor);

double conditional_expectation_via_density(const JointDensity& joint, double y,
                                           const std::function<double(double)>& g,
                                           double floor = kDensityFloor);
/// `g` is an expression in the z coordinate name (or plain `z`).
double conditional_expectation_via_density(const JointDensity& joint, double y, const Expr& g,
                                           double floor = kDensityFloor);

/// Nodes whose window traces converge at a clearly lower empirical order than
/// the bulk of the grid: candidates for discontinuities of the joint, where
/// the density ratio is not claimed to hold.
std::vector<std::size_t> order_degraded_nodes(const PointwiseCondExp& phi,
                                              double threshold = 1.5);

}  // namespace condpoint
