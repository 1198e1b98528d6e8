#include "condpoint/density.hpp"

#include <cmath>

#include "condpoint/error.hpp"

namespace condpoint {
namespace {

double trapezoid(const Axis& axis, std::span<const double> f) {
  double s = 0.0;
  for (std::size_t i = 0; i < axis.n; ++i) s += axis.weight(i) * f[i];
  return s;
}

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

JointDensity::JointDensity(std::string z_name, Axis z_axis, std::string y_name, Axis y_axis,
                           std::vector<double> values, double tolerance)
    : z_name_(std::move(z_name)),
      y_name_(std::move(y_name)),
      z_(z_axis),
      y_(y_axis),
      values_(std::move(values)),
      tolerance_(tolerance) {
  z_.validate();
  y_.validate();
  if (values_.size() != z_.n * y_.n) {
    throw Error(ErrorKind::Config, "joint density needs " + std::to_string(z_.n * y_.n) + " values");
  }
  raw_ = 0.0;
  for (std::size_t iz = 0; iz < z_.n; ++iz) {
    for (std::size_t iy = 0; iy < y_.n; ++iy) {
      const double f = at(iz, iy);
      if (!std::isfinite(f) || f < 0.0) {
        throw Error(ErrorKind::Config, "joint density must be finite and non-negative");
      }
      raw_ += z_.weight(iz) * y_.weight(iy) * f;
    }
  }
  if (!(std::fabs(raw_ - 1.0) <= tolerance_)) {
    throw Error(ErrorKind::Config, "joint density integrates to " + number(raw_) +
                                       ", not 1 within " + number(tolerance_));
  }
  for (auto& f : values_) f /= raw_;
}

JointDensity JointDensity::from_space(const ProbabilitySpace& space, std::string_view z,
                                      std::string_view y) {
  const auto* g = space.grid2d();
  if (!g) throw Error(ErrorKind::Config, "a joint density needs a grid2d space");
  const auto iz = space.coordinate_index(z);
  const auto iy = space.coordinate_index(y);
  if (!iz || !iy || *iz == *iy) {
    throw Error(ErrorKind::Config, "joint coordinates must be the two distinct grid axes");
  }
  const double tol = std::max(g->meta.tolerance, 1e-12);
  if (*iz == 0) {
    return JointDensity(std::string(z), g->axes[0], std::string(y), g->axes[1], g->density, tol);
  }
  const Axis& za = g->axes[1];
  const Axis& ya = g->axes[0];
  std::vector<double> values(za.n * ya.n);
  for (std::size_t a = 0; a < za.n; ++a) {
    for (std::size_t b = 0; b < ya.n; ++b) values[a * ya.n + b] = g->density[b * za.n + a];
  }
  return JointDensity(std::string(z), za, std::string(y), ya, std::move(values), tol);
}

std::vector<double> JointDensity::column(double y) const {
  if (!(y >= y_.lo && y <= y_.hi)) {
    throw Error(ErrorKind::OutOfRectangle, "y = " + number(y) + " lies outside [" + number(y_.lo) +
                                               ", " + number(y_.hi) + "]");
  }
  std::vector<double> out(z_.n);
  if (y_.n == 1) {
    for (std::size_t iz = 0; iz < z_.n; ++iz) out[iz] = at(iz, 0);
    return out;
  }
  const double u = (y - y_.lo) / y_.pitch();
  std::size_t j = static_cast<std::size_t>(std::floor(u));
  if (j >= y_.n - 1) j = y_.n - 2;
  double s = u - static_cast<double>(j);
  // Snap to the node when y is one up to rounding.
  if (std::fabs(s) < 1e-9) s = 0.0;
  if (std::fabs(s - 1.0) < 1e-9) s = 1.0;
  for (std::size_t iz = 0; iz < z_.n; ++iz) {
    const double a = at(iz, j);
    const double b = at(iz, j + 1);
    out[iz] = s == 0.0 ? a : (s == 1.0 ? b : a + (b - a) * s);
  }
  return out;
}

double marginal(const JointDensity& joint, double y) {
  const auto col = joint.column(y);
  return trapezoid(joint.z_axis(), col);
}

ConditionalDensity conditional_density(const JointDensity& joint, double y, double floor) {
  ConditionalDensity out;
  out.y = y;
  out.z_axis = joint.z_axis();
  out.values = joint.column(y);
  out.marginal = trapezoid(joint.z_axis(), out.values);
  if (!(out.marginal > floor)) {
    throw Error(ErrorKind::NullMarginal, "f_Y(" + number(y) + ") = " + number(out.marginal) +
                                             " is below the density floor " + number(floor));
  }
  for (auto& v : out.values) v /= out.marginal;
  const double raw = trapezoid(out.z_axis, out.values);
  out.defect = raw - 1.0;
  for (auto& v : out.values) v /= raw;
  return out;
}

double conditional_expectation_via_density(const JointDensity& joint, double y,
                                           const std::function<double(double)>& g,
                                           double floor) {
  const auto cd = conditional_density(joint, y, floor);
  double s = 0.0;
  for (std::size_t i = 0; i < cd.z_axis.n; ++i) {
    const double w = cd.z_axis.weight(i) * cd.values[i];
    if (w != 0.0) s += w * g(cd.z_axis.node(i));
  }
  return s;
}

double conditional_expectation_via_density(const JointDensity& joint, double y, const Expr& g,
                                           double floor) {
  const std::string& zname = joint.z_name();
  return conditional_expectation_via_density(
      joint, y,
      [&](double z) {
        return g.evaluate([&](std::string_view id) -> double {
          if (id == zname || id == "z") return z;
          throw Error(ErrorKind::Config, "test function may only use '" + zname + "', not '" +
                                             std::string(id) + "'");
        });
      },
      floor);
}

std::vector<std::size_t> order_degraded_nodes(const PointwiseCondExp& phi, double threshold) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < phi.orders.size(); ++i) {
    const double p = phi.orders[i];
    if (std::isfinite(p) && p < threshold) out.push_back(i);
  }
  return out;
}

}  // namespace condpoint
