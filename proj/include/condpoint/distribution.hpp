#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "condpoint/rng.hpp"

namespace condpoint {

/// Named analytic families in one or two dimensions. They feed both the
/// density grids (evaluated at nodes) and the samplers (drawn from).
class Distribution {
 public:
  struct Normal {
    std::vector<double> mean;
    std::vector<double> cov;  // row-major d x d
  };
  struct Uniform {
    std::vector<double> lo;
    std::vector<double> hi;
  };
  struct Mixture {
    std::vector<double> weights;
    std::vector<Distribution> components;
  };

  static Distribution normal(std::vector<double> mean, std::vector<double> cov);
  static Distribution uniform(std::vector<double> lo, std::vector<double> hi);
  static Distribution mixture(std::vector<double> weights,
                              std::vector<Distribution> components);
  /// Standard bivariate normal with correlation rho.
  static Distribution bivariate_normal(double rho);

  /// Parses {"type": "normal"|"uniform"|"mixture", ...}; throws Error(Config).
  static Distribution from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  std::size_t dimension() const { return dim_; }
  double pdf(std::span<const double> point) const;
  void sample(rng::Engine& engine, std::span<double> out) const;
  std::string describe() const;

 private:
  using Variant = std::variant<Normal, Uniform, Mixture>;
  Distribution(Variant v, std::size_t dim);
  void prepare();

  Variant family_;
  std::size_t dim_;
  // Normal: cholesky factor and inverse covariance, filled by prepare().
  std::vector<double> chol_;
  std::vector<double> inv_cov_;
  double log_norm_ = 0.0;
};

}  // namespace condpoint
