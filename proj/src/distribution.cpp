#include "condpoint/distribution.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "condpoint/error.hpp"

namespace condpoint {
namespace {

[[noreturn]] void bad(const std::string& why) {
  throw Error(ErrorKind::Config, "distribution: " + why);
}

std::vector<double> numbers(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) bad(std::string("missing '") + key + "'");
  const auto& v = j.at(key);
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) bad(std::string("'") + key + "' must be a number or array");
  std::vector<double> out;
  for (const auto& e : v) {
    if (e.is_array()) {
      for (const auto& f : e) out.push_back(f.get<double>());
    } else {
      out.push_back(e.get<double>());
    }
  }
  return out;
}

}  // namespace

Distribution::Distribution(Variant v, std::size_t dim)
    : family_(std::move(v)), dim_(dim) {
  if (dim_ == 0 || dim_ > 2) bad("only 1D and 2D families are supported");
  prepare();
}

Distribution Distribution::normal(std::vector<double> mean, std::vector<double> cov) {
  const std::size_t d = mean.size();
  if (cov.size() != d * d) bad("normal covariance must be d x d");
  return Distribution(Normal{std::move(mean), std::move(cov)}, d);
}

Distribution Distribution::uniform(std::vector<double> lo, std::vector<double> hi) {
  if (lo.size() != hi.size()) bad("uniform bounds differ in dimension");
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (!(hi[i] > lo[i])) bad("uniform requires lo < hi");
  }
  const std::size_t d = lo.size();
  return Distribution(Uniform{std::move(lo), std::move(hi)}, d);
}

Distribution Distribution::mixture(std::vector<double> weights,
                                   std::vector<Distribution> components) {
  if (weights.empty() || weights.size() != components.size()) {
    bad("mixture needs one weight per component");
  }
  const std::size_t d = components.front().dimension();
  for (const auto& c : components) {
    if (c.dimension() != d) bad("mixture components differ in dimension");
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::fabs(total - 1.0) > 1e-12) bad("mixture weights must sum to 1");
  for (double w : weights) {
    if (w < 0.0) bad("mixture weights must be non-negative");
  }
  return Distribution(Mixture{std::move(weights), std::move(components)}, d);
}

Distribution Distribution::bivariate_normal(double rho) {
  return normal({0.0, 0.0}, {1.0, rho, rho, 1.0});
}

Distribution Distribution::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("type")) bad("expected an object with 'type'");
  const auto type = j.at("type").get<std::string>();
  if (type == "normal") {
    auto mean = numbers(j, "mean");
    std::vector<double> cov;
    if (j.contains("cov")) {
      cov = numbers(j, "cov");
    } else if (j.contains("var")) {
      const auto var = numbers(j, "var");
      cov.assign(mean.size() * mean.size(), 0.0);
      if (var.size() != mean.size()) bad("'var' must match 'mean'");
      for (std::size_t i = 0; i < var.size(); ++i) cov[i * mean.size() + i] = var[i];
      if (j.contains("rho")) {
        if (mean.size() != 2) bad("'rho' needs a 2D normal");
        const double c = j.at("rho").get<double>() * std::sqrt(var[0] * var[1]);
        cov[1] = cov[2] = c;
      }
    } else {
      bad("normal needs 'cov' or 'var'");
    }
    return normal(std::move(mean), std::move(cov));
  }
  if (type == "uniform") return uniform(numbers(j, "lo"), numbers(j, "hi"));
  if (type == "mixture") {
    auto weights = numbers(j, "weights");
    std::vector<Distribution> comps;
    if (!j.contains("components") || !j.at("components").is_array()) {
      bad("mixture needs 'components'");
    }
    for (const auto& c : j.at("components")) comps.push_back(from_json(c));
    return mixture(std::move(weights), std::move(comps));
  }
  bad("unknown family '" + type + "'");
}

nlohmann::json Distribution::to_json() const {
  return std::visit(
      [](const auto& f) -> nlohmann::json {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Normal>) {
          return {{"type", "normal"}, {"mean", f.mean}, {"cov", f.cov}};
        } else if constexpr (std::is_same_v<T, Uniform>) {
          return {{"type", "uniform"}, {"lo", f.lo}, {"hi", f.hi}};
        } else {
          nlohmann::json comps = nlohmann::json::array();
          for (const auto& c : f.components) comps.push_back(c.to_json());
          return {{"type", "mixture"}, {"weights", f.weights}, {"components", comps}};
        }
      },
      family_);
}

void Distribution::prepare() {
  auto* n = std::get_if<Normal>(&family_);
  if (n == nullptr) return;
  const std::size_t d = dim_;
  const auto& c = n->cov;
  chol_.assign(d * d, 0.0);
  inv_cov_.assign(d * d, 0.0);
  if (d == 1) {
    if (!(c[0] > 0.0)) bad("normal variance must be positive");
    chol_[0] = std::sqrt(c[0]);
    inv_cov_[0] = 1.0 / c[0];
    log_norm_ = -0.5 * std::log(2.0 * std::numbers::pi * c[0]);
    return;
  }
  if (std::fabs(c[1] - c[2]) > 1e-15 * (std::fabs(c[1]) + 1.0)) bad("covariance must be symmetric");
  const double det = c[0] * c[3] - c[1] * c[2];
  if (!(c[0] > 0.0) || !(det > 0.0)) bad("covariance must be positive definite");
  chol_[0] = std::sqrt(c[0]);
  chol_[2] = c[2] / chol_[0];
  chol_[3] = std::sqrt(c[3] - chol_[2] * chol_[2]);
  inv_cov_ = {c[3] / det, -c[1] / det, -c[2] / det, c[0] / det};
  log_norm_ = -std::log(2.0 * std::numbers::pi) - 0.5 * std::log(det);
}

double Distribution::pdf(std::span<const double> x) const {
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Normal>) {
          if (dim_ == 1) {
            const double u = x[0] - f.mean[0];
            return std::exp(log_norm_ - 0.5 * u * u * inv_cov_[0]);
          }
          const double u = x[0] - f.mean[0];
          const double v = x[1] - f.mean[1];
          const double q = u * (inv_cov_[0] * u + inv_cov_[1] * v) +
                           v * (inv_cov_[2] * u + inv_cov_[3] * v);
          return std::exp(log_norm_ - 0.5 * q);
        } else if constexpr (std::is_same_v<T, Uniform>) {
          double vol = 1.0;
          for (std::size_t i = 0; i < dim_; ++i) {
            if (x[i] < f.lo[i] || x[i] > f.hi[i]) return 0.0;
            vol *= f.hi[i] - f.lo[i];
          }
          return 1.0 / vol;
        } else {
          double p = 0.0;
          for (std::size_t k = 0; k < f.weights.size(); ++k) {
            p += f.weights[k] * f.components[k].pdf(x);
          }
          return p;
        }
      },
      family_);
}

void Distribution::sample(rng::Engine& engine, std::span<double> out) const {
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Normal>) {
          if (dim_ == 1) {
            out[0] = f.mean[0] + chol_[0] * engine.normal();
          } else {
            const double a = engine.normal();
            const double b = engine.normal();
            out[0] = f.mean[0] + chol_[0] * a;
            out[1] = f.mean[1] + chol_[2] * a + chol_[3] * b;
          }
        } else if constexpr (std::is_same_v<T, Uniform>) {
          for (std::size_t i = 0; i < dim_; ++i) {
            out[i] = f.lo[i] + (f.hi[i] - f.lo[i]) * engine.uniform();
          }
        } else {
          const double u = engine.uniform();
          double acc = 0.0;
          std::size_t k = 0;
          for (; k + 1 < f.weights.size(); ++k) {
            acc += f.weights[k];
            if (u < acc) break;
          }
          f.components[k].sample(engine, out);
        }
      },
      family_);
}

std::string Distribution::describe() const { return to_json().dump(); }

}  // namespace condpoint
