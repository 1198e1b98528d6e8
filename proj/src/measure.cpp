#include "condpoint/measure.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "condpoint/error.hpp"

namespace condpoint {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> mask_values(std::span<const std::uint8_t> mask) {
  std::vector<double> out(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) out[i] = mask[i] ? 1.0 : 0.0;
  return out;
}

Moments from_sums(const kernels::MaskedSums& s) {
  return {s.weight, s.moment, s.second, s.count};
}

double sample_std_error(const Moments& m, double mean) {
  if (m.count < 2 || !(m.mass > 0.0)) return 0.0;
  const double n = static_cast<double>(m.count);
  const double var = std::max(m.second / m.mass - mean * mean, 0.0) * n / (n - 1.0);
  return std::sqrt(var / n);
}

std::string format_value(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

Integrator::Integrator(const ProbabilitySpace& space, int sweep_axis, std::uint64_t stream)
    : space_(&space), points_(space.points(sweep_axis, stream)) {}

Moments Integrator::total(std::span<const double> x) const {
  Moments m;
  const std::span<const double> w = points_.weight;
  m.mass = std::accumulate(w.begin(), w.end(), 0.0);
  m.moment = kernels::dot(w, x);
  if (points_.is_sampled()) {
    std::vector<double> wx(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) wx[i] = w[i] * x[i];
    m.second = kernels::dot(wx, x);
  }
  m.count = points_.size;
  return m;
}

Moments Integrator::integrate(std::span<const double> x, const Event& a) const {
  switch (a.kind()) {
    case Event::Kind::All: return total(x);
    case Event::Kind::Empty: return {};
    case Event::Kind::Interval: {
      const auto* iv = a.interval_data();
      const auto v = iv->var.evaluate(points_);
      for (double e : v) {
        if (std::isnan(e)) {
          throw Error(ErrorKind::UndefinedPredicate,
                      "event '" + a.label() + "' is undefined at some point");
        }
      }
      return integrate_interval(x, v, {iv->lo, iv->hi, iv->lo_closed, iv->hi_closed});
    }
    default: {
      const auto mask = a.mask(points_);
      return integrate_mask(x, mask);
    }
  }
}

Moments Integrator::integrate_interval(std::span<const double> x,
                                       std::span<const double> v,
                                       kernels::IntervalBounds bounds) const {
  if (!points_.is_grid()) {
    return from_sums(kernels::masked_sums(points_.weight, x, v, bounds));
  }
  std::vector<double> xf(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) xf[i] = x[i] * points_.line_weight[i];
  Moments m;
  const std::span<const double> f = points_.line_weight;
  for (std::size_t l = 0; l < points_.line_count; ++l) {
    const auto s = kernels::cut_cell_sums(points_.line(f, l), points_.line(xf, l),
                                          points_.line(v, l), bounds);
    m.mass += s.mass;
    m.moment += s.moment;
  }
  m.mass *= points_.pitch;
  m.moment *= points_.pitch;
  return m;
}

Moments Integrator::integrate_mask(std::span<const double> x,
                                   std::span<const std::uint8_t> mask) const {
  const auto v = mask_values(mask);
  return from_sums(kernels::masked_sums(points_.weight, x, v, {0.5, kInf, false, false}));
}

IntervalQuery::IntervalQuery(const Integrator& integrator, std::vector<double> x,
                             std::vector<double> v)
    : integrator_(&integrator), x_(std::move(x)), v_(std::move(v)) {
  const PointSet& ps = integrator.points();
  if (ps.is_grid()) {
    xf_.resize(x_.size());
    for (std::size_t i = 0; i < x_.size(); ++i) xf_[i] = x_[i] * ps.line_weight[i];
  }
  support_min_ = kInf;
  support_max_ = -kInf;
  for (std::size_t i = 0; i < v_.size(); ++i) {
    if (!(ps.weight[i] > 0.0) || !std::isfinite(v_[i])) continue;
    support_min_ = std::min(support_min_, v_[i]);
    support_max_ = std::max(support_max_, v_[i]);
  }
  if (ps.is_grid()) {
    std::vector<double> steps;
    steps.reserve(v_.size());
    for (std::size_t l = 0; l < ps.line_count; ++l) {
      for (std::size_t j = 0; j + 1 < ps.line_length; ++j) {
        const std::size_t p = l * ps.line_length + j;
        if (!(ps.line_weight[p] > 0.0) && !(ps.line_weight[p + 1] > 0.0)) continue;
        const double d = std::fabs(v_[p + 1] - v_[p]);
        if (std::isfinite(d) && d > 0.0) steps.push_back(d);
      }
    }
    if (!steps.empty()) {
      auto mid = steps.begin() + static_cast<std::ptrdiff_t>(steps.size() / 2);
      std::nth_element(steps.begin(), mid, steps.end());
      resolution_ = *mid;
    }
  }
}

Moments IntervalQuery::operator()(kernels::IntervalBounds bounds) const {
  const PointSet& ps = integrator_->points();
  if (!ps.is_grid()) {
    return from_sums(kernels::masked_sums(ps.weight, x_, v_, bounds));
  }
  Moments m;
  const std::span<const double> f = ps.line_weight;
  for (std::size_t l = 0; l < ps.line_count; ++l) {
    const auto s = kernels::cut_cell_sums(ps.line(f, l), ps.line(std::span<const double>(xf_), l),
                                          ps.line(std::span<const double>(v_), l), bounds);
    m.mass += s.mass;
    m.moment += s.moment;
  }
  m.mass *= ps.pitch;
  m.moment *= ps.pitch;
  return m;
}

std::vector<double> IntervalQuery::line_masses(kernels::IntervalBounds bounds) const {
  const PointSet& ps = integrator_->points();
  if (!ps.is_grid()) throw Error(ErrorKind::Task, "line masses need a grid space");
  std::vector<double> out(ps.line_count);
  const std::span<const double> f = ps.line_weight;
  for (std::size_t l = 0; l < ps.line_count; ++l) {
    out[l] = ps.pitch * kernels::cut_cell_sums(ps.line(f, l),
                                               ps.line(std::span<const double>(xf_), l),
                                               ps.line(std::span<const double>(v_), l), bounds)
                            .mass;
  }
  return out;
}

int preferred_sweep_axis(const ProbabilitySpace& space, const RandomVariable& v) {
  if (space.kind() != SpaceKind::DensityGrid2D) return -1;
  if (v.sweep_hint()) return *v.sweep_hint();
  const PointSet ps = space.points(1);
  const auto vals = v.evaluate(ps);
  double along[2] = {0.0, 0.0};
  const std::size_t len = ps.line_length;
  for (std::size_t l = 0; l < ps.line_count; ++l) {
    for (std::size_t j = 0; j < len; ++j) {
      const std::size_t p = l * len + j;
      if (j + 1 < len) {
        const double d = std::fabs(vals[p + 1] - vals[p]);
        const double w = ps.line_weight[p] + ps.line_weight[p + 1];
        if (std::isfinite(d)) along[1] += w * d;
      }
      if (l + 1 < ps.line_count) {
        const double d = std::fabs(vals[p + len] - vals[p]);
        const double w = ps.line_weight[p] + ps.line_weight[p + len];
        if (std::isfinite(d)) along[0] += w * d;
      }
    }
  }
  const double scale = std::max(along[0], along[1]);
  if (along[0] > along[1] && along[0] - along[1] > 1e-12 * scale) return 0;
  return 1;
}

ConditionalEstimate conditional_from(const Moments& m, SpaceKind kind) {
  ConditionalEstimate out;
  out.probability = m.mass;
  out.count = m.count;
  const bool null_event = kind == SpaceKind::DiscreteAtoms ? !(m.mass > 0.0)
                                                           : !(m.mass >= kProbabilityFloor);
  if (null_event) {
    out.degenerate = true;
    out.value = 0.0;
    return out;
  }
  out.value = m.moment / m.mass;
  if (kind == SpaceKind::Sampler) out.std_error = sample_std_error(m, out.value);
  return out;
}

Estimate probability(const ProbabilitySpace& space, const Event& a) {
  int axis = -1;
  if (const auto* iv = a.interval_data()) axis = preferred_sweep_axis(space, iv->var);
  const Integrator integ(space, axis);
  const std::vector<double> ones(integ.points().size, 1.0);
  const Moments m = integ.integrate(ones, a);
  Estimate e{m.mass, 0.0, m.count};
  if (space.kind() == SpaceKind::Sampler) {
    const double n = static_cast<double>(integ.points().size);
    e.std_error = std::sqrt(std::max(m.mass * (1.0 - m.mass), 0.0) / n);
  }
  return e;
}

Estimate expectation(const ProbabilitySpace& space, const RandomVariable& x) {
  const Integrator integ(space);
  const auto vals = integ.values(x);
  const auto& w = integ.points().weight;
  double abs_sum = 0.0;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (w[i] == 0.0) continue;
    abs_sum += w[i] * std::fabs(vals[i]);
  }
  if (!std::isfinite(abs_sum)) {
    throw Error(ErrorKind::NonIntegrable,
                "E|" + x.name() + "| is not finite on this space");
  }
  const Moments m = integ.total(vals);
  Estimate e{m.moment / m.mass, 0.0, m.count};
  if (space.kind() == SpaceKind::Sampler) e.std_error = sample_std_error(m, e.value);
  return e;
}

ConditionalEstimate cond_expectation_event(const ProbabilitySpace& space,
                                           const RandomVariable& x, const Event& a) {
  int axis = -1;
  if (const auto* iv = a.interval_data()) axis = preferred_sweep_axis(space, iv->var);
  const Integrator integ(space, axis);
  const auto vals = integ.values(x);
  const Moments m = integ.integrate(vals, a);
  ConditionalEstimate out = conditional_from(m, space.kind());
  if (!out.degenerate && !std::isfinite(out.value)) {
    throw Error(ErrorKind::NonIntegrable,
                "E[1_A " + x.name() + "] is not finite for A = " + a.label());
  }
  return out;
}

ProbabilitySpace pushforward(const ProbabilitySpace& space, const RandomVariable& y,
                             std::optional<Axis> bins) {
  const std::string name = y.name();
  if (const auto* atoms = space.atoms()) {
    const PointSet ps = space.points();
    const auto vals = y.evaluate(ps);
    std::map<double, double> law;
    for (std::size_t i = 0; i < vals.size(); ++i) {
      if (std::isnan(vals[i])) {
        throw Error(ErrorKind::UndefinedPredicate, name + " is undefined at atom " + atoms->ids[i]);
      }
      if (bins && !bins->contains(vals[i])) continue;
      law[vals[i]] += atoms->weights[i];
    }
    double total = 0.0;
    for (const auto& [v, w] : law) total += w;
    if (law.empty() || !(total > 0.0)) {
      throw Error(ErrorKind::EmptyRange, "no mass of " + name + " inside the declared range");
    }
    std::vector<std::string> ids;
    std::vector<double> weights;
    std::vector<double> coord;
    for (const auto& [v, w] : law) {
      ids.push_back(format_value(v));
      weights.push_back(w / total);
      coord.push_back(v);
    }
    return ProbabilitySpace::discrete({name}, std::move(ids), std::move(weights), {coord});
  }

  if (const auto* smp = space.sampler()) {
    const PointSet ps = space.points();
    const auto vals = y.evaluate(ps);
    std::map<double, std::size_t> distinct;
    for (double v : vals) {
      if (distinct.size() > 64) break;
      ++distinct[v];
    }
    if (distinct.size() <= 64 && !bins) {
      std::map<double, std::size_t> counts;
      for (double v : vals) ++counts[v];
      std::vector<std::string> ids;
      std::vector<double> weights;
      std::vector<double> coord;
      for (const auto& [v, c] : counts) {
        ids.push_back(format_value(v));
        weights.push_back(static_cast<double>(c) / static_cast<double>(vals.size()));
        coord.push_back(v);
      }
      double total = std::accumulate(weights.begin(), weights.end(), 0.0);
      for (auto& w : weights) w /= total;
      return ProbabilitySpace::discrete({name}, std::move(ids), std::move(weights), {coord});
    }
    Axis axis;
    if (bins) {
      axis = *bins;
    } else {
      const auto [lo, hi] = std::minmax_element(vals.begin(), vals.end());
      axis = Axis{*lo, *hi, 201};
    }
    axis.validate();
    const double h = axis.pitch();
    std::vector<double> density(axis.n, 0.0);
    std::size_t inside = 0;
    for (double v : vals) {
      const double k = std::round((v - axis.lo) / h);
      if (!(k >= 0.0) || k > static_cast<double>(axis.n - 1)) continue;
      density[static_cast<std::size_t>(k)] += 1.0;
      ++inside;
    }
    if (inside == 0) throw Error(ErrorKind::EmptyRange, "no samples of " + name + " inside the bins");
    double raw = 0.0;
    for (std::size_t k = 0; k < axis.n; ++k) raw += axis.weight(k) * density[k];
    for (auto& d : density) d /= raw;
    (void)smp;
    return ProbabilitySpace::grid1d(name, axis, std::move(density), 1e-9,
                                    "histogram of " + name + " from " +
                                        std::to_string(vals.size()) + " draws");
  }

  // Density grids: exact density of the piecewise-linear pushforward, i.e.
  // the derivative of the cut-cell distribution function, scattered onto the
  // output nodes.
  const int sweep = preferred_sweep_axis(space, y);
  const Integrator integ(space, sweep);
  const PointSet& ps = integ.points();
  const auto vals = integ.values(y);
  Axis axis;
  if (bins) {
    axis = *bins;
  } else {
    double lo = kInf;
    double hi = -kInf;
    for (std::size_t i = 0; i < vals.size(); ++i) {
      if (ps.weight[i] > 0.0 && std::isfinite(vals[i])) {
        lo = std::min(lo, vals[i]);
        hi = std::max(hi, vals[i]);
      }
    }
    if (!(hi > lo)) throw Error(ErrorKind::EmptyRange, name + " is constant; its law has no density");
    axis = Axis{lo, hi, 401};
  }
  axis.validate();
  const double ho = axis.pitch();
  std::vector<double> density(axis.n, 0.0);
  const std::size_t len = ps.line_length;
  for (std::size_t l = 0; l < ps.line_count; ++l) {
    for (std::size_t j = 0; j + 1 < len; ++j) {
      const std::size_t p = l * len + j;
      const double va = vals[p];
      const double vb = vals[p + 1];
      const double fa = ps.line_weight[p];
      const double fb = ps.line_weight[p + 1];
      if (!std::isfinite(va) || !std::isfinite(vb) || va == vb) continue;
      if (fa == 0.0 && fb == 0.0) continue;
      const double lo = std::min(va, vb);
      const double hi = std::max(va, vb);
      // Half-open [lo, hi) so that a node shared by two cells counts once.
      const double kmin = std::max(std::ceil((lo - axis.lo) / ho), 0.0);
      const double kmax =
          std::min(std::ceil((hi - axis.lo) / ho) - 1.0, static_cast<double>(axis.n - 1));
      for (double kd = kmin; kd <= kmax; kd += 1.0) {
        const std::size_t k = static_cast<std::size_t>(kd);
        const double s = std::clamp((axis.node(k) - va) / (vb - va), 0.0, 1.0);
        const double c = (fa + (fb - fa) * s) * ps.pitch / (hi - lo);
        density[k] += c;
      }
    }
  }
  double raw = 0.0;
  for (std::size_t k = 0; k < axis.n; ++k) raw += axis.weight(k) * density[k];
  if (!(raw > kProbabilityFloor)) {
    throw Error(ErrorKind::EmptyRange, "no mass of " + name + " inside the declared bins");
  }
  for (auto& d : density) d /= raw;
  const double tol = space.grid_metadata()->tolerance;
  return ProbabilitySpace::grid1d(name, axis, std::move(density), std::max(tol, 1e-9),
                                  "law of " + name + " (in-range mass " + format_value(raw) + ")");
}

}  // namespace condpoint
