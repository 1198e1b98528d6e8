#include "condpoint/window.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <numeric>

#include "condpoint/error.hpp"
#include "condpoint/parallel.hpp"

namespace condpoint {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

kernels::IntervalBounds window_bounds(WindowFamily family, double y, double eps) {
  switch (family) {
    case WindowFamily::Left: return {y - eps, y, false, true};
    case WindowFamily::Right: return {y, y + eps, true, false};
    case WindowFamily::Symmetric: break;
  }
  return {y - eps, y + eps, false, false};
}

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void richardson(WindowTrace& t) {
  const std::size_t n = t.estimates.size();
  if (n < 3 || t.space_kind == SpaceKind::Sampler) return;
  const auto& e = t.estimates;
  const double d2 = e[n - 1] - e[n - 2];
  const double d1 = e[n - 2] - e[n - 3];
  if (d2 == 0.0) {
    t.extrapolated = e[n - 1];
    return;
  }
  if (d1 == 0.0) return;
  const double r = t.eps[n - 1] / t.eps[n - 2];
  const double r_prev = t.eps[n - 2] / t.eps[n - 3];
  const double p = std::log(std::fabs(d1 / d2)) / std::log(1.0 / r);
  if (!std::isfinite(p) || p < 0.5) return;
  if (n >= 4) {
    const double d0 = e[n - 3] - e[n - 4];
    if (d0 == 0.0) return;
    const double p_prev = std::log(std::fabs(d0 / d1)) / std::log(1.0 / r_prev);
    if (!(std::fabs(p - p_prev) <= 0.25 * std::max(1.0, p))) return;
  }
  t.local_order = p;
  t.extrapolated = e[n - 1] + d2 / (std::pow(r, -p) - 1.0);
}

void finish_without_convergence(WindowTrace& t) {
  const auto& e = t.estimates;
  const std::size_t n = e.size();
  if (std::any_of(e.begin(), e.end(), [](double v) { return !std::isfinite(v); })) {
    t.verdict = Verdict::Diverged;
    t.note = "non-finite window estimate";
    return;
  }
  if (n >= 4) {
    const double a = std::fabs(e[n - 3] - e[n - 4]);
    const double b = std::fabs(e[n - 2] - e[n - 3]);
    const double c = std::fabs(e[n - 1] - e[n - 2]);
    if (a < b && b < c) {
      t.verdict = Verdict::Diverged;
      t.note = "successive differences grow over the last three windows";
      return;
    }
  }
  t.verdict = Verdict::Plateaued;
}

}  // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Converged: return "Converged";
    case Verdict::Plateaued: return "Plateaued";
    case Verdict::Diverged: return "Diverged";
    case Verdict::Starved: return "Starved";
  }
  return "?";
}

std::string_view to_string(WindowFamily f) {
  switch (f) {
    case WindowFamily::Symmetric: return "symmetric";
    case WindowFamily::Left: return "left";
    case WindowFamily::Right: return "right";
  }
  return "?";
}

std::string_view to_string(ToleranceBound b) {
  return b == ToleranceBound::Difference ? "difference" : "statistical";
}

Verdict parse_verdict(std::string_view text) {
  for (Verdict v : {Verdict::Converged, Verdict::Plateaued, Verdict::Diverged, Verdict::Starved}) {
    if (to_string(v) == text) return v;
  }
  throw Error(ErrorKind::Config, "unknown verdict '" + std::string(text) + "'");
}

WindowFamily parse_window_family(std::string_view text) {
  for (WindowFamily f : {WindowFamily::Symmetric, WindowFamily::Left, WindowFamily::Right}) {
    if (to_string(f) == text) return f;
  }
  throw Error(ErrorKind::Config, "unknown window family '" + std::string(text) + "'");
}

std::vector<double> Schedule::values(double sd_y) const {
  std::vector<double> out;
  if (!explicit_eps.empty()) {
    out = explicit_eps;
  } else {
    if (!(ratio > 0.0 && ratio < 1.0)) throw Error(ErrorKind::Config, "schedule ratio must lie in (0, 1)");
    if (depth == 0) throw Error(ErrorKind::Config, "schedule depth must be positive");
    double e = eps0 > 0.0 ? eps0 : (sd_y > 0.0 ? sd_y : 1.0);
    for (std::size_t k = 0; k < depth; ++k, e *= ratio) out.push_back(e);
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (!(out[k] > 0.0) || !std::isfinite(out[k]) || (k > 0 && !(out[k] < out[k - 1]))) {
      throw Error(ErrorKind::Config, "window schedule must be positive and strictly decreasing");
    }
  }
  return out;
}

double standard_deviation(const PointSet& points, std::span<const double> v) {
  double mass = 0.0;
  double mean = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double w = points.weight[i];
    if (w > 0.0 && std::isfinite(v[i])) {
      mass += w;
      mean += w * v[i];
    }
  }
  if (!(mass > 0.0)) return 0.0;
  mean /= mass;
  double var = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double w = points.weight[i];
    if (w > 0.0 && std::isfinite(v[i])) var += w * (v[i] - mean) * (v[i] - mean);
  }
  return std::sqrt(var / mass);
}

WindowTrace window_trace(const IntervalQuery& query, double y, const WindowOptions& options,
                         double sd_y) {
  const PointSet& ps = query.integrator().points();
  WindowTrace t;
  t.space_kind = ps.kind;
  t.y = y;
  t.family = options.family;
  t.resolution_floor = query.resolution();
  const double tol = options.tol > 0.0 ? options.tol : 1e-6;
  t.tolerance = tol;
  const bool sampled = ps.is_sampled();

  if (options.one_sided_at_boundary && !sampled && options.family == WindowFamily::Symmetric) {
    const double slack = 1e-12 * std::max(1.0, std::fabs(y));
    const bool at_min = std::fabs(y - query.support_min()) <= slack;
    const bool at_max = std::fabs(y - query.support_max()) <= slack;
    if (at_min != at_max) {
      t.family = at_min ? WindowFamily::Right : WindowFamily::Left;
      t.boundary = true;
      t.note = "y is a boundary point of the support; one-sided windows";
    }
  }

  const auto schedule = options.schedule.values(sd_y);
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    const double eps = schedule[k];
    const Moments m = query(window_bounds(t.family, y, eps));
    const bool empty = sampled ? m.count == 0
                               : (ps.kind == SpaceKind::DiscreteAtoms ? !(m.mass > 0.0)
                                                                       : !(m.mass > kProbabilityFloor));
    if (empty) {
      throw Error(ErrorKind::NonApproachablePoint,
                  "window of half-width " + number(eps) + " around y = " + number(y) +
                      " has no mass; y is outside the support of the law of Y");
    }
    if (sampled && m.count < options.n_min && k > 0) {
      t.verdict = Verdict::Starved;
      t.note = "window of half-width " + number(eps) + " holds " + std::to_string(m.count) +
               " samples (< " + std::to_string(options.n_min) + ")";
      return t;
    }
    const auto ce = conditional_from(m, ps.kind);
    t.eps.push_back(eps);
    t.estimates.push_back(ce.value);
    t.probabilities.push_back(m.mass);
    if (sampled) {
      t.std_errors.push_back(ce.std_error);
      t.counts.push_back(m.count);
    }
    t.value = ce.value;
    if (sampled && m.count < options.n_min) {
      t.verdict = Verdict::Starved;
      t.note = "first window holds " + std::to_string(m.count) + " samples (< " +
               std::to_string(options.n_min) + ")";
      return t;
    }
    if (!std::isfinite(ce.value)) {
      t.verdict = Verdict::Diverged;
      t.note = "non-finite window estimate";
      return t;
    }
    if (k == 0) continue;
    const double diff = std::fabs(t.estimates[k] - t.estimates[k - 1]);
    t.last_difference = diff;
    if (sampled) {
      const double s = options.statistical_factor *
                       std::hypot(t.std_errors[k], t.std_errors[k - 1]);
      t.tolerance = std::max(tol, s);
      t.bound = s > tol ? ToleranceBound::Statistical : ToleranceBound::Difference;
      if (diff <= t.tolerance) {
        t.verdict = Verdict::Converged;
        return t;
      }
    }
  }

  if (!sampled && t.estimates.size() >= 2 && t.last_difference <= tol) {
    t.verdict = Verdict::Converged;
    t.bound = ToleranceBound::Difference;
  } else if (t.estimates.size() < 2) {
    t.verdict = Verdict::Plateaued;
    t.note = "schedule has a single window";
  } else {
    finish_without_convergence(t);
  }
  richardson(t);
  return t;
}

WindowTrace window_estimate(const ProbabilitySpace& space, const RandomVariable& x,
                            const RandomVariable& y, double at, const WindowOptions& options) {
  const Integrator integ(space, preferred_sweep_axis(space, y), options.stream);
  IntervalQuery query(integ, integ.values(x), integ.values(y));
  const double sd = standard_deviation(integ.points(), query.v());
  WindowTrace t = window_trace(query, at, options, sd);
  t.x_name = x.name();
  t.y_name = y.name();
  return t;
}

double convergence_order(const WindowTrace& trace) {
  const auto& e = trace.estimates;
  std::size_t finite = 0;
  for (double v : e) finite += std::isfinite(v) ? 1 : 0;
  if (finite < 3 || finite != e.size()) {
    throw Error(ErrorKind::InsufficientTrace,
                "convergence order needs at least 3 finite estimates, trace has " +
                    std::to_string(finite));
  }
  const std::size_t n = e.size();
  const double last = e[n - 1];
  double scale = 1.0;
  for (double v : e) scale = std::max(scale, std::fabs(v));
  const double roundoff = 1e3 * DBL_EPSILON * scale;
  const bool sampled = !trace.std_errors.empty();

  std::vector<double> lx;
  std::vector<double> ly;
  bool moved = false;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    double noise = roundoff;
    if (sampled) noise += 3.0 * std::hypot(trace.std_errors[k], trace.std_errors[n - 1]);
    const double d = std::fabs(e[k] - last);
    if (d > noise) moved = true;
    if (d <= noise || trace.eps[k] < 2.0 * trace.resolution_floor) continue;
    lx.push_back(std::log(trace.eps[k]));
    ly.push_back(std::log(d));
  }
  if (!moved) return std::numeric_limits<double>::infinity();
  if (lx.size() < 2) {
    // Exact after finitely many windows (atoms): the tail no longer moves.
    if (n >= 3 && std::fabs(e[n - 2] - last) <= roundoff && std::fabs(e[n - 3] - last) <= roundoff &&
        trace.resolution_floor == 0.0 && !sampled) {
      return std::numeric_limits<double>::infinity();
    }
    throw Error(ErrorKind::InsufficientTrace,
                "fewer than 2 usable windows above the resolution floor");
  }
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(lx.size());
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(ly.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return sxy / sxx;
}

double PointwiseCondExp::value(std::size_t i) const {
  if (!ok(i) || !traces[i]) return kNaN;
  return traces[i]->value;
}

PointwiseCondExp evaluate_on_grid(const ProbabilitySpace& space, const RandomVariable& x,
                                  const RandomVariable& y, const std::vector<double>& y_grid,
                                  const GridOptions& options) {
  PointwiseCondExp out;
  out.x_name = x.name();
  out.y_name = y.name();
  out.y = y_grid;
  const std::size_t n = y_grid.size();
  out.traces.resize(n);
  out.flags.assign(n, "");
  out.orders.assign(n, kNaN);

  auto record = [&](std::size_t i, const IntervalQuery& query, double sd) {
    try {
      WindowTrace t = window_trace(query, y_grid[i], options.window, sd);
      t.x_name = out.x_name;
      t.y_name = out.y_name;
      if (t.verdict != Verdict::Converged) out.flags[i] = std::string(to_string(t.verdict));
      try {
        out.orders[i] = convergence_order(t);
      } catch (const Error&) {
      }
      out.traces[i] = std::move(t);
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::NonApproachablePoint) throw;
      out.flags[i] = std::string(to_string(err.kind())) + ": " + err.what();
    }
  };

  const int sweep = preferred_sweep_axis(space, y);
  if (space.kind() == SpaceKind::Sampler) {
    parallel_for(
        n,
        [&](std::size_t i) {
          const Integrator integ(space, sweep, i);
          IntervalQuery query(integ, integ.values(x), integ.values(y));
          record(i, query, standard_deviation(integ.points(), query.v()));
        },
        options.threads);
    return out;
  }
  const Integrator integ(space, sweep);
  IntervalQuery query(integ, integ.values(x), integ.values(y));
  const double sd = standard_deviation(integ.points(), query.v());
  parallel_for(n, [&](std::size_t i) { record(i, query, sd); }, options.threads);
  return out;
}

}  // namespace condpoint
