#include "condpoint/factorization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "condpoint/error.hpp"
#include "condpoint/measure.hpp"

namespace condpoint {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> distinct(std::vector<double> v, double tol) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v) {
    if (out.empty() || std::fabs(x - out.back()) > tol * std::max(1.0, std::fabs(x))) {
      out.push_back(x);
    }
  }
  return out;
}

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void discrete_levels(FactorizationResult& r, const PointSet& ps, std::span<const double> gv,
                     std::span<const double> yv, std::vector<double> levels) {
  if (levels.empty()) {
    levels.assign(yv.begin(), yv.end());
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  }
  for (double y : levels) {
    LevelSet ls;
    ls.y = y;
    std::vector<double> vals;
    for (std::size_t p = 0; p < ps.size; ++p) {
      if (yv[p] != y) continue;
      ls.members.push_back(ps.ids[p]);
      vals.push_back(gv[p]);
    }
    ls.size = vals.size();
    ls.empty = vals.empty();
    ls.witnesses = distinct(std::move(vals), r.witness_tol);
    ls.phi = ls.witnesses.size() == 1 ? ls.witnesses.front() : kNaN;
    r.levels.push_back(std::move(ls));
  }
}

void grid_levels(FactorizationResult& r, const PointSet& ps, std::span<const double> gv,
                 std::span<const double> yv, const std::vector<double>& levels) {
  for (double y : levels) {
    LevelSet ls;
    ls.y = y;
    // Band points grouped by their own Y value.
    std::map<double, std::vector<double>> groups;
    for (std::size_t p = 0; p < ps.size; ++p) {
      if (std::fabs(yv[p] - y) <= r.band) groups[yv[p]].push_back(gv[p]);
    }
    ls.empty = groups.empty();
    if (ls.empty) {
      ls.phi = kNaN;
      r.levels.push_back(std::move(ls));
      continue;
    }
    std::vector<double> keys;
    std::vector<double> phis;
    double nearest_gap = std::numeric_limits<double>::infinity();
    for (auto& [key, vals] : groups) {
      ls.size += vals.size();
      auto w = distinct(vals, r.witness_tol);
      if (w.size() != 1) ls.conflicting_groups.push_back(key);
      const double gap = std::fabs(key - y);
      if (gap < nearest_gap) {
        nearest_gap = gap;
        ls.witnesses = w;
      }
      keys.push_back(key);
      phis.push_back(w.size() == 1 ? w.front() : kNaN);
    }
    if (!ls.conflicting_groups.empty() && ls.witnesses.size() == 1) {
      // Report the witnesses of a conflicting group instead.
      ls.witnesses = distinct(groups[ls.conflicting_groups.front()], r.witness_tol);
    }
    if (!ls.conflicting_groups.empty()) {
      ls.phi = kNaN;
    } else {
      const auto hi = std::lower_bound(keys.begin(), keys.end(), y);
      if (hi == keys.end()) {
        ls.phi = phis.back();
      } else if (*hi == y || hi == keys.begin()) {
        ls.phi = phis[static_cast<std::size_t>(hi - keys.begin())];
      } else {
        const std::size_t j = static_cast<std::size_t>(hi - keys.begin());
        const double t = (y - keys[j - 1]) / (keys[j] - keys[j - 1]);
        ls.phi = phis[j - 1] + (phis[j] - phis[j - 1]) * t;
      }
    }
    r.levels.push_back(std::move(ls));
  }
}

}  // namespace

std::string_view to_string(FactorVerdict v) {
  return v == FactorVerdict::Factored ? "Factored" : "NotMeasurable";
}

std::vector<std::size_t> FactorizationResult::offending() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i].witnesses.size() > 1 || !levels[i].conflicting_groups.empty()) out.push_back(i);
  }
  return out;
}

FactorizationResult factorize(const ProbabilitySpace& space, const RandomVariable& g,
                              const RandomVariable& y, std::vector<double> levels) {
  FactorizationResult r;
  r.g_name = g.name();
  r.y_name = y.name();
  if (space.kind() == SpaceKind::Sampler) {
    throw Error(ErrorKind::Task, "factorize needs a discrete or grid space");
  }
  if (space.kind() == SpaceKind::DiscreteAtoms) {
    const PointSet ps = space.points();
    discrete_levels(r, ps, g.evaluate(ps), y.evaluate(ps), std::move(levels));
  } else {
    if (levels.empty()) throw Error(ErrorKind::Config, "factorize on a grid needs explicit levels");
    r.witness_tol = 1e-10;
    const Integrator integ(space, preferred_sweep_axis(space, y));
    IntervalQuery query(integ, integ.values(g), integ.values(y));
    r.band = 0.5 * query.resolution();
    grid_levels(r, integ.points(), query.x(), query.v(), levels);
  }
  r.verdict = r.offending().empty() ? FactorVerdict::Factored : FactorVerdict::NotMeasurable;
  return r;
}

double pointwise_from_any_omega(const ProbabilitySpace& space, const RandomVariable& condexp,
                                const RandomVariable& y, double at) {
  const auto r = factorize(space, condexp, y, {at});
  const LevelSet& ls = r.levels.front();
  if (ls.empty) {
    throw Error(ErrorKind::EmptyLevelSet,
                "{" + y.name() + " = " + number(at) + "} is empty; no value is assigned");
  }
  if (r.verdict == FactorVerdict::NotMeasurable) {
    std::string w;
    for (double v : ls.witnesses) w += (w.empty() ? "" : ", ") + number(v);
    throw Error(ErrorKind::NotMeasurable, condexp.name() + " takes the values {" + w + "} on {" +
                                              y.name() + " = " + number(at) +
                                              "}; it is not a function of " + y.name());
  }
  return ls.phi;
}

}  // namespace condpoint
