#include "condpoint/pathology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "condpoint/error.hpp"
#include "condpoint/factorization.hpp"
#include "condpoint/measure.hpp"

namespace condpoint {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string point_name(const PointSet& ps, std::size_t p) {
  return ps.ids.empty() ? std::to_string(p) : ps.ids[p];
}

std::vector<double> distinct(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v) {
    if (out.empty() || std::fabs(x - out.back()) > 1e-12 * std::max(1.0, std::fabs(x))) {
      out.push_back(x);
    }
  }
  return out;
}

void check_shrinking(const ApproximationFamily& fam, const WindowTrace& t) {
  const auto& p = t.probabilities;
  for (std::size_t k = 1; k < p.size(); ++k) {
    if (p[k] > p[k - 1] * (1.0 + 1e-12)) {
      throw Error(ErrorKind::FamilyNotShrinking,
                  "family '" + fam.name + "' gains probability between eps = " +
                      number(t.eps[k - 1]) + " and " + number(t.eps[k]));
    }
  }
  if (p.size() >= 2 && !(p.back() < p.front())) {
    throw Error(ErrorKind::FamilyNotShrinking,
                "family '" + fam.name + "' does not lose probability over its schedule");
  }
}

}  // namespace

TooCoarseDemo too_coarse_demo(const ProbabilitySpace& space, const RandomVariable& x,
                              const Event& a, double alternative) {
  if (space.kind() == SpaceKind::Sampler) {
    throw Error(ErrorKind::Task, "too_coarse_demo needs a discrete or grid space");
  }
  const PointSet ps = space.points();
  const auto in_a = a.mask(ps);
  double pa = 0.0;
  for (std::size_t p = 0; p < ps.size; ++p) {
    if (in_a[p]) pa += ps.weight[p];
  }
  if (pa > 0.0) {
    throw Error(ErrorKind::NotNull, "P(" + a.label() + ") = " + number(pa) + " > 0");
  }
  const double ex = expectation(space, x).value;
  std::vector<double> first(ps.size, ex);
  std::vector<double> second(ps.size, ex);
  std::vector<std::string> differing;
  for (std::size_t p = 0; p < ps.size; ++p) {
    if (!in_a[p]) continue;
    second[p] = alternative;
    if (alternative != ex) differing.push_back(point_name(ps, p));
  }
  auto z1 = RandomVariable::table("E[X|F] = E[X]", std::move(first));
  auto z2 = RandomVariable::table("E[X|F] = " + number(alternative) + " on A", std::move(second));
  const std::vector<Event> generators{a};
  auto r1 = verify_cond_exp(space, x, z1, generators);
  auto r2 = verify_cond_exp(space, x, z2, generators);
  return TooCoarseDemo{a.label(),        ex,          alternative,        std::move(z1),
                       std::move(z2),    std::move(r1), std::move(r2),   std::move(differing)};
}

TooFineDemo too_fine_demo(const ProbabilitySpace& space, const RandomVariable& x, const Event& a) {
  TooFineDemo out;
  out.event = a.label();
  if (space.kind() == SpaceKind::DiscreteAtoms) {
    const PointSet ps = space.points();
    const auto in_a = a.mask(ps);
    const auto xv = x.evaluate(ps);
    double pa = 0.0;
    std::vector<double> vals;
    for (std::size_t p = 0; p < ps.size; ++p) {
      if (!in_a[p]) continue;
      pa += ps.weight[p];
      vals.push_back(xv[p]);
    }
    if (pa > 0.0) throw Error(ErrorKind::NotNull, "P(" + a.label() + ") = " + number(pa) + " > 0");
    out.points = vals.size();
    out.witnesses = distinct(std::move(vals));
  } else if (space.is_grid()) {
    const auto* iv = a.interval_data();
    if (!iv || iv->lo != iv->hi) {
      throw Error(ErrorKind::Task, "on grids the null event must be a level set {V = v}");
    }
    const double pa = probability(space, a).value;
    if (pa > kProbabilityFloor) {
      throw Error(ErrorKind::NotNull, "P(" + a.label() + ") = " + number(pa) + " > 0");
    }
    const auto r = factorize(space, x, iv->var, {iv->lo});
    const LevelSet& ls = r.levels.front();
    out.points = ls.size;
    out.band = r.band;
    out.witnesses = ls.witnesses;
  } else {
    throw Error(ErrorKind::Task, "too_fine_demo needs a discrete or grid space");
  }
  if (out.witnesses.size() < 2) {
    throw Error(ErrorKind::DegenerateA, x.name() + " is constant on " + a.label() +
                                            "; the demonstration is vacuous");
  }
  return out;
}

Event ApproximationFamily::at(double eps) const {
  return Event::interval(variable, target - eps, target + eps);
}

ParadoxReport borel_kolmogorov(const ProbabilitySpace& space, const RandomVariable& statistic,
                               const std::string& z_name,
                               const std::vector<ApproximationFamily>& families,
                               const WindowOptions& options, const std::string& null_event) {
  ParadoxReport report;
  report.null_event = null_event;
  report.statistic = statistic.name();
  report.all_converged = !families.empty();
  const auto abs_z = RandomVariable::expression("|" + z_name + "|", "abs(" + z_name + ")");
  for (const auto& fam : families) {
    const int sweep = preferred_sweep_axis(space, fam.variable);
    const Integrator integ(space, sweep, options.stream);
    const auto v = integ.values(fam.variable);
    IntervalQuery query(integ, integ.values(statistic), v);
    WindowOptions opt = options;
    opt.schedule = fam.schedule;
    opt.family = WindowFamily::Symmetric;
    opt.one_sided_at_boundary = false;
    FamilyResult fr;
    fr.name = fam.name;
    fr.variable = fam.variable.describe();
    try {
      fr.trace = window_trace(query, fam.target, opt, standard_deviation(integ.points(), v));
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::NonApproachablePoint) throw;
      throw Error(ErrorKind::FamilyNotShrinking,
                  "family '" + fam.name + "' loses all mass: " + err.what());
    }
    fr.trace.x_name = statistic.name();
    fr.trace.y_name = fam.variable.name();
    check_shrinking(fam, fr.trace);

    const double eps = fr.trace.eps.back();
    const kernels::IntervalBounds last{fam.target - eps, fam.target + eps, false, false};
    IntervalQuery abs_query(integ, integ.values(abs_z), v);
    const Moments m = abs_query(last);
    fr.abs_mean = m.moment / m.mass;

    const PointSet& ps = integ.points();
    const auto* g = space.grid2d();
    const auto zi = space.coordinate_index(z_name);
    if (g && zi && static_cast<int>(*zi) != ps.sweep_axis) {
      const Axis& za = g->axes[*zi];
      const auto masses = abs_query.line_masses(last);
      double total = 0.0;
      for (double mm : masses) total += mm;
      for (std::size_t l = 0; l < masses.size(); ++l) {
        fr.z.push_back(za.node(l));
        fr.density.push_back(masses[l] / (total * za.weight(l)));
      }
    }

    fr.error = std::max(fr.trace.tolerance, fr.trace.last_difference);
    if (fr.trace.extrapolated) fr.error += std::fabs(*fr.trace.extrapolated - fr.trace.value);
    if (fr.trace.verdict != Verdict::Converged) report.all_converged = false;
    report.combined_tolerance += fr.error;
    report.families.push_back(std::move(fr));
  }
  double gap = kNaN;
  for (std::size_t i = 0; i < report.families.size(); ++i) {
    for (std::size_t j = i + 1; j < report.families.size(); ++j) {
      const auto& a = report.families[i].trace;
      const auto& b = report.families[j].trace;
      if (a.verdict != Verdict::Converged || b.verdict != Verdict::Converged) continue;
      const double d = std::fabs(a.value - b.value);
      gap = std::isnan(gap) ? d : std::max(gap, d);
    }
  }
  report.discrepancy = gap;
  return report;
}

bool ParadoxOutcome::pass() const {
  return main.all_converged && control.all_converged &&
         main.discrepancy > 10.0 * main.combined_tolerance &&
         control.discrepancy <= control.combined_tolerance;
}

std::vector<std::string> paradox_instance_names() { return {"ratio-normal", "ratio-normal-mc"}; }

ParadoxInstance paradox_instance(std::string_view name, std::uint64_t seed, std::size_t n) {
  const auto family = Distribution::normal({0.0, 0.0}, {1.0, 0.0, 0.0, 1.0});
  std::optional<ProbabilitySpace> space;
  WindowOptions options;
  if (name == "ratio-normal") {
    if (n % 2 != 0) throw Error(ErrorKind::Config, "ratio-normal needs an even node count (no node at z = 0)");
    const Axis axis{-8.0, 8.0, n};
    space = ProbabilitySpace::grid2d({"z", "y"}, {axis, axis}, family, 1e-8);
  } else if (name == "ratio-normal-mc") {
    space = ProbabilitySpace::sampler({"z", "y"}, family, seed, 1000000);
  } else {
    throw Error(ErrorKind::Config, "unknown paradox instance '" + std::string(name) + "'");
  }
  auto schedule = [](double eps0) {
    Schedule s;
    s.eps0 = eps0;
    return s;
  };
  const auto y = RandomVariable::expression("Y", Expr::parse("y"), 1);
  const auto w = RandomVariable::expression("W", Expr::parse("y/z"), 1);
  return ParadoxInstance{
      std::string(name),
      std::move(*space),
      RandomVariable::expression("Z^2", "z^2"),
      {{"via Y", y, 0.0, schedule(1.0)}, {"via W = Y/Z", w, 0.0, schedule(1.0)}},
      {{"via Y (eps0 = 1)", y, 0.0, schedule(1.0)}, {"via Y (eps0 = 0.37)", y, 0.0, schedule(0.37)}},
      options};
}

ParadoxOutcome run_paradox(const ParadoxInstance& instance) {
  const std::string null_event = "{y = 0} = {y/z = 0}";
  ParadoxOutcome out;
  out.instance = instance.name;
  out.main = borel_kolmogorov(instance.space, instance.statistic, "z", instance.families,
                              instance.options, null_event);
  out.control = borel_kolmogorov(instance.space, instance.statistic, "z", instance.control,
                                 instance.options, "{y = 0}");
  return out;
}

}  // namespace condpoint
