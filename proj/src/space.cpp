#include "condpoint/space.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <set>

#include "condpoint/error.hpp"
#include "condpoint/rng.hpp"

namespace condpoint {
namespace {

[[noreturn]] void config_error(const std::string& why) {
  throw Error(ErrorKind::Config, why);
}

std::string number_text(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

double trapezoid_total(const std::vector<double>& density, const Axis& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.n; ++i) s += a.weight(i) * density[i];
  return s;
}

double trapezoid_total(const std::vector<double>& density,
                       const std::array<Axis, 2>& axes) {
  double s = 0.0;
  for (std::size_t i = 0; i < axes[0].n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < axes[1].n; ++j) {
      row += axes[1].weight(j) * density[i * axes[1].n + j];
    }
    s += axes[0].weight(i) * row;
  }
  return s;
}

void check_density(std::vector<double>& density, double tolerance,
                   GridMetadata& meta, double raw) {
  for (double d : density) {
    if (!std::isfinite(d) || d < 0.0) {
      config_error("grid density values must be finite and non-negative");
    }
  }
  if (!(tolerance > 0.0)) config_error("grid tolerance must be positive");
  if (!(std::fabs(raw - 1.0) <= tolerance)) {
    config_error("grid density integrates to " + number_text(raw) +
                 ", not 1 within the declared tolerance " + number_text(tolerance));
  }
  for (double& d : density) d /= raw;
  meta.tolerance = tolerance;
  meta.raw_integral = raw;
}

}  // namespace

double Axis::node(std::size_t i) const {
  const double m = static_cast<double>(n - 1);
  const double k = static_cast<double>(i);
  return (lo * (m - k) + hi * k) / m;
}

double Axis::weight(std::size_t i) const {
  const double h = pitch();
  return (i == 0 || i + 1 == n) ? 0.5 * h : h;
}

std::vector<double> Axis::nodes() const {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = node(i);
  return out;
}

void Axis::validate() const {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo)) {
    config_error("axis requires finite lo < hi");
  }
  if (n < 2) config_error("axis requires at least 2 nodes");
}

Axis Axis::parse(std::string_view text) {
  Axis a;
  const auto c1 = text.find(':');
  const auto c2 = c1 == std::string_view::npos ? c1 : text.find(':', c1 + 1);
  if (c2 == std::string_view::npos) config_error("axis must be written a:b:n, got '" + std::string(text) + "'");
  auto num = [&](std::string_view s, double& out) {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      config_error("bad number '" + std::string(s) + "' in axis '" + std::string(text) + "'");
    }
  };
  num(text.substr(0, c1), a.lo);
  num(text.substr(c1 + 1, c2 - c1 - 1), a.hi);
  double n = 0.0;
  num(text.substr(c2 + 1), n);
  if (n < 1 || n != std::floor(n)) config_error("axis node count must be a positive integer");
  a.n = static_cast<std::size_t>(n);
  if (a.n == 1) {
    if (a.lo != a.hi) config_error("a single-node axis needs a == b");
    return a;
  }
  a.validate();
  return a;
}

std::string_view to_string(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::DiscreteAtoms: return "atoms";
    case SpaceKind::DensityGrid1D: return "grid1d";
    case SpaceKind::DensityGrid2D: return "grid2d";
    case SpaceKind::Sampler: return "sampler";
  }
  return "unknown";
}

ProbabilitySpace ProbabilitySpace::discrete(std::vector<std::string> coord_names,
                                            std::vector<std::string> ids,
                                            std::vector<double> weights,
                                            std::vector<std::vector<double>> coords) {
  if (weights.empty()) config_error("a discrete space needs at least one atom");
  if (ids.size() != weights.size()) config_error("one id per atom is required");
  if (coords.size() != coord_names.size()) config_error("coordinate columns do not match names");
  for (const auto& c : coords) {
    if (c.size() != weights.size()) config_error("coordinate column length differs from atom count");
  }
  std::set<std::string> seen(ids.begin(), ids.end());
  if (seen.size() != ids.size()) config_error("atom ids must be unique");
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) config_error("atom weights must be finite and >= 0");
    total += w;
  }
  if (std::fabs(total - 1.0) > 1e-12) {
    config_error("atom weights sum to " + number_text(total) + ", not 1");
  }
  return ProbabilitySpace(Atoms{std::move(ids), std::move(weights), std::move(coords)},
                          std::move(coord_names));
}

ProbabilitySpace ProbabilitySpace::grid1d(std::string coord, Axis axis,
                                          std::vector<double> density,
                                          double tolerance, std::string source) {
  axis.validate();
  if (density.size() != axis.n) config_error("grid1d needs one density value per node");
  Grid1D g{axis, std::move(density), {}};
  check_density(g.density, tolerance, g.meta, trapezoid_total(g.density, axis));
  g.meta.source = std::move(source);
  g.meta.bounds = {axis.lo, axis.hi};
  return ProbabilitySpace(std::move(g), {std::move(coord)});
}

ProbabilitySpace ProbabilitySpace::grid1d(std::string coord, Axis axis,
                                          const Distribution& family, double tolerance) {
  if (family.dimension() != 1) config_error("grid1d needs a 1D family");
  axis.validate();
  std::vector<double> density(axis.n);
  for (std::size_t i = 0; i < axis.n; ++i) {
    const double x = axis.node(i);
    density[i] = family.pdf(std::span<const double>(&x, 1));
  }
  return grid1d(std::move(coord), axis, std::move(density), tolerance, family.describe());
}

ProbabilitySpace ProbabilitySpace::grid2d(std::array<std::string, 2> coords,
                                          std::array<Axis, 2> axes,
                                          std::vector<double> density,
                                          double tolerance, std::string source) {
  axes[0].validate();
  axes[1].validate();
  if (coords[0] == coords[1]) config_error("grid2d coordinates need distinct names");
  if (density.size() != axes[0].n * axes[1].n) config_error("grid2d needs n0*n1 density values");
  Grid2D g{axes, std::move(density), {}};
  check_density(g.density, tolerance, g.meta, trapezoid_total(g.density, axes));
  g.meta.source = std::move(source);
  g.meta.bounds = {axes[0].lo, axes[0].hi, axes[1].lo, axes[1].hi};
  return ProbabilitySpace(std::move(g), {coords[0], coords[1]});
}

ProbabilitySpace ProbabilitySpace::grid2d(std::array<std::string, 2> coords,
                                          std::array<Axis, 2> axes,
                                          const Distribution& family, double tolerance) {
  if (family.dimension() != 2) config_error("grid2d needs a 2D family");
  axes[0].validate();
  axes[1].validate();
  std::vector<double> density(axes[0].n * axes[1].n);
  for (std::size_t i = 0; i < axes[0].n; ++i) {
    for (std::size_t j = 0; j < axes[1].n; ++j) {
      const double p[2] = {axes[0].node(i), axes[1].node(j)};
      density[i * axes[1].n + j] = family.pdf(p);
    }
  }
  return grid2d(std::move(coords), axes, std::move(density), tolerance, family.describe());
}

ProbabilitySpace ProbabilitySpace::sampler(std::vector<std::string> coord_names,
                                           Distribution family, std::uint64_t seed,
                                           std::size_t budget) {
  if (coord_names.size() != family.dimension()) {
    config_error("sampler needs one coordinate name per family dimension");
  }
  if (budget < 2) config_error("sampler budget must be at least 2 draws");
  return ProbabilitySpace(Sampler{std::move(family), seed, budget}, std::move(coord_names));
}

SpaceKind ProbabilitySpace::kind() const {
  return static_cast<SpaceKind>(data_.index());
}

bool ProbabilitySpace::is_grid() const {
  return kind() == SpaceKind::DensityGrid1D || kind() == SpaceKind::DensityGrid2D;
}

std::optional<std::size_t> ProbabilitySpace::coordinate_index(std::string_view name) const {
  for (std::size_t i = 0; i < coord_names_.size(); ++i) {
    if (coord_names_[i] == name) return i;
  }
  return std::nullopt;
}

std::size_t ProbabilitySpace::point_count() const {
  switch (kind()) {
    case SpaceKind::DiscreteAtoms: return atoms()->weights.size();
    case SpaceKind::DensityGrid1D: return grid1d()->axis.n;
    case SpaceKind::DensityGrid2D: return grid2d()->axes[0].n * grid2d()->axes[1].n;
    case SpaceKind::Sampler: return sampler()->budget;
  }
  return 0;
}

const GridMetadata* ProbabilitySpace::grid_metadata() const {
  if (const auto* g = grid1d()) return &g->meta;
  if (const auto* g = grid2d()) return &g->meta;
  return nullptr;
}

ProbabilitySpace ProbabilitySpace::with_seed(std::uint64_t seed) const {
  ProbabilitySpace copy = *this;
  if (auto* s = std::get_if<Sampler>(&copy.data_)) s->seed = seed;
  return copy;
}

PointSet ProbabilitySpace::points(int sweep_axis, std::uint64_t stream) const {
  PointSet ps;
  ps.kind = kind();
  ps.coord_names = coord_names_;
  if (const auto* a = atoms()) {
    ps.size = a->weights.size();
    ps.weight = a->weights;
    ps.coords = a->coords;
    ps.ids = a->ids;
  } else if (const auto* g = grid1d()) {
    const Axis& ax = g->axis;
    ps.size = ax.n;
    ps.line_length = ax.n;
    ps.line_count = 1;
    ps.pitch = ax.pitch();
    ps.sweep_axis = 0;
    ps.line_weight = g->density;
    ps.weight.resize(ax.n);
    for (std::size_t i = 0; i < ax.n; ++i) ps.weight[i] = ax.weight(i) * g->density[i];
    ps.coords = {ax.nodes()};
  } else if (const auto* g = grid2d()) {
    const int s = sweep_axis < 0 ? 1 : sweep_axis;
    if (s > 1) config_error("sweep axis must be 0 or 1 on a 2D grid");
    const int o = 1 - s;
    const Axis& as = g->axes[static_cast<std::size_t>(s)];
    const Axis& ao = g->axes[static_cast<std::size_t>(o)];
    const std::size_t n1 = g->axes[1].n;
    ps.size = as.n * ao.n;
    ps.line_length = as.n;
    ps.line_count = ao.n;
    ps.pitch = as.pitch();
    ps.sweep_axis = s;
    ps.weight.resize(ps.size);
    ps.line_weight.resize(ps.size);
    ps.coords.assign(2, std::vector<double>(ps.size));
    if (s == 0) ps.canonical.resize(ps.size);
    const auto snodes = as.nodes();
    const auto onodes = ao.nodes();
    for (std::size_t l = 0; l < ao.n; ++l) {
      for (std::size_t j = 0; j < as.n; ++j) {
        const std::size_t p = l * as.n + j;
        const std::size_t c = (s == 1) ? p : j * n1 + l;
        const double f = g->density[c] * ao.weight(l);
        ps.line_weight[p] = f;
        ps.weight[p] = f * as.weight(j);
        ps.coords[static_cast<std::size_t>(s)][p] = snodes[j];
        ps.coords[static_cast<std::size_t>(o)][p] = onodes[l];
        if (s == 0) ps.canonical[p] = c;
      }
    }
  } else if (const auto* smp = sampler()) {
    const std::size_t d = smp->family.dimension();
    ps.size = smp->budget;
    ps.weight.assign(ps.size, 1.0 / static_cast<double>(ps.size));
    ps.coords.assign(d, std::vector<double>(ps.size));
    rng::Engine engine(rng::derive_seed(smp->seed, stream));
    double row[2];
    for (std::size_t i = 0; i < ps.size; ++i) {
      smp->family.sample(engine, std::span<double>(row, d));
      for (std::size_t c = 0; c < d; ++c) ps.coords[c][i] = row[c];
    }
  }
  return ps;
}

std::span<const double> PointSet::coord(std::string_view name) const {
  for (std::size_t i = 0; i < coord_names.size(); ++i) {
    if (coord_names[i] == name) return coords[i];
  }
  return {};
}

RandomVariable RandomVariable::expression(std::string name, Expr expr,
                                          std::optional<int> sweep_axis) {
  RandomVariable rv;
  rv.name_ = std::move(name);
  rv.expr_ = std::move(expr);
  rv.sweep_ = sweep_axis;
  return rv;
}

RandomVariable RandomVariable::expression(std::string name, std::string_view text) {
  return expression(std::move(name), Expr::parse(text));
}

RandomVariable RandomVariable::table(std::string name, std::vector<double> values) {
  RandomVariable rv;
  rv.name_ = std::move(name);
  rv.table_ = std::move(values);
  return rv;
}

std::string RandomVariable::describe() const {
  if (expr_) return expr_->text();
  return "table[" + std::to_string(table_->size()) + "]";
}

std::vector<double> RandomVariable::evaluate(const PointSet& points) const {
  if (expr_) {
    for (const auto& id : expr_->identifiers()) {
      if (points.coord(id).empty() && points.size > 0) {
        throw Error(ErrorKind::Config, "random variable '" + name_ +
                                           "' refers to unknown coordinate '" + id + "'");
      }
    }
    return expr_->evaluate([&](std::string_view id) { return points.coord(id); },
                           points.size);
  }
  if (points.is_sampled()) {
    throw Error(ErrorKind::UndefinedPredicate,
                "table variable '" + name_ + "' cannot be evaluated on sample rows");
  }
  if (table_->size() != points.size) {
    throw Error(ErrorKind::UndefinedPredicate,
                "table variable '" + name_ + "' has " + std::to_string(table_->size()) +
                    " values for " + std::to_string(points.size) + " points");
  }
  if (points.canonical.empty()) return *table_;
  std::vector<double> out(points.size);
  for (std::size_t p = 0; p < points.size; ++p) out[p] = (*table_)[points.canonical[p]];
  return out;
}

Event Event::all() {
  Event e;
  e.kind_ = Kind::All;
  e.label_ = "Omega";
  return e;
}

Event Event::none() {
  Event e;
  e.kind_ = Kind::Empty;
  e.label_ = "empty";
  return e;
}

Event Event::atoms(std::vector<std::string> ids) {
  Event e;
  e.kind_ = Kind::Atoms;
  e.label_ = "{";
  for (std::size_t i = 0; i < ids.size(); ++i) e.label_ += (i ? "," : "") + ids[i];
  e.label_ += "}";
  e.ids_ = std::move(ids);
  return e;
}

Event Event::interval(RandomVariable var, double lo, double hi, bool lo_closed,
                      bool hi_closed) {
  Event e;
  e.kind_ = Kind::Interval;
  e.label_ = var.name() + " in " + (lo_closed ? "[" : "(") + number_text(lo) + "," +
             number_text(hi) + (hi_closed ? "]" : ")");
  e.interval_ = Interval{std::move(var), lo, hi, lo_closed, hi_closed};
  return e;
}

Event Event::level(RandomVariable var, double value) {
  Event e = interval(std::move(var), value, value, true, true);
  e.label_ = e.interval_->var.name() + " = " + number_text(value);
  return e;
}

Event Event::predicate(Expr expr) {
  Event e;
  e.kind_ = Kind::Predicate;
  e.label_ = expr.text();
  e.expr_ = std::move(expr);
  return e;
}

Event Event::intersection(std::vector<Event> parts) {
  Event e;
  e.kind_ = Kind::Intersection;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    e.label_ += (i ? " & " : "") + ("(" + parts[i].label_ + ")");
  }
  if (parts.empty()) e.label_ = "Omega";
  e.parts_ = std::move(parts);
  return e;
}

Event Event::complement(Event inner) {
  Event e;
  e.kind_ = Kind::Complement;
  e.label_ = "not (" + inner.label_ + ")";
  e.parts_.push_back(std::move(inner));
  return e;
}

Event Event::labeled(std::string label) const {
  Event e = *this;
  e.label_ = std::move(label);
  return e;
}

std::vector<std::uint8_t> Event::mask(const PointSet& points) const {
  const std::size_t n = points.size;
  switch (kind_) {
    case Kind::All: return std::vector<std::uint8_t>(n, 1);
    case Kind::Empty: return std::vector<std::uint8_t>(n, 0);
    case Kind::Atoms: {
      if (points.kind != SpaceKind::DiscreteAtoms) {
        throw Error(ErrorKind::UndefinedPredicate,
                    "atom-set event '" + label_ + "' needs a discrete space");
      }
      std::vector<std::uint8_t> m(n, 0);
      for (const auto& id : ids_) {
        const auto it = std::find(points.ids.begin(), points.ids.end(), id);
        if (it == points.ids.end()) {
          throw Error(ErrorKind::UndefinedPredicate, "unknown atom '" + id + "' in event");
        }
        m[static_cast<std::size_t>(it - points.ids.begin())] = 1;
      }
      return m;
    }
    case Kind::Interval: {
      const auto v = interval_->var.evaluate(points);
      std::vector<std::uint8_t> m(n, 0);
      for (std::size_t i = 0; i < n; ++i) {
        if (std::isnan(v[i])) {
          throw Error(ErrorKind::UndefinedPredicate,
                      "event '" + label_ + "' is undefined at point " + std::to_string(i));
        }
        const bool above = v[i] > interval_->lo || (interval_->lo_closed && v[i] == interval_->lo);
        const bool below = v[i] < interval_->hi || (interval_->hi_closed && v[i] == interval_->hi);
        m[i] = above && below;
      }
      return m;
    }
    case Kind::Predicate: {
      const auto v = expr_->evaluate([&](std::string_view id) { return points.coord(id); }, n);
      std::vector<std::uint8_t> m(n, 0);
      for (std::size_t i = 0; i < n; ++i) {
        if (std::isnan(v[i])) {
          throw Error(ErrorKind::UndefinedPredicate,
                      "event '" + label_ + "' is undefined at point " + std::to_string(i));
        }
        m[i] = v[i] != 0.0;
      }
      return m;
    }
    case Kind::Intersection: {
      std::vector<std::uint8_t> m(n, 1);
      for (const auto& p : parts_) {
        const auto pm = p.mask(points);
        for (std::size_t i = 0; i < n; ++i) m[i] &= pm[i];
      }
      return m;
    }
    case Kind::Complement: {
      auto m = parts_.front().mask(points);
      for (auto& b : m) b = !b;
      return m;
    }
  }
  return {};
}

}  // namespace condpoint
