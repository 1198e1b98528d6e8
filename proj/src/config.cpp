#include "condpoint/config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "condpoint/error.hpp"
#include "condpoint/json_out.hpp"

namespace condpoint {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& why) { throw Error(ErrorKind::Config, why); }

const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) fail(where + " needs '" + key + "'");
  return j.at(key);
}

std::string id_text(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  fail("atom ids must be strings or integers, got " + j.dump());
}

std::vector<std::string> string_list(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where + " must be a list");
  std::vector<std::string> out;
  for (const auto& e : j) out.push_back(id_text(e));
  return out;
}

std::vector<double> number_list(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where + " must be a list of numbers");
  std::vector<double> out;
  for (const auto& e : j) out.push_back(io::read_number(e));
  return out;
}

double tolerance_of(const json& s) {
  return s.contains("tolerance") ? io::read_number(s.at("tolerance")) : 1e-8;
}

/// Density values at nodes from a "family", a "density" list or a
/// "density_expr" over the coordinates (normalized when "normalize" is set).
ProbabilitySpace grid_space(const json& s, const std::vector<std::string>& coords,
                            const std::vector<Axis>& axes) {
  const double tol = tolerance_of(s);
  const bool two_d = axes.size() == 2;
  if (s.contains("family")) {
    const auto fam = Distribution::from_json(s.at("family"));
    return two_d ? ProbabilitySpace::grid2d({coords[0], coords[1]}, {axes[0], axes[1]}, fam, tol)
                 : ProbabilitySpace::grid1d(coords[0], axes[0], fam, tol);
  }
  std::vector<double> values;
  std::string source = "values";
  if (s.contains("density")) {
    values = number_list(s.at("density"), "grid density");
  } else if (s.contains("density_expr")) {
    const auto expr = Expr::parse(s.at("density_expr").get<std::string>());
    source = "density_expr " + expr.text();
    const std::size_t n0 = axes[0].n;
    const std::size_t n1 = two_d ? axes[1].n : 1;
    std::vector<double> c0(n0 * n1);
    std::vector<double> c1(n0 * n1);
    for (std::size_t i = 0; i < n0; ++i) {
      for (std::size_t j = 0; j < n1; ++j) {
        c0[i * n1 + j] = axes[0].node(i);
        if (two_d) c1[i * n1 + j] = axes[1].node(j);
      }
    }
    values = expr.evaluate(
        [&](std::string_view id) -> std::span<const double> {
          if (id == coords[0]) return c0;
          if (two_d && id == coords[1]) return c1;
          fail("density_expr refers to unknown coordinate '" + std::string(id) + "'");
        },
        n0 * n1);
    if (s.value("normalize", false)) {
      double raw = 0.0;
      for (std::size_t i = 0; i < n0; ++i) {
        for (std::size_t j = 0; j < n1; ++j) {
          raw += axes[0].weight(i) * (two_d ? axes[1].weight(j) : 1.0) * values[i * n1 + j];
        }
      }
      if (!(raw > 0.0) || !std::isfinite(raw)) fail("density_expr has no finite positive mass");
      for (auto& v : values) v /= raw;
    }
  } else {
    fail("grid space needs 'family', 'density' or 'density_expr'");
  }
  return two_d ? ProbabilitySpace::grid2d({coords[0], coords[1]}, {axes[0], axes[1]},
                                          std::move(values), tol, source)
               : ProbabilitySpace::grid1d(coords[0], axes[0], std::move(values), tol, source);
}

std::vector<std::string> coordinate_names(const json& s, std::size_t expected) {
  if (s.contains("coord") && expected == 1) return {s.at("coord").get<std::string>()};
  auto names = string_list(require(s, "coords", "space"), "space coords");
  if (expected && names.size() != expected) {
    fail("space needs " + std::to_string(expected) + " coordinate names");
  }
  return names;
}

std::pair<ProbabilitySpace, bool> parse_space(const json& s) {
  const std::string kind = require(s, "kind", "space").get<std::string>();
  if (kind == "atoms") {
    const auto coords = coordinate_names(s, 0);
    const json& atoms = require(s, "atoms", "atoms space");
    if (!atoms.is_array() || atoms.empty()) fail("atoms space needs a non-empty 'atoms' list");
    std::vector<std::string> ids;
    std::vector<double> weights;
    std::vector<std::vector<double>> at(coords.size());
    for (const auto& a : atoms) {
      ids.push_back(id_text(require(a, "id", "atom")));
      weights.push_back(parse_weight(require(a, "weight", "atom")));
      json pos = a.contains("at") ? a.at("at") : json::array();
      if (!pos.is_array()) pos = json::array({pos});
      if (pos.size() != coords.size()) {
        fail("atom '" + ids.back() + "' needs " + std::to_string(coords.size()) + " coordinates");
      }
      for (std::size_t c = 0; c < coords.size(); ++c) at[c].push_back(io::read_number(pos[c]));
    }
    return {ProbabilitySpace::discrete(coords, std::move(ids), std::move(weights), std::move(at)),
            false};
  }
  if (kind == "grid1d") {
    const auto coords = coordinate_names(s, 1);
    return {grid_space(s, coords, {parse_axis(require(s, "axis", "grid1d space"))}), false};
  }
  if (kind == "grid2d") {
    const auto coords = coordinate_names(s, 2);
    const json& axes = require(s, "axes", "grid2d space");
    if (!axes.is_array() || axes.size() != 2) fail("grid2d space needs two axes");
    return {grid_space(s, coords, {parse_axis(axes[0]), parse_axis(axes[1])}), false};
  }
  if (kind == "sampler") {
    const auto fam = Distribution::from_json(require(s, "family", "sampler space"));
    const auto coords = coordinate_names(s, fam.dimension());
    const json& n = require(s, "samples", "sampler space");
    if (!n.is_number_integer() || n.get<long long>() <= 0) fail("sampler 'samples' must be a positive integer");
    const bool seeded = s.contains("seed");
    const std::uint64_t seed = seeded ? s.at("seed").get<std::uint64_t>() : 0;
    return {ProbabilitySpace::sampler(coords, fam, seed, n.get<std::size_t>()), seeded};
  }
  fail("unknown space kind '" + kind + "'");
}

}  // namespace

double parse_weight(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    const auto slash = s.find('/');
    try {
      if (slash == std::string::npos) return std::stod(s);
      const double p = std::stod(s.substr(0, slash));
      const double q = std::stod(s.substr(slash + 1));
      if (q == 0.0) fail("weight '" + s + "' divides by zero");
      return p / q;
    } catch (const std::logic_error&) {
      fail("bad weight '" + s + "'");
    }
  }
  fail("weights must be numbers or \"p/q\" strings");
}

Axis parse_axis(const json& j) {
  if (j.is_string()) return Axis::parse(j.get<std::string>());
  Axis a;
  a.lo = io::read_number(require(j, "lo", "axis"));
  a.hi = io::read_number(require(j, "hi", "axis"));
  const json& n = require(j, "n", "axis");
  if (!n.is_number_integer() || n.get<long long>() < 2) fail("axis 'n' must be an integer >= 2");
  a.n = n.get<std::size_t>();
  a.validate();
  return a;
}

Schedule parse_schedule(const json& j) {
  Schedule s;
  if (!j.is_object()) fail("schedule must be an object");
  if (j.contains("eps")) s.explicit_eps = number_list(j.at("eps"), "schedule eps");
  if (j.contains("eps0")) s.eps0 = io::read_number(j.at("eps0"));
  if (j.contains("ratio")) s.ratio = io::read_number(j.at("ratio"));
  if (j.contains("depth")) {
    if (!j.at("depth").is_number_integer() || j.at("depth").get<long long>() <= 0) {
      fail("schedule depth must be a positive integer");
    }
    s.depth = j.at("depth").get<std::size_t>();
  }
  s.values(1.0);
  return s;
}

void Model::set_seed(std::uint64_t seed) {
  if (space_.kind() == SpaceKind::Sampler) space_ = space_.with_seed(seed);
  has_seed_ = true;
}

Expr Model::expand(const Expr& e) const {
  for (const auto& id : e.identifiers()) {
    for (const auto& v : variables_) {
      if (v.name() == id && !v.expr() && !space_.coordinate_index(id)) {
        fail("table variable '" + id + "' cannot appear inside an expression");
      }
    }
  }
  return e.substitute([&](std::string_view id) -> const Expr* {
    if (space_.coordinate_index(id)) return nullptr;
    for (const auto& v : variables_) {
      if (v.name() == id) return v.expr();
    }
    return nullptr;
  });
}

RandomVariable Model::variable(std::string_view name_or_expr) const {
  for (const auto& v : variables_) {
    if (v.name() == name_or_expr) return v;
  }
  const auto e = expand(Expr::parse(name_or_expr));
  return RandomVariable::expression(std::string(name_or_expr), e);
}

Event Model::event(std::string_view name_or_expr) const {
  for (const auto& [name, e] : events_) {
    if (name == name_or_expr) return e;
  }
  if (name_or_expr == "Omega") return Event::all();
  if (name_or_expr == "empty") return Event::none();
  return Event::predicate(expand(Expr::parse(name_or_expr))).labeled(std::string(name_or_expr));
}

std::vector<std::string> Model::partition_names() const {
  std::vector<std::string> out;
  for (const auto& p : partitions_) out.push_back(p.name);
  return out;
}

std::vector<Event> Model::partition_cells(std::string_view name) const {
  for (const auto& p : partitions_) {
    if (p.name != name) continue;
    std::vector<Event> cells;
    for (const auto& c : p.cells) cells.push_back(event(c));
    return cells;
  }
  fail("unknown partition '" + std::string(name) + "'");
}

Partition Model::partition(std::string_view name) const {
  for (const auto& p : partitions_) {
    if (p.name == name) return Partition(space_, partition_cells(name), p.truncated);
  }
  fail("unknown partition '" + std::string(name) + "'");
}

void Model::add_variable(RandomVariable v) {
  for (const auto& old : variables_) {
    if (old.name() == v.name()) fail("variable '" + v.name() + "' declared twice");
  }
  variables_.push_back(std::move(v));
}

void Model::add_event(std::string name, Event e) {
  for (const auto& old : events_) {
    if (old.first == name) fail("event '" + name + "' declared twice");
  }
  events_.emplace_back(std::move(name), std::move(e));
}

void Model::add_partition(std::string name, std::vector<std::string> cells, bool truncated) {
  partitions_.push_back({std::move(name), std::move(cells), truncated});
}

Model parse_model(const json& j) {
  if (!j.is_object()) fail("config must be a JSON object");
  if (!j.contains("schema_version") || j.at("schema_version") != io::kSchemaVersion) {
    fail("config needs \"schema_version\": " + std::to_string(io::kSchemaVersion));
  }
  auto [space, seeded] = parse_space(require(j, "space", "config"));
  Model model(j.value("name", std::string("model")), std::move(space));
  model.mark_seeded(seeded);

  if (j.contains("variables")) {
    const json& vars = j.at("variables");
    if (!vars.is_object()) fail("'variables' must map names to definitions");
    for (auto it = vars.begin(); it != vars.end(); ++it) {
      const std::string& name = it.key();
      const json& def = it.value();
      if (def.is_string()) {
        const auto base = model.variable(def.get<std::string>());
        model.add_variable(base.expr() ? RandomVariable::expression(name, *base.expr())
                                       : RandomVariable::table(name, *base.values()));
      } else if (def.is_object() && def.contains("expr")) {
        const auto base = model.variable(def.at("expr").get<std::string>());
        if (!base.expr()) fail("variable '" + name + "' must be an expression");
        std::optional<int> sweep;
        if (def.contains("sweep")) {
          const auto& sw = def.at("sweep");
          if (sw.is_string()) {
            const auto idx = model.space().coordinate_index(sw.get<std::string>());
            if (!idx) fail("sweep of '" + name + "' names an unknown coordinate");
            sweep = static_cast<int>(*idx);
          } else {
            sweep = sw.get<int>();
          }
        }
        model.add_variable(RandomVariable::expression(name, *base.expr(), sweep));
      } else if (def.is_object() && def.contains("table")) {
        const json& t = def.at("table");
        if (t.is_array()) {
          model.add_variable(RandomVariable::table(name, number_list(t, "table of " + name)));
        } else if (t.is_object()) {
          const auto* atoms = model.space().atoms();
          if (!atoms) fail("a table keyed by atom id needs an atoms space");
          std::vector<double> values(atoms->ids.size(), std::numeric_limits<double>::quiet_NaN());
          for (std::size_t i = 0; i < atoms->ids.size(); ++i) {
            if (!t.contains(atoms->ids[i])) fail("table of '" + name + "' misses atom '" + atoms->ids[i] + "'");
            values[i] = io::read_number(t.at(atoms->ids[i]));
          }
          model.add_variable(RandomVariable::table(name, std::move(values)));
        } else {
          fail("table of '" + name + "' must be a list or an object");
        }
      } else {
        fail("variable '" + name + "' must be an expression string, {expr}, or {table}");
      }
    }
  }

  if (j.contains("events")) {
    const json& evs = j.at("events");
    if (!evs.is_object()) fail("'events' must map names to definitions");
    for (auto it = evs.begin(); it != evs.end(); ++it) {
      const std::string& name = it.key();
      const json& def = it.value();
      Event e = Event::all();
      if (def.is_string()) {
        e = model.event(def.get<std::string>());
      } else if (!def.is_object()) {
        fail("event '" + name + "' must be a string or an object");
      } else if (def.contains("atoms")) {
        e = Event::atoms(string_list(def.at("atoms"), "atoms of event " + name));
      } else if (def.contains("where")) {
        e = model.event(def.at("where").get<std::string>());
      } else if (def.contains("var") && def.contains("equals")) {
        e = Event::level(model.variable(def.at("var").get<std::string>()), io::read_number(def.at("equals")));
      } else if (def.contains("var") && def.contains("interval")) {
        const auto iv = number_list(def.at("interval"), "interval of event " + name);
        if (iv.size() != 2 || !(iv[0] <= iv[1])) fail("event '" + name + "' needs interval [lo, hi]");
        bool lc = false;
        bool hc = false;
        if (def.contains("closed")) {
          const json& c = def.at("closed");
          if (!c.is_array() || c.size() != 2) fail("'closed' must be [bool, bool]");
          lc = c[0].get<bool>();
          hc = c[1].get<bool>();
        }
        e = Event::interval(model.variable(def.at("var").get<std::string>()), iv[0], iv[1], lc, hc);
      } else if (def.contains("not")) {
        e = Event::complement(model.event(def.at("not").get<std::string>()));
      } else if (def.contains("all_of")) {
        std::vector<Event> parts;
        for (const auto& p : string_list(def.at("all_of"), "all_of of event " + name)) parts.push_back(model.event(p));
        e = Event::intersection(std::move(parts));
      } else {
        fail("event '" + name + "' has no recognised form");
      }
      model.add_event(name, e.labeled(name));
    }
  }

  if (j.contains("partitions")) {
    const json& parts = j.at("partitions");
    if (!parts.is_object()) fail("'partitions' must map names to cell lists");
    for (auto it = parts.begin(); it != parts.end(); ++it) {
      const json& def = it.value();
      if (def.is_array()) {
        model.add_partition(it.key(), string_list(def, "partition " + it.key()), false);
      } else {
        model.add_partition(it.key(), string_list(require(def, "cells", "partition " + it.key()), "cells"),
                            def.value("truncated", false));
      }
      for (const auto& c : model.partition_cells(it.key())) (void)c;
    }
  }
  return model;
}

nlohmann::json parse_json_file(const std::filesystem::path& path) {
  const std::string text = io::read_text(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(path.string() + ": " + e.what());
  }
}

Model load_model(const std::filesystem::path& path) {
  try {
    return parse_model(parse_json_file(path));
  } catch (const nlohmann::json::exception& e) {
    fail(path.string() + ": " + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) fail(path.string() + ": " + e.what());
    throw;
  }
}

}  // namespace condpoint
