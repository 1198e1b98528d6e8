#include "condpoint/serialize.hpp"

#include <algorithm>
#include <cmath>

namespace condpoint::io {
namespace {

Json optional_number(const std::optional<double>& v) { return v ? number(*v) : Json(nullptr); }

std::string csv_text(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '"') c = ';';
  }
  return s;
}

}  // namespace

Json to_json(const WindowTrace& t) {
  Json j = Json::object();
  j["x"] = t.x_name;
  j["y_var"] = t.y_name;
  j["space"] = std::string(to_string(t.space_kind));
  j["y"] = number(t.y);
  j["family"] = std::string(to_string(t.family));
  j["boundary"] = t.boundary;
  j["value"] = number(t.value);
  j["extrapolated"] = optional_number(t.extrapolated);
  j["local_order"] = optional_number(t.local_order);
  j["verdict"] = std::string(to_string(t.verdict));
  j["bound"] = std::string(to_string(t.bound));
  j["tolerance"] = number(t.tolerance);
  j["last_difference"] = number(t.last_difference);
  j["resolution_floor"] = number(t.resolution_floor);
  j["note"] = t.note;
  j["eps"] = numbers(t.eps);
  j["estimates"] = numbers(t.estimates);
  j["probabilities"] = numbers(t.probabilities);
  if (!t.std_errors.empty()) {
    j["std_errors"] = numbers(t.std_errors);
    j["counts"] = t.counts;
  }
  return j;
}

Json to_json(const PointwiseCondExp& phi) {
  Json j = document("condpoint.pointwise");
  j["x"] = phi.x_name;
  j["y_var"] = phi.y_name;
  Json table = Json::object();
  table["y"] = numbers(phi.y);
  std::vector<double> values;
  Json verdicts = Json::array();
  for (std::size_t i = 0; i < phi.y.size(); ++i) {
    values.push_back(phi.value(i));
    verdicts.push_back(phi.traces[i] ? std::string(to_string(phi.traces[i]->verdict)) : std::string("Error"));
  }
  table["value"] = numbers(values);
  table["verdict"] = verdicts;
  table["order"] = numbers(phi.orders);
  table["flag"] = phi.flags;
  j["table"] = table;
  Json traces = Json::array();
  for (const auto& t : phi.traces) traces.push_back(t ? to_json(*t) : Json(nullptr));
  j["traces"] = traces;
  return j;
}

std::string to_csv(const PointwiseCondExp& phi) {
  Csv csv({"y", "value", "verdict", "extrapolated", "order", "last_eps", "flag"});
  for (std::size_t i = 0; i < phi.y.size(); ++i) {
    const auto& t = phi.traces[i];
    csv.row({csv_number(phi.y[i]), csv_number(phi.value(i)),
             t ? std::string(to_string(t->verdict)) : "Error",
             csv_number(t && t->extrapolated ? *t->extrapolated : NAN), csv_number(phi.orders[i]),
             csv_number(t && !t->eps.empty() ? t->eps.back() : NAN),
             csv_text(phi.flags[i].substr(0, phi.flags[i].find(':')))});
  }
  return csv.str();
}

Json to_json(const FactorizationResult& r) {
  Json j = document("condpoint.factorization");
  j["g"] = r.g_name;
  j["y_var"] = r.y_name;
  j["verdict"] = std::string(to_string(r.verdict));
  j["band"] = number(r.band);
  j["witness_tol"] = number(r.witness_tol);
  Json levels = Json::array();
  for (const auto& ls : r.levels) {
    Json l = Json::object();
    l["y"] = number(ls.y);
    l["size"] = ls.size;
    l["empty"] = ls.empty;
    l["phi"] = number(ls.phi);
    l["witnesses"] = numbers(ls.witnesses);
    if (!ls.members.empty()) l["members"] = ls.members;
    if (!ls.conflicting_groups.empty()) l["conflicting_groups"] = numbers(ls.conflicting_groups);
    levels.push_back(l);
  }
  j["levels"] = levels;
  std::vector<double> offending;
  for (auto i : r.offending()) offending.push_back(r.levels[i].y);
  j["offending_levels"] = numbers(offending);
  return j;
}

Json to_json(const VerificationReport& r) {
  Json j = Json::object();
  j["pass"] = r.pass();
  j["measurable"] = r.measurable();
  j["integral_identity"] = r.integral_identity();
  j["sigma_atoms"] = r.sigma_atoms;
  j["exhaustive"] = r.exhaustive;
  j["tolerance"] = number(r.tolerance);
  j["max_residual"] = number(r.max_residual());
  Json checks = Json::array();
  for (const auto& c : r.checks) {
    Json e = Json::object();
    e["kind"] = c.kind == VerificationCheck::Kind::Measurability ? "measurability" : "integral";
    e["set"] = c.label;
    e["residual"] = number(c.residual);
    e["pass"] = c.pass;
    checks.push_back(e);
  }
  j["checks"] = checks;
  return j;
}

Json to_json(const PartitionCondExp& p) {
  Json j = Json::object();
  j["cells"] = p.labels;
  j["values"] = numbers(p.values);
  j["probabilities"] = numbers(p.probabilities);
  if (std::any_of(p.std_errors.begin(), p.std_errors.end(), [](double s) { return s != 0.0; })) {
    j["std_errors"] = numbers(p.std_errors);
  }
  j["residual_mass"] = number(p.residual_mass);
  return j;
}

Json to_json(const TooCoarseDemo& d) {
  Json j = Json::object();
  j["event"] = d.event;
  j["expectation"] = number(d.expectation);
  j["alternative"] = number(d.alternative);
  j["differing_points"] = d.differing_points;
  j["mean_everywhere"] = to_json(d.mean_report);
  j["alternative_on_event"] = to_json(d.alternative_report);
  return j;
}

Json to_json(const TooFineDemo& d) {
  Json j = Json::object();
  j["event"] = d.event;
  j["points"] = d.points;
  j["band"] = number(d.band);
  j["witnesses"] = numbers(d.witnesses);
  return j;
}

Json to_json(const ParadoxReport& r) {
  Json j = Json::object();
  j["null_event"] = r.null_event;
  j["statistic"] = r.statistic;
  j["discrepancy"] = number(r.discrepancy);
  j["combined_tolerance"] = number(r.combined_tolerance);
  j["all_converged"] = r.all_converged;
  Json fams = Json::array();
  for (const auto& f : r.families) {
    Json e = Json::object();
    e["name"] = f.name;
    e["variable"] = f.variable;
    e["value"] = number(f.trace.value);
    e["abs_mean"] = number(f.abs_mean);
    e["error"] = number(f.error);
    e["trace"] = to_json(f.trace);
    fams.push_back(e);
  }
  j["families"] = fams;
  return j;
}

Json to_json(const ParadoxOutcome& o) {
  Json j = document("condpoint.paradox");
  j["instance"] = o.instance;
  j["pass"] = o.pass();
  j["main"] = to_json(o.main);
  j["control"] = to_json(o.control);
  return j;
}

std::string paradox_csv(const ParadoxOutcome& o) {
  std::vector<std::string> header{"z"};
  for (const auto& f : o.main.families) header.push_back(csv_text(f.name));
  Csv csv(header);
  if (o.main.families.empty() || o.main.families.front().z.empty()) return csv.str();
  const auto& z = o.main.families.front().z;
  for (std::size_t i = 0; i < z.size(); ++i) {
    std::vector<std::string> row{csv_number(z[i])};
    for (const auto& f : o.main.families) row.push_back(csv_number(i < f.density.size() ? f.density[i] : NAN));
    csv.row(row);
  }
  return csv.str();
}

Json to_json(const DensityTable& d) {
  Json j = document("condpoint.density");
  j["z"] = d.z_name;
  j["y_var"] = d.y_name;
  j["g"] = d.g;
  Json table = Json::object();
  table["y"] = numbers(d.y);
  table["value"] = numbers(d.value);
  table["marginal"] = numbers(d.marginal);
  table["defect"] = numbers(d.defect);
  table["flag"] = d.flags;
  j["table"] = table;
  return j;
}

std::string density_csv(const DensityTable& d) {
  Csv csv({"y", "z", "density"});
  for (const auto& cd : d.densities) {
    for (std::size_t i = 0; i < cd.z_axis.n; ++i) {
      csv.row({csv_number(cd.y), csv_number(cd.z_axis.node(i)), csv_number(cd.values[i])});
    }
  }
  return csv.str();
}

}  // namespace condpoint::io
