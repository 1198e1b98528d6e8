#include "condpoint/partition.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>

#include "condpoint/error.hpp"

namespace condpoint {
namespace {

double zero_tolerance(SpaceKind kind) {
  return kind == SpaceKind::DiscreteAtoms ? 0.0 : kProbabilityFloor;
}

std::string format_value(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

Partition::Partition(const ProbabilitySpace& space, std::vector<Event> cells, bool truncated,
                     double residual_limit)
    : space_(&space), cells_(std::move(cells)), points_(space.points()) {
  if (cells_.empty()) throw Error(ErrorKind::InvalidPartition, "a partition needs at least one cell");
  const std::size_t n = points_.size;
  const std::size_t none = cells_.size();
  cell_index_.assign(n, none);
  probabilities_.assign(cells_.size(), 0.0);
  const double zero = zero_tolerance(space.kind());
  std::map<std::pair<std::size_t, std::size_t>, double> overlap;
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    const auto m = cells_[c].mask(points_);
    for (std::size_t p = 0; p < n; ++p) {
      if (!m[p]) continue;
      const double w = points_.weight[p];
      probabilities_[c] += w;
      if (cell_index_[p] == none) {
        cell_index_[p] = c;
      } else if (w > 0.0) {
        overlap[{cell_index_[p], c}] += w;
      }
    }
  }
  for (const auto& [pair, mass] : overlap) {
    if (mass > zero) {
      throw Error(ErrorKind::InvalidPartition,
                  "cells '" + cells_[pair.first].label() + "' and '" + cells_[pair.second].label() +
                      "' overlap with probability " + format_value(mass));
    }
  }
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    if (!(probabilities_[c] > zero)) {
      throw Error(ErrorKind::InvalidPartition,
                  "cell '" + cells_[c].label() + "' has probability " + format_value(probabilities_[c]));
    }
  }
  double uncovered = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    if (cell_index_[p] == none) uncovered += points_.weight[p];
  }
  if (truncated) {
    if (!(uncovered < residual_limit)) {
      throw Error(ErrorKind::InvalidPartition,
                  "residual cell of the truncated partition has probability " + format_value(uncovered));
    }
    residual_mass_ = uncovered;
  } else if (uncovered > 1e-12) {
    throw Error(ErrorKind::InvalidPartition,
                "cells miss probability " + format_value(uncovered) + " of the space");
  }
}

Partition Partition::by_values(const ProbabilitySpace& space, const RandomVariable& y) {
  const auto* atoms = space.atoms();
  if (!atoms) {
    throw Error(ErrorKind::InvalidPartition,
                "level sets of " + y.name() + " partition only discrete spaces");
  }
  const auto vals = y.evaluate(space.points());
  std::vector<double> levels;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (atoms->weights[i] > 0.0) levels.push_back(vals[i]);
  }
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  std::vector<Event> cells;
  for (double v : levels) cells.push_back(Event::level(y, v));
  return Partition(space, std::move(cells), true, 1e-300);
}

std::vector<double> PartitionCondExp::pointwise() const {
  std::vector<double> out(cell_index.size());
  for (std::size_t p = 0; p < out.size(); ++p) {
    out[p] = cell_index[p] < values.size() ? values[cell_index[p]] : 0.0;
  }
  return out;
}

RandomVariable PartitionCondExp::as_variable(std::string name,
                                             const ProbabilitySpace& space) const {
  if (space.kind() == SpaceKind::Sampler) {
    throw Error(ErrorKind::Task, "E[X|F] of a sampler partition has no point table");
  }
  return RandomVariable::table(std::move(name), pointwise());
}

PartitionCondExp partition_cond_exp(const ProbabilitySpace& space, const RandomVariable& x,
                                    const Partition& partition) {
  if (&space != &partition.space()) {
    throw Error(ErrorKind::InvalidPartition, "partition belongs to a different space");
  }
  const PointSet& ps = partition.points();
  const auto vals = x.evaluate(ps);
  PartitionCondExp out;
  out.cell_index = partition.cell_index();
  out.residual_mass = partition.residual_mass();
  const std::size_t k = partition.size();
  std::vector<Moments> m(k);
  for (std::size_t p = 0; p < ps.size; ++p) {
    const std::size_t c = out.cell_index[p];
    const double w = ps.weight[p];
    if (c >= k || w == 0.0) continue;
    m[c].mass += w;
    m[c].moment += w * vals[p];
    m[c].second += w * vals[p] * vals[p];
    ++m[c].count;
  }
  for (std::size_t c = 0; c < k; ++c) {
    const auto ce = conditional_from(m[c], space.kind());
    if (!std::isfinite(ce.value)) {
      throw Error(ErrorKind::NonIntegrable,
                  x.name() + " is not integrable on cell '" + partition.cells()[c].label() + "'");
    }
    out.labels.push_back(partition.cells()[c].label());
    out.values.push_back(ce.value);
    out.probabilities.push_back(partition.probabilities()[c]);
    out.std_errors.push_back(ce.std_error);
  }
  return out;
}

bool VerificationReport::measurable() const {
  return std::all_of(checks.begin(), checks.end(), [](const VerificationCheck& c) {
    return c.kind != VerificationCheck::Kind::Measurability || c.pass;
  });
}

bool VerificationReport::integral_identity() const {
  return std::all_of(checks.begin(), checks.end(), [](const VerificationCheck& c) {
    return c.kind != VerificationCheck::Kind::Integral || c.pass;
  });
}

double VerificationReport::max_residual() const {
  double out = 0.0;
  for (const auto& c : checks) {
    if (c.kind == VerificationCheck::Kind::Integral) out = std::max(out, std::fabs(c.residual));
  }
  return out;
}

VerificationReport verify_cond_exp(const ProbabilitySpace& space, const RandomVariable& x,
                                   const RandomVariable& candidate,
                                   const std::vector<Event>& generators,
                                   const VerifyOptions& options) {
  const PointSet ps = space.points();
  const auto xv = x.evaluate(ps);
  const auto zv = candidate.evaluate(ps);
  const std::size_t k = generators.size();
  std::vector<std::vector<std::uint8_t>> masks;
  masks.reserve(k);
  for (const auto& g : generators) masks.push_back(g.mask(ps));

  // Sigma-atoms: points sharing a membership signature across generators.
  std::map<std::vector<std::uint8_t>, std::size_t> by_signature;
  std::vector<std::vector<std::uint8_t>> signatures;
  std::vector<double> zmin;
  std::vector<double> zmax;
  std::vector<double> residual;
  std::vector<double> sig(k);
  std::vector<std::uint8_t> key(k);
  for (std::size_t p = 0; p < ps.size; ++p) {
    for (std::size_t g = 0; g < k; ++g) key[g] = masks[g][p];
    auto [it, inserted] = by_signature.try_emplace(key, signatures.size());
    if (inserted) {
      signatures.push_back(key);
      zmin.push_back(std::numeric_limits<double>::infinity());
      zmax.push_back(-std::numeric_limits<double>::infinity());
      residual.push_back(0.0);
    }
    const std::size_t a = it->second;
    if (std::isnan(zv[p])) {
      zmin[a] = zmax[a] = std::numeric_limits<double>::quiet_NaN();
    } else if (!std::isnan(zmin[a])) {
      zmin[a] = std::min(zmin[a], zv[p]);
      zmax[a] = std::max(zmax[a], zv[p]);
    }
    const double w = ps.weight[p];
    if (w != 0.0) residual[a] += w * (zv[p] - xv[p]);
  }
  const std::size_t m = signatures.size();

  auto atom_label = [&](std::size_t a) {
    if (k == 0) return std::string("Omega");
    std::string out;
    for (std::size_t g = 0; g < k; ++g) {
      if (!out.empty()) out += " & ";
      if (!signatures[a][g]) out += "!";
      out += "(" + generators[g].label() + ")";
    }
    return out;
  };

  VerificationReport report;
  report.sigma_atoms = m;
  report.tolerance = options.integral_tol;
  for (std::size_t a = 0; a < m; ++a) {
    const double spread = zmax[a] - zmin[a];
    report.checks.push_back({VerificationCheck::Kind::Measurability, atom_label(a), spread,
                             spread <= options.measurability_tol});
  }
  auto add_integral = [&](std::string label, const std::vector<bool>& in) {
    double r = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
      if (in[a]) r += residual[a];
    }
    report.checks.push_back({VerificationCheck::Kind::Integral, std::move(label), r,
                             std::fabs(r) <= options.integral_tol});
  };

  if (m <= 12) {
    report.exhaustive = true;
    for (std::size_t s = 0; s < (std::size_t{1} << m); ++s) {
      std::vector<bool> in(m);
      std::string label;
      for (std::size_t a = 0; a < m; ++a) {
        in[a] = (s >> a) & 1U;
        if (!in[a]) continue;
        if (!label.empty()) label += " | ";
        label += m > 1 ? "[" + atom_label(a) + "]" : atom_label(a);
      }
      if (s == 0) label = "empty";
      if (s + 1 == (std::size_t{1} << m)) label = "Omega";
      add_integral(std::move(label), in);
    }
    for (std::size_t g = 0; g < k; ++g) {
      std::vector<bool> in(m);
      for (std::size_t a = 0; a < m; ++a) in[a] = signatures[a][g] != 0;
      add_integral(generators[g].label(), in);
    }
    return report;
  }

  add_integral("empty", std::vector<bool>(m, false));
  add_integral("Omega", std::vector<bool>(m, true));
  for (std::size_t a = 0; a < m; ++a) {
    std::vector<bool> in(m, false);
    in[a] = true;
    add_integral(atom_label(a), in);
  }
  const std::size_t max_union = k <= 10 ? (std::size_t{1} << k) : 0;
  for (std::size_t s = 1; s < max_union; ++s) {
    std::vector<bool> in(m, false);
    std::string label;
    for (std::size_t g = 0; g < k; ++g) {
      if (!((s >> g) & 1U)) continue;
      if (!label.empty()) label += " | ";
      label += "(" + generators[g].label() + ")";
      for (std::size_t a = 0; a < m; ++a) in[a] = in[a] || signatures[a][g] != 0;
    }
    add_integral(std::move(label), in);
  }
  if (max_union == 0) {
    for (std::size_t g = 0; g < k; ++g) {
      std::vector<bool> in(m);
      for (std::size_t a = 0; a < m; ++a) in[a] = signatures[a][g] != 0;
      add_integral(generators[g].label(), in);
    }
  }
  return report;
}

TotalProbability total_probability(const ProbabilitySpace& space, const Event& a,
                                   const Partition& partition) {
  if (&space != &partition.space()) {
    throw Error(ErrorKind::InvalidPartition, "partition belongs to a different space");
  }
  const PointSet& ps = partition.points();
  const auto mask = a.mask(ps);
  const std::size_t k = partition.size();
  std::vector<double> joint(k + 1, 0.0);
  for (std::size_t p = 0; p < ps.size; ++p) {
    if (mask[p]) joint[partition.cell_index()[p]] += ps.weight[p];
  }
  TotalProbability out;
  for (std::size_t c = 0; c < k; ++c) {
    const double pb = partition.probabilities()[c];
    out.conditionals.push_back(joint[c] / pb);
    out.weights.push_back(pb);
    out.value += out.conditionals.back() * pb;
  }
  out.value += joint[k];
  return out;
}

double bayes_discrete(const std::vector<double>& priors, const std::vector<double>& likelihoods,
                      std::size_t k) {
  if (priors.size() != likelihoods.size() || k >= priors.size()) {
    throw Error(ErrorKind::InvalidPartition, "priors, likelihoods and cell index do not match");
  }
  double evidence = 0.0;
  for (std::size_t i = 0; i < priors.size(); ++i) evidence += likelihoods[i] * priors[i];
  if (!(evidence > 0.0)) throw Error(ErrorKind::ZeroEvidence, "P(A) = 0: the posterior is undefined");
  return likelihoods[k] * priors[k] / evidence;
}

double bayes_discrete(const ProbabilitySpace& space, const Event& a, const Partition& partition,
                      std::size_t k) {
  const auto tp = total_probability(space, a, partition);
  if (k >= partition.size()) throw Error(ErrorKind::InvalidPartition, "cell index out of range");
  if (!(tp.value > zero_tolerance(space.kind()))) {
    throw Error(ErrorKind::ZeroEvidence, "P(" + a.label() + ") = 0: the posterior is undefined");
  }
  return tp.conditionals[k] * tp.weights[k] / tp.value;
}

}  // namespace condpoint
