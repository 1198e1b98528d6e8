#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "condpoint/measure.hpp"
#include "condpoint/space.hpp"

namespace condpoint {

/// A finite cover of the space by disjoint events of positive probability.
/// Countable partitions are passed truncated; whatever mass the cells miss is
/// kept as a residual cell that must weigh less than `residual_limit`.
class Partition {
 public:
  /// Throws Error(InvalidPartition) when the cells overlap, miss mass, or
  /// carry zero probability.
  Partition(const ProbabilitySpace& space, std::vector<Event> cells,
            bool truncated = false, double residual_limit = 1e-10);

  /// Level sets {Y = v} of the values Y attains on atoms with positive weight.
  static Partition by_values(const ProbabilitySpace& space, const RandomVariable& y);

  const ProbabilitySpace& space() const { return *space_; }
  std::size_t size() const { return cells_.size(); }
  const std::vector<Event>& cells() const { return cells_; }
  const std::vector<double>& probabilities() const { return probabilities_; }
  double residual_mass() const { return residual_mass_; }
  /// Cell index of every canonical point; size() marks the residual.
  const std::vector<std::size_t>& cell_index() const { return cell_index_; }
  const PointSet& points() const { return points_; }

 private:
  const ProbabilitySpace* space_;
  std::vector<Event> cells_;
  std::vector<double> probabilities_;
  std::vector<std::size_t> cell_index_;
  double residual_mass_ = 0.0;
  PointSet points_;
};

/// E[X|F] for F generated by a partition: one value per cell.
struct PartitionCondExp {
  std::vector<std::string> labels;
  std::vector<double> values;
  std::vector<double> probabilities;
  std::vector<double> std_errors;
  std::vector<std::size_t> cell_index;
  double residual_mass = 0.0;

  /// The induced random variable w -> v_{i(w)} (0 on the residual cell).
  /// Not available on sampler spaces.
  RandomVariable as_variable(std::string name, const ProbabilitySpace& space) const;
  std::vector<double> pointwise() const;
};

PartitionCondExp partition_cond_exp(const ProbabilitySpace& space, const RandomVariable& x,
                                    const Partition& partition);

struct VerificationCheck {
  enum class Kind { Measurability, Integral };
  Kind kind;
  std::string label;
  double residual;  // spread of Z on a sigma-atom, or E[1_A Z] - E[1_A X]
  bool pass;
};

struct VerificationReport {
  std::vector<VerificationCheck> checks;
  std::size_t sigma_atoms = 0;
  bool exhaustive = false;  // every set of sigma(generators) was checked
  double tolerance = 0.0;

  bool measurable() const;
  bool integral_identity() const;
  bool pass() const { return measurable() && integral_identity(); }
  double max_residual() const;
};

struct VerifyOptions {
  double measurability_tol = 1e-10;
  double integral_tol = 1e-12;
};

/// Checks whether `candidate` is a version of E[X|sigma(generators)]: it
/// must be constant on every atom of the generated sigma-algebra, and
/// E[1_A X] = E[1_A Z] must hold for the empty set, Omega, the generators,
/// the sigma-atoms and finite unions. When the sigma-algebra has at most
/// 12 atoms every one of its sets is checked.
VerificationReport verify_cond_exp(const ProbabilitySpace& space, const RandomVariable& x,
                                   const RandomVariable& candidate,
                                   const std::vector<Event>& generators,
                                   const VerifyOptions& options = {});

struct TotalProbability {
  double value = 0.0;
  std::vector<double> conditionals;  // P(A|B_i)
  std::vector<double> weights;       // P(B_i)
};

TotalProbability total_probability(const ProbabilitySpace& space, const Event& a,
                                   const Partition& partition);

/// P(B_k|A). Throws Error(ZeroEvidence) when P(A) vanishes.
double bayes_discrete(const ProbabilitySpace& space, const Event& a,
                      const Partition& partition, std::size_t k);
/// Same formula from explicit priors P(B_i) and likelihoods P(A|B_i).
double bayes_discrete(const std::vector<double>& priors,
                      const std::vector<double>& likelihoods, std::size_t k);

}  // namespace condpoint
