#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "condpoint/distribution.hpp"
#include "condpoint/expr.hpp"

namespace condpoint {

/// Uniform axis of `n` nodes from `lo` to `hi` inclusive.
struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t n = 2;

  double pitch() const { return (hi - lo) / static_cast<double>(n - 1); }
  double node(std::size_t i) const;
  /// Composite trapezoid weight of node i.
  double weight(std::size_t i) const;
  std::vector<double> nodes() const;
  bool contains(double x) const { return x >= lo && x <= hi; }

  /// Parses "a:b:n". Throws Error(Config).
  static Axis parse(std::string_view text);
  void validate() const;
};

/// Probabilities below this are the zero-probability branch on grid and
/// sampler spaces.
inline constexpr double kProbabilityFloor = 1e-12;

struct GridMetadata {
  double tolerance = 1e-8;     // declared quadrature tolerance
  double raw_integral = 1.0;   // trapezoid integral before normalization
  std::string source;          // family description, "values" or provenance
  std::vector<double> bounds;  // truncation rectangle lo0, hi0[, lo1, hi1]
};

enum class SpaceKind { DiscreteAtoms, DensityGrid1D, DensityGrid2D, Sampler };

std::string_view to_string(SpaceKind kind);

struct PointSet;

/// The probability space (Omega, A, P) in one of four desk-scale forms.
/// Immutable after construction; constructors validate the invariants.
class ProbabilitySpace {
 public:
  struct Atoms {
    std::vector<std::string> ids;
    std::vector<double> weights;
    std::vector<std::vector<double>> coords;  // coords[c][atom]
  };
  struct Grid1D {
    Axis axis;
    std::vector<double> density;
    GridMetadata meta;
  };
  /// density[i0 * axes[1].n + i1]
  struct Grid2D {
    std::array<Axis, 2> axes;
    std::vector<double> density;
    GridMetadata meta;
  };
  struct Sampler {
    Distribution family;
    std::uint64_t seed = 0;
    std::size_t budget = 0;
  };

  /// Weights must be >= 0 and sum to 1 within 1e-12; zero-weight atoms model
  /// null events.
  static ProbabilitySpace discrete(std::vector<std::string> coord_names,
                                   std::vector<std::string> ids,
                                   std::vector<double> weights,
                                   std::vector<std::vector<double>> coords);
  static ProbabilitySpace grid1d(std::string coord, Axis axis,
                                 std::vector<double> density, double tolerance,
                                 std::string source = "values");
  static ProbabilitySpace grid1d(std::string coord, Axis axis,
                                 const Distribution& family, double tolerance);
  static ProbabilitySpace grid2d(std::array<std::string, 2> coords,
                                 std::array<Axis, 2> axes,
                                 std::vector<double> density, double tolerance,
                                 std::string source = "values");
  static ProbabilitySpace grid2d(std::array<std::string, 2> coords,
                                 std::array<Axis, 2> axes,
                                 const Distribution& family, double tolerance);
  static ProbabilitySpace sampler(std::vector<std::string> coord_names,
                                  Distribution family, std::uint64_t seed,
                                  std::size_t budget);

  SpaceKind kind() const;
  const std::vector<std::string>& coordinates() const { return coord_names_; }
  std::optional<std::size_t> coordinate_index(std::string_view name) const;
  /// Points in canonical order: atoms, grid nodes row-major, sample rows.
  std::size_t point_count() const;
  bool is_grid() const;

  const Atoms* atoms() const { return std::get_if<Atoms>(&data_); }
  const Grid1D* grid1d() const { return std::get_if<Grid1D>(&data_); }
  const Grid2D* grid2d() const { return std::get_if<Grid2D>(&data_); }
  const Sampler* sampler() const { return std::get_if<Sampler>(&data_); }
  const GridMetadata* grid_metadata() const;

  ProbabilitySpace with_seed(std::uint64_t seed) const;

  /// Materializes the points. Grid nodes are laid out in lines along
  /// `sweep_axis` (-1 picks the last axis). Samplers draw `budget` rows from
  /// sub-stream `stream` of their seed.
  PointSet points(int sweep_axis = -1, std::uint64_t stream = 0) const;

 private:
  using Variant = std::variant<Atoms, Grid1D, Grid2D, Sampler>;
  ProbabilitySpace(Variant data, std::vector<std::string> coord_names)
      : data_(std::move(data)), coord_names_(std::move(coord_names)) {}

  Variant data_;
  std::vector<std::string> coord_names_;
};

/// The space materialized as weighted points, ready for the kernels.
struct PointSet {
  SpaceKind kind = SpaceKind::DiscreteAtoms;
  std::size_t size = 0;
  /// Quadrature weight per point: atom weight, 1/N per sample, or the full
  /// trapezoid weight times density at a grid node.
  std::vector<double> weight;
  /// Grids only: density times the trapezoid weight across lines, i.e. the
  /// integrand scale along each line before the sweep pitch is applied.
  std::vector<double> line_weight;
  std::size_t line_length = 0;
  std::size_t line_count = 0;
  double pitch = 0.0;  // node spacing along the sweep axis
  int sweep_axis = -1;
  std::vector<std::string> coord_names;
  std::vector<std::vector<double>> coords;
  /// Canonical index of each point; empty means identity.
  std::vector<std::size_t> canonical;
  std::vector<std::string> ids;  // atoms only

  bool is_grid() const {
    return kind == SpaceKind::DensityGrid1D || kind == SpaceKind::DensityGrid2D;
  }
  bool is_sampled() const { return kind == SpaceKind::Sampler; }
  std::span<const double> coord(std::string_view name) const;
  std::span<const double> line(std::span<const double> column, std::size_t l) const {
    return column.subspan(l * line_length, line_length);
  }
};

/// A measurable map from the space to R: either an expression over the
/// coordinates or a table of values in canonical point order.
class RandomVariable {
 public:
  static RandomVariable expression(std::string name, Expr expr,
                                   std::optional<int> sweep_axis = {});
  static RandomVariable expression(std::string name, std::string_view text);
  static RandomVariable table(std::string name, std::vector<double> values);
  /// Coordinate projection.
  static RandomVariable coordinate(std::string name) {
    std::string text = name;
    return expression(std::move(name), text);
  }

  const std::string& name() const { return name_; }
  std::optional<int> sweep_hint() const { return sweep_; }
  const Expr* expr() const { return expr_ ? &*expr_ : nullptr; }
  const std::vector<double>* values() const { return table_ ? &*table_ : nullptr; }
  std::string describe() const;

  /// Values at every point of the set. Throws Error(UndefinedPredicate) if
  /// the rule cannot be evaluated there (e.g. a table on a sampler).
  std::vector<double> evaluate(const PointSet& points) const;

 private:
  std::string name_;
  std::optional<Expr> expr_;
  std::optional<std::vector<double>> table_;
  std::optional<int> sweep_;
};

/// An event: Omega, the empty set, a set of atoms, an interval of a random
/// variable, a boolean predicate, or intersections/complements of those.
class Event {
 public:
  enum class Kind { All, Empty, Atoms, Interval, Predicate, Intersection, Complement };

  struct Interval {
    RandomVariable var;
    double lo;
    double hi;
    bool lo_closed = false;
    bool hi_closed = false;
  };

  static Event all();
  static Event none();
  static Event atoms(std::vector<std::string> ids);
  static Event interval(RandomVariable var, double lo, double hi,
                        bool lo_closed = false, bool hi_closed = false);
  /// The level set {var = value}.
  static Event level(RandomVariable var, double value);
  static Event predicate(Expr expr);
  static Event intersection(std::vector<Event> parts);
  static Event complement(Event inner);

  Kind kind() const { return kind_; }
  const std::string& label() const { return label_; }
  Event labeled(std::string label) const;
  const Interval* interval_data() const { return interval_ ? &*interval_ : nullptr; }
  const std::vector<std::string>& atom_ids() const { return ids_; }

  /// Membership of every point (node indicator on grids). Throws
  /// Error(UndefinedPredicate) if membership is undefined at some point.
  std::vector<std::uint8_t> mask(const PointSet& points) const;

 private:
  Kind kind_ = Kind::All;
  std::string label_;
  std::vector<std::string> ids_;
  std::optional<Interval> interval_;
  std::optional<Expr> expr_;
  std::vector<Event> parts_;
};

}  // namespace condpoint
