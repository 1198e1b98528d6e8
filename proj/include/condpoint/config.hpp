#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "condpoint/partition.hpp"
#include "condpoint/space.hpp"
#include "condpoint/window.hpp"

namespace condpoint {

/// A space together with the named variables, events and partitions a config
/// file declares. README.md documents the schema.
class Model {
 public:
  Model(std::string name, ProbabilitySpace space) : name_(std::move(name)), space_(std::move(space)) {}

  const std::string& name() const { return name_; }
  const ProbabilitySpace& space() const { return space_; }
  /// True when the config fixed the sampler seed itself.
  bool has_seed() const { return has_seed_; }
  void set_seed(std::uint64_t seed);

  /// A declared variable, a coordinate, or an expression over both.
  RandomVariable variable(std::string_view name_or_expr) const;
  /// A declared event, "Omega", "empty", or a predicate expression.
  Event event(std::string_view name_or_expr) const;
  std::vector<std::string> partition_names() const;
  std::vector<Event> partition_cells(std::string_view name) const;
  Partition partition(std::string_view name) const;

  void add_variable(RandomVariable v);
  void add_event(std::string name, Event e);
  void add_partition(std::string name, std::vector<std::string> cells, bool truncated);
  void mark_seeded(bool seeded) { has_seed_ = seeded; }

 private:
  Expr expand(const Expr& e) const;

  std::string name_;
  ProbabilitySpace space_;
  bool has_seed_ = false;
  std::vector<RandomVariable> variables_;
  std::vector<std::pair<std::string, Event>> events_;
  struct PartitionSpec {
    std::string name;
    std::vector<std::string> cells;
    bool truncated = false;
  };
  std::vector<PartitionSpec> partitions_;
};

/// Throws Error(Config) on any schema violation.
Model parse_model(const nlohmann::json& j);
Model load_model(const std::filesystem::path& path);
nlohmann::json parse_json_file(const std::filesystem::path& path);

/// "p/q" strings or plain numbers.
double parse_weight(const nlohmann::json& j);
Axis parse_axis(const nlohmann::json& j);
Schedule parse_schedule(const nlohmann::json& j);

}  // namespace condpoint
