#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace condpoint {

enum class ErrorKind {
  Config,
  UndefinedPredicate,
  NonIntegrable,
  EmptyRange,
  InvalidPartition,
  ZeroEvidence,
  NonApproachablePoint,
  InsufficientTrace,
  OutOfRectangle,
  NullMarginal,
  NotMeasurable,
  EmptyLevelSet,
  NotNull,
  DegenerateA,
  FamilyNotShrinking,
  GridMismatch,
  Task,
};

std::string_view to_string(ErrorKind kind);

/// Every failure the library reports carries one of the named kinds above so
/// that the CLI can turn it into a machine-readable summary.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace condpoint
