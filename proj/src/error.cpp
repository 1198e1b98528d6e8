#include "condpoint/error.hpp"

namespace condpoint {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config: return "ConfigError";
    case ErrorKind::UndefinedPredicate: return "UndefinedPredicate";
    case ErrorKind::NonIntegrable: return "NonIntegrable";
    case ErrorKind::EmptyRange: return "EmptyRange";
    case ErrorKind::InvalidPartition: return "InvalidPartition";
    case ErrorKind::ZeroEvidence: return "ZeroEvidence";
    case ErrorKind::NonApproachablePoint: return "NonApproachablePoint";
    case ErrorKind::InsufficientTrace: return "InsufficientTrace";
    case ErrorKind::OutOfRectangle: return "OutOfRectangle";
    case ErrorKind::NullMarginal: return "NullMarginal";
    case ErrorKind::NotMeasurable: return "NotMeasurable";
    case ErrorKind::EmptyLevelSet: return "EmptyLevelSet";
    case ErrorKind::NotNull: return "NotNull";
    case ErrorKind::DegenerateA: return "DegenerateA";
    case ErrorKind::FamilyNotShrinking: return "FamilyNotShrinking";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::Task: return "TaskError";
  }
  return "Unknown";
}

}  // namespace condpoint
