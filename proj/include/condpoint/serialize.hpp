#pragma once

#include <string>
#include <vector>

#include "condpoint/density.hpp"
#include "condpoint/factorization.hpp"
#include "condpoint/json_out.hpp"
#include "condpoint/partition.hpp"
#include "condpoint/pathology.hpp"
#include "condpoint/window.hpp"

namespace condpoint::io {

Json to_json(const WindowTrace& t);
/// Schema "condpoint.pointwise".
Json to_json(const PointwiseCondExp& phi);
std::string to_csv(const PointwiseCondExp& phi);

/// Schema "condpoint.factorization".
Json to_json(const FactorizationResult& r);
Json to_json(const VerificationReport& r);
Json to_json(const PartitionCondExp& p);
Json to_json(const TooCoarseDemo& d);
Json to_json(const TooFineDemo& d);

Json to_json(const ParadoxReport& r);
/// Schema "condpoint.paradox".
Json to_json(const ParadoxOutcome& o);
/// z and one conditional-density column per family (grid instances).
std::string paradox_csv(const ParadoxOutcome& o);

/// Density-route results at a list of y values.
struct DensityTable {
  std::string z_name;
  std::string y_name;
  std::string g;
  std::vector<double> y;
  std::vector<double> value;  // E[g(Z)|Y=y], NaN where flagged
  std::vector<double> marginal;
  std::vector<double> defect;
  std::vector<std::string> flags;
  std::vector<ConditionalDensity> densities;  // kept when requested
};
/// Schema "condpoint.density".
Json to_json(const DensityTable& d);
/// Long format: y, z, density.
std::string density_csv(const DensityTable& d);

}  // namespace condpoint::io
