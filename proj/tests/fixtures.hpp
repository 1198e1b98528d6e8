#pragma once

#include <string>

#include <json.hpp>

#include "condpoint/config.hpp"
#include "support.hpp"

namespace testing {

// Frozen quadrature values for the ratio-normal paradox.
struct ParadoxFixture {
  double second_moment_via_y;
  double second_moment_via_w;
  double abs_mean_via_y;
  double abs_mean_via_w;
  double gap;
};

inline ParadoxFixture paradox_fixture() {
  auto j = condpoint::parse_json_file(source_dir() / "tests" / "fixtures" / "paradox_oracle.json");
  return {j.at("second_moment_via_y").get<double>(), j.at("second_moment_via_w").get<double>(),
          j.at("abs_mean_via_y").get<double>(), j.at("abs_mean_via_w").get<double>(),
          j.at("second_moment_gap").get<double>()};
}

}  // namespace testing
