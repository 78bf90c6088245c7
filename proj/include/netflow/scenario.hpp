#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "netflow/evolution.hpp"
#include "netflow/graph.hpp"
#include "netflow/schedule.hpp"

namespace netflow {

/// Malformed scenario; `pointer()` is the JSON pointer of the offending value.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string pointer, const std::string& message);
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

struct Tolerances {
  double stochastic = 1e-9;
  double zero = 1e-12;
  double eigen = 1e-6;
};

struct Scenario {
  NetworkGraph graph;
  MatrixKind mode;
  TimeVaryingMatrix matrix;
  std::vector<JunctionAllocation> junctions;  // atf scenarios given as junction blocks
  InitialData initial;
  double start = 0.0;
  std::size_t resolution = 400;
  std::size_t validation_grid = 1001;
  std::size_t period_samples = 64;
  Tolerances tolerances;
};

Scenario parse_scenario(const nlohmann::json& doc);
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace netflow
