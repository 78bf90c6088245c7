#pragma once

#include <cstddef>
#include <optional>
#include <ostream>

#include <json.hpp>

#include "netflow/scenario.hpp"

namespace netflow::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitUsage = 2;

/// Command-line overrides of scenario settings.
struct Options {
  std::optional<std::size_t> resolution;
  std::optional<std::size_t> samples;
  std::optional<std::size_t> validation_grid;
  std::optional<double> tol;
  bool force = false;
};

struct CommandResult {
  int exit_code = kExitOk;
  nlohmann::json report;
};

CommandResult validate(const Scenario& scenario, const Options& options);
CommandResult simulate(const Scenario& scenario, double t_end, std::ostream& csv, const Options& options);
CommandResult period(const Scenario& scenario, const Options& options);
CommandResult converge(const Scenario& scenario, int tau, double horizon, double stride, std::ostream& csv,
                       const Options& options);

}  // namespace netflow::cli
