#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "netflow/commands.hpp"
#include "netflow/expr.hpp"
#include "netflow/scenario.hpp"

namespace {

struct Common {
  std::string scenario;
  std::string out;
  std::size_t grid = 0;
  std::size_t samples = 0;
  double tol = 0.0;
  bool force = false;
};

void add_common(CLI::App* cmd, Common& c, bool needs_out) {
  cmd->add_option("--scenario", c.scenario, "scenario JSON file")->required()->check(CLI::ExistingFile);
  auto* out = cmd->add_option("--out", c.out, "CSV output path");
  if (needs_out) out->required();
  cmd->add_option("--grid", c.grid, "spatial resolution N (overrides the scenario)")->check(CLI::PositiveNumber);
  cmd->add_option("--samples", c.samples, "equispaced sample times per period")->check(CLI::PositiveNumber);
  cmd->add_option("--tol", c.tol, "stochasticity tolerance")->check(CLI::PositiveNumber);
  cmd->add_flag("--force", c.force, "skip the validation gate");
}

netflow::cli::Options to_options(const Common& c) {
  netflow::cli::Options o;
  if (c.grid > 0) o.resolution = c.grid;
  if (c.samples > 0) o.samples = c.samples;
  if (c.tol > 0) o.tol = c.tol;
  o.force = c.force;
  return o;
}

int emit(const netflow::cli::CommandResult& result) {
  (result.exit_code == netflow::cli::kExitUsage ? std::cerr : std::cout) << result.report.dump(2) << '\n';
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transport flows on time-periodic networks"};
  app.require_subcommand(1);

  Common common;
  double t_end = 0.0;
  int tau = 1;
  double horizon = 0.0;
  double stride = 0.5;

  auto* validate = app.add_subcommand("validate", "check stochasticity, connectivity and regularity");
  add_common(validate, common, false);

  auto* simulate = app.add_subcommand("simulate", "propagate the initial densities and write them as CSV");
  add_common(simulate, common, true);
  simulate->add_option("--t-end", t_end, "final time")->required();

  auto* period = app.add_subcommand("period", "asymptotic period of the flow");
  add_common(period, common, false);

  auto* converge = app.add_subcommand("converge", "distance between u(t + tau) and u(t) over time");
  add_common(converge, common, true);
  converge->add_option("--tau", tau, "candidate period")->required();
  converge->add_option("--horizon", horizon, "elapsed time covered by the trace")->required();
  converge->add_option("--stride", stride, "spacing of trace times");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return netflow::cli::kExitUsage;
  }

  try {
    const netflow::Scenario scenario = netflow::load_scenario(common.scenario);
    const auto options = to_options(common);
    if (validate->parsed()) return emit(netflow::cli::validate(scenario, options));
    if (period->parsed()) return emit(netflow::cli::period(scenario, options));

    std::ofstream csv(common.out);
    if (!csv) {
      std::cerr << "cannot write " << common.out << '\n';
      return netflow::cli::kExitUsage;
    }
    if (simulate->parsed()) return emit(netflow::cli::simulate(scenario, t_end, csv, options));
    return emit(netflow::cli::converge(scenario, tau, horizon, stride, csv, options));
  } catch (const netflow::ScenarioError& e) {
    std::cerr << "scenario error: " << e.what() << '\n';
    return netflow::cli::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return netflow::cli::kExitFailed;
  }
}
