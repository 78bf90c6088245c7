#include "netflow/commands.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "netflow/report_json.hpp"
#include "netflow/spectral.hpp"

namespace netflow::cli {

namespace {

using nlohmann::json;

std::size_t resolution(const Scenario& s, const Options& o) { return o.resolution.value_or(s.resolution); }
std::size_t samples(const Scenario& s, const Options& o) { return o.samples.value_or(s.period_samples); }
double tolerance(const Scenario& s, const Options& o) { return o.tol.value_or(s.tolerances.stochastic); }

json junction_check(const Scenario& scenario, const std::vector<double>& grid, double tol) {
  CheckResult check{"junction_row_sums", true, 0.0, std::nullopt};
  for (double t : grid) {
    for (std::size_t jn = 0; jn < scenario.junctions.size(); ++jn) {
      const auto sums = junction_row_sums(scenario.junctions[jn], t);
      for (std::size_t i = 0; i < sums.size(); ++i) {
        const double dev = std::abs(sums[i] - 1.0);
        if (dev > check.worst || !check.witness) {
          check.worst = std::max(check.worst, dev);
          check.witness = Witness{t, i + 1, jn + 1, sums[i]};
        }
      }
    }
  }
  check.passed = check.worst <= tol;
  json j = check;
  j["note"] = "witness row = incoming edge position, column = junction number";
  return j;
}

json support_check(const Scenario& scenario, const Options& options, bool& passed) {
  const auto& m = scenario.matrix;
  const auto times = default_sample_times(m, samples(scenario, options), scenario.tolerances.zero);
  std::map<std::uint64_t, json> patterns;
  std::vector<std::uint64_t> order;
  passed = true;
  for (double t : times) {
    const Pattern p = support_pattern(m, t, scenario.tolerances.zero);
    const auto hash = pattern_hash(p);
    auto it = patterns.find(hash);
    if (it == patterns.end()) {
      const auto active = active_nodes(p);
      const Pattern sub = restrict_pattern(p, active);
      const bool connected = is_strongly_connected(sub);
      json entry = {{"first_time", t}, {"sample_count", 0}, {"strongly_connected", connected},
                    {"rows", pattern_rows(p)}};
      std::vector<int> edges;
      for (int j : active) edges.push_back(j + 1);
      entry["active_edges"] = edges;
      entry["cyclic_index"] = connected ? json(cyclic_index(sub)) : json(nullptr);
      if (!connected) passed = false;
      it = patterns.emplace(hash, std::move(entry)).first;
      order.push_back(hash);
    }
    it->second["sample_count"] = it->second["sample_count"].get<int>() + 1;
  }
  json list = json::array();
  for (auto h : order) list.push_back(patterns[h]);
  return {{"passed", passed},
          {"sample_times", times.size()},
          {"distinct_patterns", order.size()},
          {"patterns", list},
          {"note", passed ? "every G_t is strongly connected"
                          : "some G_t is not strongly connected (hypothesis of the period formula fails)"}};
}

/// Validation gate shared by simulate/period/converge.
std::optional<CommandResult> precondition(const Scenario& scenario, const Options& options) {
  if (options.force) return std::nullopt;
  CommandResult v = validate(scenario, options);
  if (v.exit_code == kExitOk) return std::nullopt;
  return CommandResult{v.exit_code, {{"error", "scenario failed validation (use --force to skip)"}, {"validation", v.report}}};
}

}  // namespace

CommandResult validate(const Scenario& scenario, const Options& options) {
  const double tol = tolerance(scenario, options);
  const auto grid = uniform_grid(options.validation_grid.value_or(scenario.validation_grid));
  json report;
  bool ok = true;
  try {
    const ValidationReport stochastic = validate_stochastic(scenario.matrix, grid, tol);
    report["stochastic"] = stochastic;
    ok = ok && stochastic.passed();

    if (!scenario.junctions.empty()) {
      report["junctions"] = junction_check(scenario, grid, tol);
      ok = ok && report["junctions"]["passed"].get<bool>();
    }

    const double initial_min = scenario.initial.min_on_grid(resolution(scenario, options));
    report["initial_data"] = {{"passed", initial_min >= -tol}, {"min_density", initial_min}};
    ok = ok && initial_min >= -tol;

    bool connected = true;
    report["support"] = support_check(scenario, options, connected);
    ok = ok && connected;

    const double tv = regularity_diagnostic(scenario.matrix, grid);
    report["regularity"] = {{"passed", std::isfinite(tv)}, {"total_variation", tv}};
    ok = ok && std::isfinite(tv);
  } catch (const EvalError& e) {
    report["error"] = e.what();
    ok = false;
  }
  report["periodic"] = scenario.matrix.periodic();
  report["passed"] = ok;
  return {ok ? kExitOk : kExitFailed, report};
}

CommandResult simulate(const Scenario& scenario, double t_end, std::ostream& csv, const Options& options) {
  if (!(t_end >= scenario.start)) {
    return {kExitUsage, {{"error", "t_end precedes the scenario start time"}}};
  }
  if (auto gate = precondition(scenario, options)) return *gate;

  const std::size_t n = resolution(scenario, options);
  const auto& m = scenario.matrix;
  const EdgeDensityField initial = propagate(m, scenario.initial, scenario.start, scenario.start, n);
  const EdgeDensityField final_field = propagate(m, scenario.initial, scenario.start, t_end, n);
  const double mass0 = l1_norm(initial).total;
  const MassReport final_mass = l1_norm(final_field);
  const double mass1 = final_mass.total;
  const double drift = mass0 > 0 ? std::abs(mass1 - mass0) / mass0 : std::abs(mass1 - mass0);
  write_field_csv(csv, final_field);

  json report = {{"s", scenario.start},
                 {"t_end", t_end},
                 {"N", n},
                 {"rows", final_field.values.size()},
                 {"initial_mass", mass0},
                 {"final_mass", mass1},
                 {"relative_drift", drift},
                 {"min_density", final_field.values.minCoeff()}};
  report["per_edge_mass"] =
      std::vector<double>(final_mass.per_edge.data(), final_mass.per_edge.data() + final_mass.per_edge.size());
  return {kExitOk, report};
}

CommandResult period(const Scenario& scenario, const Options& options) {
  if (auto gate = precondition(scenario, options)) return *gate;
  const auto& m = scenario.matrix;
  const auto times = default_sample_times(m, samples(scenario, options), scenario.tolerances.zero);
  PeriodReport general;
  try {
    general = asymptotic_period(m, times, scenario.tolerances.zero, scenario.tolerances.eigen);
  } catch (const HypothesisError& e) {
    return {kExitFailed, {{"error", e.what()}, {"hypothesis", "G_t must be strongly connected for every t"}}};
  }
  const auto shortcut = strictly_positive_shortcut(m, times, scenario.tolerances.zero);

  json report = general;
  bool consistent = true;
  for (const auto& s : general.samples) consistent = consistent && s.peripheral_count == s.cyclic_index;
  report["perron_frobenius_consistent"] = consistent;
  report["distinct_patterns"] = general.patterns.size();
  report["shortcut"] = {{"applied", shortcut.has_value()},
                        {"tau", shortcut ? json(*shortcut) : json(nullptr)},
                        {"reason", shortcut ? "support equals the static network at every sample time"
                                            : "some edges lose their inflow at some sample time"}};
  return {kExitOk, report};
}

CommandResult converge(const Scenario& scenario, int tau, double horizon, double stride, std::ostream& csv,
                       const Options& options) {
  if (tau < 1) return {kExitUsage, {{"error", "tau must be a positive integer"}}};
  if (!(horizon >= 2.0 * tau)) return {kExitUsage, {{"error", "horizon must be at least 2*tau"}}};
  if (!(stride > 0.0)) return {kExitUsage, {{"error", "stride must be positive"}}};
  if (auto gate = precondition(scenario, options)) return *gate;

  const std::size_t n = resolution(scenario, options);
  const ConvergenceTrace trace =
      convergence_diagnostic(scenario.matrix, scenario.initial, scenario.start, tau, horizon, n, stride);
  write_trace_csv(csv, trace);

  double min_delta = INFINITY;
  for (const auto& p : trace.points) min_delta = std::min(min_delta, p.delta);
  return {kExitOk,
          {{"tau", tau},
           {"horizon", horizon},
           {"stride", stride},
           {"N", n},
           {"points", trace.points.size()},
           {"initial_delta", trace.points.front().delta},
           {"final_delta", trace.points.back().delta},
           {"min_delta", min_delta},
           {"rate", trace.rate ? json(*trace.rate) : json(nullptr)}}};
}

}  // namespace netflow::cli
