#include "netflow/report_json.hpp"

#include <cstdio>
#include <string>

namespace netflow {

namespace {

std::string hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

void to_json(nlohmann::json& j, const Witness& w) {
  j = {{"time", w.time}, {"column", w.col}, {"value", w.value}};
  if (w.row != 0) j["row"] = w.row;
}

void to_json(nlohmann::json& j, const CheckResult& c) {
  j = {{"name", c.name}, {"passed", c.passed}, {"worst", c.worst}};
  if (c.witness) j["witness"] = *c.witness;
}

void to_json(nlohmann::json& j, const ValidationReport& r) {
  j = {{"passed", r.passed()},
       {"checks", r.checks},
       {"grid", {{"points", r.grid.size()}, {"first", r.grid.front()}, {"last", r.grid.back()}}}};
}

nlohmann::json pattern_rows(const Pattern& p) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    std::string row;
    for (Eigen::Index k = 0; k < p.cols(); ++k) row += p(i, k) != 0 ? '1' : '0';
    rows.push_back(row);
  }
  return rows;
}

void to_json(nlohmann::json& j, const PeriodReport& r) {
  nlohmann::json patterns = nlohmann::json::array();
  for (const auto& p : r.patterns) {
    patterns.push_back({{"hash", hex(p.hash)},
                        {"cyclic_index", p.cyclic_index},
                        {"active_edges", p.active_edges},
                        {"sample_count", p.times.size()},
                        {"first_time", p.times.front()},
                        {"rows", pattern_rows(p.pattern)}});
  }
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& s : r.samples) {
    samples.push_back({{"t", s.time},
                       {"pattern", hex(s.pattern_hash)},
                       {"h", s.cyclic_index},
                       {"peripheral_count", s.peripheral_count},
                       {"reducible_full_pattern", s.reducible_full_pattern}});
  }
  j = {{"tau", r.tau}, {"patterns", patterns}, {"samples", samples}};
}

void to_json(nlohmann::json& j, const ConvergenceTrace& t) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : t.points) points.push_back({{"t", p.elapsed}, {"delta", p.delta}});
  j = {{"tau", t.tau}, {"points", points}};
  j["rate"] = t.rate ? nlohmann::json(*t.rate) : nlohmann::json(nullptr);
}

}  // namespace netflow
