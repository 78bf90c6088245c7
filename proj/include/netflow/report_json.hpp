#pragma once

#include <json.hpp>

#include "netflow/schedule.hpp"
#include "netflow/spectral.hpp"

namespace netflow {

void to_json(nlohmann::json& j, const Witness& w);
void to_json(nlohmann::json& j, const CheckResult& c);
void to_json(nlohmann::json& j, const ValidationReport& r);
void to_json(nlohmann::json& j, const PeriodReport& r);
void to_json(nlohmann::json& j, const ConvergenceTrace& t);

/// Rows of a 0/1 pattern as strings of '0'/'1'.
nlohmann::json pattern_rows(const Pattern& p);

}  // namespace netflow
