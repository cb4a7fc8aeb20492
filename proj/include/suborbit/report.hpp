#pragma once

// CSV tables and JSON reports. Floating-point CSV fields use 17 significant
// digits so reports diff cleanly.

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "suborbit/frame_algebra.hpp"
#include "suborbit/schedule.hpp"
#include "suborbit/verification.hpp"
#include "suborbit/verify_suite.hpp"

namespace suborbit {

using Json = nlohmann::ordered_json;

/// %.17g.
std::string format_double(double x);

/// Columns: k, alpha_k, gap, measured, bound, budget_eps_2k, pass; two-branch
/// tables start with a branch column and localized tables add bound_near,
/// bound_far. measured is squared except in localized tables.
std::string table_csv(const VerificationTable& table);

/// Columns: k, then <name>, gap_<name>, rule_<name> for every schedule.
std::string schedule_csv(const std::vector<std::pair<std::string, PowerSchedule>>& schedules);

/// Exactly the fields of PerturbationReport.
Json to_json(const PerturbationReport& report);
Json to_json(const PerturbationDiagnostics& diagnostics);
Json to_json(const PowerSchedule& schedule);
/// n_terms, tail_bound, exponent range and skipped terms.
Json to_json(const Generator& generator);
Json to_json(const VerificationTable& table);
/// {scenario, params, checks: [{name, measured, bound, pass}]}.
Json to_json(const ScenarioReport& report);

}  // namespace suborbit
