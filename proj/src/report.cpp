#include "suborbit/report.hpp"

#include <cstdio>
#include <sstream>

namespace suborbit {

namespace {

const char* flag(bool b) { return b ? "true" : "false"; }

Json log_real(const LogReal& x) { return Json{{"value", x.value()}, {"log", x.is_zero() ? Json(nullptr) : Json(x.log())}}; }

}  // namespace

std::string format_double(double x) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", x);
  return buffer;
}

std::string table_csv(const VerificationTable& table) {
  const bool two_branch = table.kind == "l2r" || table.kind == "gabor";
  const bool localized = table.kind == "localized";
  std::ostringstream out;
  if (two_branch) out << "branch,";
  out << "k,alpha_k,gap,measured,bound,budget_eps_2k,pass";
  if (localized) out << ",bound_near,bound_far";
  out << '\n';
  for (const auto& row : table.rows) {
    if (two_branch) out << row.branch << ',';
    out << row.k << ',' << to_string(row.alpha) << ',' << to_string(row.gap) << ',' << format_double(row.measured.value())
        << ',' << format_double(row.bound.value()) << ',' << format_double(row.budget) << ',' << flag(row.pass);
    if (localized) {
      out << ',' << format_double(row.bound_near.value_or(LogReal{}).value()) << ','
          << format_double(row.bound_far.value_or(LogReal{}).value());
    }
    out << '\n';
  }
  return out.str();
}

std::string schedule_csv(const std::vector<std::pair<std::string, PowerSchedule>>& schedules) {
  std::ostringstream out;
  out << 'k';
  std::size_t length = 0;
  for (const auto& [name, s] : schedules) {
    out << ',' << name << ",gap_" << name << ",rule_" << name;
    length = std::max(length, s.size());
  }
  out << '\n';
  for (std::size_t k = 1; k <= length; ++k) {
    out << k;
    for (const auto& [name, s] : schedules) {
      if (k > s.size()) {
        out << ",,,";
        continue;
      }
      out << ',' << to_string(s.alpha(k));
      if (k < s.size()) {
        out << ',' << to_string(s.gap(k)) << ',' << to_string(s.provenance[k - 1]);
      } else {
        out << ",,";
      }
    }
    out << '\n';
  }
  return out.str();
}

Json to_json(const PerturbationReport& r) {
  return Json{{"epsilon", r.epsilon},
              {"synthesis_gap", r.synthesis_gap},
              {"frame_op_gap", r.frame_op_gap},
              {"inv_frame_op_gap", r.inv_frame_op_gap},
              {"bound_synthesis", r.bound_synthesis},
              {"bound_frame_op", r.bound_frame_op},
              {"bound_inv", r.bound_inv},
              {"new_lower_bound", r.new_lower_bound},
              {"new_upper_bound", r.new_upper_bound},
              {"excess_original", r.excess_original},
              {"excess_perturbed", r.excess_perturbed},
              {"all_bounds_hold", r.all_bounds_hold}};
}

Json to_json(const PerturbationDiagnostics& d) {
  return Json{{"section_size", d.section_size},
              {"A", d.declared_lower},
              {"B", d.declared_upper},
              {"perturbed_lower_emp", d.perturbed_lower_emp},
              {"perturbed_upper_emp", d.perturbed_upper_emp},
              {"joint_span_dim", d.joint_span_dim},
              {"spans_differ", d.spans_differ}};
}

Json to_json(const PowerSchedule& s) {
  Json values = Json::array();
  Json rules = Json::array();
  for (std::size_t k = 1; k <= s.size(); ++k) values.push_back(to_string(s.alpha(k)));
  for (const auto rule : s.provenance) rules.push_back(to_string(rule));
  return Json{{"denominator", s.denominator}, {"values", values}, {"gap_rules", rules}};
}

Json to_json(const Generator& g) {
  return Json{{"n_terms", g.n_terms},
              {"tail_bound", log_real(g.tail_bound)},
              {"min_exponent", to_string(g.min_exponent())},
              {"max_exponent", to_string(g.max_exponent())},
              {"skipped_terms", g.skipped}};
}

Json to_json(const VerificationTable& t) {
  Json params = Json::object();
  for (const auto& [key, value] : t.params) params[key] = value;
  Json schedules = Json::object();
  for (const auto& [name, s] : t.schedules) schedules[name] = to_json(s);
  Json generators = Json::object();
  for (const auto& [name, g] : t.generators) generators[name] = to_json(g);
  Json rows = Json::array();
  for (const auto& row : t.rows) {
    Json r{{"branch", row.branch},
           {"k", row.k},
           {"alpha", to_string(row.alpha)},
           {"gap", to_string(row.gap)},
           {"measured", log_real(row.measured)},
           {"charge", log_real(row.charge)},
           {"bound", log_real(row.bound)},
           {"budget", row.budget},
           {"cross_checked", row.cross_checked},
           {"cross_check_ok", row.cross_check_ok},
           {"pass", row.pass}};
    if (row.near) r["near"] = log_real(*row.near);
    if (row.far) r["far"] = log_real(*row.far);
    if (row.bound_near) r["bound_near"] = log_real(*row.bound_near);
    if (row.bound_far) r["bound_far"] = log_real(*row.bound_far);
    rows.push_back(std::move(r));
  }
  Json domination = Json::array();
  for (const auto& d : t.domination.rows) {
    domination.push_back(Json{{"k", d.k}, {"measured", d.measured}, {"budget", d.budget}, {"pass", d.pass}});
  }
  return Json{{"kind", t.kind},
              {"lambda", t.lambda},
              {"epsilon", t.epsilon},
              {"A_emp", t.lower},
              {"B", t.upper},
              {"section_size", t.section_size},
              {"n_terms", t.n_terms},
              {"params", params},
              {"schedules", schedules},
              {"generators", generators},
              {"rows", rows},
              {"perturbation", to_json(t.perturbation)},
              {"perturbation_diagnostics", to_json(t.perturbation.diagnostics)},
              {"domination", Json{{"holds", t.domination.holds}, {"rows", domination}}},
              {"eps_approximation", t.eps_approximation},
              {"independence_margin", t.independence_margin},
              {"rows_pass", t.rows_pass},
              {"passed", t.passed}};
}

Json to_json(const ScenarioReport& report) {
  Json params = Json::object();
  for (const auto& [key, value] : report.params) params[key] = value;
  Json checks = Json::array();
  for (const auto& c : report.checks) {
    checks.push_back(Json{{"name", c.name}, {"measured", c.measured}, {"bound", c.bound}, {"pass", c.pass}});
  }
  return Json{{"scenario", report.scenario}, {"params", params}, {"checks", checks}};
}

}  // namespace suborbit
