#include "suborbit/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>

#include "suborbit/approx_l2n.hpp"
#include "suborbit/approx_l2r.hpp"
#include "suborbit/approx_localized.hpp"
#include "suborbit/config.hpp"
#include "suborbit/report.hpp"
#include "suborbit/verify_suite.hpp"

namespace suborbit {

namespace {

constexpr const char* kColumnsHelp = R"(Output files (under --out):
  report.json  full report: parameters, schedules, generator summaries, rows,
               perturbation report, domination table, independence margin.
  table.csv    one row per k:
    branch         G or H (two-operator runs only)
    k              frame index
    alpha_k        schedule value alpha(k) (gamma(k) on branch H), exact
    gap            alpha(k+1) - alpha(k), exact
    measured       ||f_k - T^alpha(k) phi||^2 (the norm for --kind localized)
    bound          closed-form bound on measured
    budget_eps_2k  epsilon 2^-k (halved per branch in two-operator runs)
    pass           measured plus the charged tail within bound and budget
    bound_near, bound_far   localized only: the two halves of bound
Schedule CSV: k, <name>, gap_<name>, rule_<name> per schedule.
Floating-point fields carry 17 significant digits.
Exit codes: 0 all checks pass, 1 a bound failed, 2 config or precondition error.)";

void write_file(const std::string& dir, const std::string& name, const std::string& text) {
  std::filesystem::create_directories(dir);
  std::ofstream f(std::filesystem::path(dir) / name, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + name + " under '" + dir + "'");
  f << text;
}

std::vector<Index> parse_index_list(const std::string& text, const std::string& name) {
  std::vector<Index> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      out.push_back(std::stoll(item));
    } catch (const std::exception&) {
      throw ConfigError("option --" + name + " has a non-integer entry '" + item + "'");
    }
  }
  return out;
}

std::vector<Rational> parse_rational_list(const std::string& text, const std::string& name, std::int64_t q) {
  std::vector<Rational> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_rational(ConfigJson(item), name, q));
  return out;
}

double lambda_value(const std::string& text) {
  if (text == "sqrt2") return std::numbers::sqrt2;
  try {
    return std::stod(text);
  } catch (const std::exception&) {
    throw ConfigError("option --lambda must be a number or sqrt2");
  }
}

template <typename T>
const T& require(const std::optional<T>& v, const std::string& name) {
  if (!v) throw ConfigError("missing option --" + name);
  return *v;
}

struct ScheduleArgs {
  std::string rule = "l2n";
  std::optional<std::string> lambda;
  std::optional<double> upper;
  std::optional<double> epsilon;
  std::optional<std::string> m;
  std::optional<int> N;
  std::optional<int> j;
  bool restricted = false;
  std::optional<std::size_t> length;
  std::optional<double> C;
  std::optional<double> beta;
  std::optional<std::string> b;
  std::optional<std::string> c;
  std::optional<std::string> L;
  std::int64_t q = 1;
  std::optional<std::string> a;
  std::optional<std::string> window_length;
  std::optional<std::string> out_dir;
};

std::vector<std::pair<std::string, PowerSchedule>> run_schedule(const ScheduleArgs& s) {
  if (s.rule == "l2n" || s.rule == "sqrt2") {
    const std::vector<Index> m = parse_index_list(require(s.m, "m"), "m");
    const std::size_t length = s.length.value_or(m.size());
    if (s.rule == "sqrt2") {
      return {{"alpha", schedule_sqrt2(m, {require(s.N, "N"), require(s.j, "j")}, s.restricted, length)}};
    }
    return {{"alpha", schedule_finite_support(m, lambda_value(require(s.lambda, "lambda")), require(s.upper, "B"),
                                              require(s.epsilon, "epsilon"), length)}};
  }
  if (s.rule == "localized") {
    return {{"alpha", schedule_localized(require(s.C, "C"), require(s.beta, "beta"),
                                         lambda_value(require(s.lambda, "lambda")), require(s.upper, "B"),
                                         require(s.epsilon, "epsilon"), require(s.length, "length"))}};
  }
  if (s.rule == "l2r") {
    SupportIntervalProfile p;
    p.q = s.q;
    if (s.b) p.b = parse_rational_list(*s.b, "b", s.q);
    if (s.c) p.c = parse_rational_list(*s.c, "c", s.q);
    p.a.assign(p.b.size(), Rational(0));
    p.d.assign(p.c.size(), Rational(0));
    p.L = parse_rational(ConfigJson(require(s.L, "L")), "L", s.q);
    auto [alpha, gamma] = schedules_l2r(p, lambda_value(require(s.lambda, "lambda")), require(s.upper, "B"),
                                        require(s.epsilon, "epsilon"), p.b.empty() ? 0 : p.b.size() + 1,
                                        p.c.empty() ? 0 : p.c.size() + 1);
    return {{"alpha", alpha}, {"gamma", gamma}};
  }
  if (s.rule == "gabor") {
    const Rational a = parse_rational(ConfigJson(require(s.a, "a")), "a", s.q);
    const Rational C = parse_rational(ConfigJson(require(s.window_length, "C")), "C", s.q);
    auto [alpha, gamma] =
        gabor_schedules(C, a, require(s.N, "N"), require(s.j, "j"), require(s.length, "length"), s.q);
    return {{"alpha", alpha}, {"gamma", gamma}};
  }
  throw ConfigError("unknown schedule rule '" + s.rule + "'");
}

VerificationTable run_verify(const std::string& kind, const ConfigJson& config) {
  if (kind == "l2n") {
    return verify_finite_support(parse_family(config.at("family")).family, parse_finite_support_options(config));
  }
  if (kind == "localized") {
    const FamilyConfig f = parse_family(config.contains("family") ? config.at("family") : ConfigJson());
    return verify_localized(f.family, parse_localized_options(config, f.truncation_radius));
  }
  if (kind == "l2r") {
    return verify_l2r(parse_family(config.contains("family") ? config.at("family") : ConfigJson()).family,
                      parse_l2r_options(config));
  }
  if (kind == "gabor") {
    if (!config.contains("gabor")) throw ConfigError("missing field 'gabor'");
    return verify_gabor(parse_gabor_spec(config.at("gabor")), parse_l2r_options(config));
  }
  throw ConfigError("unknown kind '" + kind + "'; expected l2n, localized, l2r or gabor");
}

int emit_table(const VerificationTable& table, const std::optional<std::string>& out_dir, std::ostream& out) {
  const std::string json = to_json(table).dump(2) + "\n";
  const std::string csv = table_csv(table);
  if (out_dir) {
    write_file(*out_dir, "report.json", json);
    write_file(*out_dir, "table.csv", csv);
  }
  out << csv;
  out << "result: " << (table.passed ? "pass" : "fail") << '\n';
  return table.passed ? kExitPass : kExitFailedBound;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Suborbit approximation of frames: schedules, generators and bound verification"};
  app.footer(kColumnsHelp);
  app.require_subcommand(1);

  ScheduleArgs sched;
  auto* schedule = app.add_subcommand("schedule", "emit alpha (and gamma) schedules for a rule");
  schedule->add_option("--rule", sched.rule, "l2n | sqrt2 | localized | l2r | gabor")->capture_default_str();
  schedule->add_option("--lambda", sched.lambda, "lambda > 1, or sqrt2");
  schedule->add_option("--B", sched.upper, "upper frame bound B");
  schedule->add_option("--epsilon", sched.epsilon, "tolerance epsilon");
  schedule->add_option("--m", sched.m, "support profile m(1),m(2),... (l2n, sqrt2)");
  schedule->add_option("--N", sched.N, "B = 2^N (sqrt2, gabor)");
  schedule->add_option("--j", sched.j, "epsilon = 2^-j (sqrt2, gabor)");
  schedule->add_flag("--restricted", sched.restricted, "sqrt2 closed form without the support sum");
  schedule->add_option("--length", sched.length, "number of schedule values");
  schedule->add_option("--C", sched.C, "localization constant C (localized)");
  schedule->add_option("--beta", sched.beta, "localization rate beta (localized)");
  schedule->add_option("--b", sched.b, "right support ends b(k), comma separated (l2r)");
  schedule->add_option("--c", sched.c, "left support ends c(k) < 0, comma separated (l2r)");
  schedule->add_option("--L", sched.L, "support length bound L (l2r)");
  schedule->add_option("--q", sched.q, "grid denominator")->capture_default_str();
  schedule->add_option("--a", sched.a, "Gabor time step a (gabor)");
  schedule->add_option("--window-length", sched.window_length, "Gabor window support [0, C] (gabor)");
  schedule->add_option("--out", sched.out_dir, "directory for schedule.csv");

  std::string config_path;
  std::optional<std::string> out_dir;
  std::string build_kind = "l2n";
  auto* build = app.add_subcommand("build", "build the generator(s) and print their summary");
  build->add_option("--kind", build_kind, "l2n | localized | l2r | gabor")->capture_default_str();
  build->add_option("--config", config_path, "JSON config")->required();
  build->add_option("--out", out_dir, "directory for report.json");

  std::string verify_kind;
  auto* verify = app.add_subcommand("verify", "run a full pipeline and check every bound");
  verify->add_option("--kind", verify_kind, "l2n | localized | l2r")->required();
  verify->add_option("--config", config_path, "JSON config")->required();
  verify->add_option("--out", out_dir, "directory for report.json and table.csv");

  auto* gabor = app.add_subcommand("gabor", "run the Gabor pipeline with the closed-form schedules");
  gabor->add_option("--config", config_path, "JSON config with a 'gabor' object")->required();
  gabor->add_option("--out", out_dir, "directory for report.json and table.csv");

  std::string scenario_name;
  Index dimension = 12;
  std::uint64_t seed = 1;
  std::size_t trials = 100;
  std::optional<std::string> scenario_config;
  auto* scenario = app.add_subcommand("scenario", "run a named verification scenario");
  scenario->add_option("--name", scenario_name, "two_orbit | suborbit_independence")->required();
  scenario->add_option("--D", dimension, "dimension (two_orbit)")->capture_default_str();
  scenario->add_option("--seed", seed, "random seed (two_orbit)")->capture_default_str();
  scenario->add_option("--trials", trials, "random reconstructions (two_orbit)")->capture_default_str();
  scenario->add_option("--kind", verify_kind, "pipeline kind (suborbit_independence)");
  scenario->add_option("--config", scenario_config, "pipeline config (suborbit_independence)");
  scenario->add_option("--out", out_dir, "directory for report.json");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  }

  try {
    if (*schedule) {
      const auto schedules = run_schedule(sched);
      const std::string csv = schedule_csv(schedules);
      if (sched.out_dir) write_file(*sched.out_dir, "schedule.csv", csv);
      out << csv;
      return kExitPass;
    }
    if (*build) {
      const VerificationTable table = run_verify(build_kind, load_config(config_path));
      Json summary = Json::object();
      for (const auto& [name, g] : table.generators) summary[name] = to_json(g);
      const std::string text = summary.dump(2) + "\n";
      if (out_dir) write_file(*out_dir, "report.json", text);
      out << text;
      return kExitPass;
    }
    if (*verify) {
      if (verify_kind == "gabor") throw ConfigError("use the gabor subcommand for Gabor configs");
      return emit_table(run_verify(verify_kind, load_config(config_path)), out_dir, out);
    }
    if (*gabor) {
      return emit_table(run_verify("gabor", load_config(config_path)), out_dir, out);
    }
    if (*scenario) {
      ScenarioReport report;
      if (scenario_name == "two_orbit") {
        report = scenario_two_orbit_example(dimension, seed, trials);
      } else if (scenario_name == "suborbit_independence") {
        if (verify_kind.empty()) throw ConfigError("missing option --kind");
        report = scenario_suborbit_independence(
            run_verify(verify_kind, load_config(require(scenario_config, "config"))));
      } else {
        throw ConfigError("unknown scenario '" + scenario_name + "'; expected two_orbit or suborbit_independence");
      }
      const std::string text = to_json(report).dump(2) + "\n";
      if (out_dir) write_file(*out_dir, "report.json", text);
      out << text;
      return report.passed() ? kExitPass : kExitFailedBound;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed config: " << e.what() << '\n';
    return kExitConfigError;
  }
  return kExitConfigError;
}

}  // namespace suborbit
