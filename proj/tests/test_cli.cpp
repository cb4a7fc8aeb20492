#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "suborbit/cli.hpp"

using namespace suborbit;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(SUBORBIT_TEST_DATA) + "/" + name; }

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::filesystem::path scratch(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("suborbit_cli_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

std::string column(const std::string& csv, std::size_t index) {
  std::istringstream in(csv);
  std::string line, out;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::istringstream cells(line);
    std::string cell;
    for (std::size_t i = 0; i <= index; ++i) std::getline(cells, cell, ',');
    out += cell + ";";
  }
  return out;
}

}  // namespace

TEST_CASE("schedule subcommand emits the sqrt2 closed form") {
  const Outcome o = run_cli({"schedule", "--rule", "sqrt2", "--N", "1", "--j", "3", "--m", "1,2,3,4"});
  CHECK(o.code == 0);
  CHECK(column(o.out, 1).rfind("0;7;16;27;", 0) == 0);
}

TEST_CASE("schedule subcommand covers every rule") {
  CHECK(run_cli({"schedule", "--rule", "l2n", "--lambda", "sqrt2", "--B", "2", "--epsilon", "0.5", "--m", "1,1,1"}).code == 0);
  CHECK(run_cli({"schedule", "--rule", "localized", "--lambda", "1.1", "--B", "16", "--epsilon", "0.01", "--C", "1",
                 "--beta", "0.5", "--length", "4"})
            .code == 0);
  const Outcome l2r = run_cli({"schedule", "--rule", "l2r", "--lambda", "sqrt2", "--B", "2", "--epsilon", "0.5",
                               "--q", "4", "--b", "1,2,3", "--c", "-1,-2,-3", "--L", "1"});
  CHECK(l2r.code == 0);
  CHECK(l2r.out.rfind("k,alpha,gap_alpha,rule_alpha,gamma,gap_gamma,rule_gamma\n", 0) == 0);
  const Outcome gabor = run_cli({"schedule", "--rule", "gabor", "--a", "1", "--window-length", "1", "--N", "1",
                                 "--j", "1", "--length", "4", "--q", "16"});
  CHECK(gabor.code == 0);
  CHECK(column(gabor.out, 1) == "0;6;14;24;");
  CHECK(column(gabor.out, 4) == "0;7;16;27;");
}

TEST_CASE("verify writes report.json and table.csv and exits 0 on the canonical basis") {
  const auto dir = scratch("l2n");
  const Outcome o = run_cli({"verify", "--kind", "l2n", "--config", data("l2n_onb8.json"), "--out", dir.string()});
  CHECK(o.code == 0);
  const std::string csv = slurp(dir / "table.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
  CHECK(column(csv, 6) == "true;true;true;true;true;true;true;true;");
  CHECK(std::filesystem::exists(dir / "report.json"));
}

TEST_CASE("identical configs give byte-identical reports") {
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  for (const auto& dir : {a, b}) {
    CHECK(run_cli({"verify", "--kind", "localized", "--config", data("localized_bump6.json"), "--out", dir.string()})
              .code == 0);
  }
  CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
  CHECK(slurp(a / "table.csv") == slurp(b / "table.csv"));
}

TEST_CASE("gabor, build and scenario subcommands") {
  CHECK(run_cli({"gabor", "--config", data("gabor_indicator.json")}).code == 0);
  const Outcome build = run_cli({"build", "--kind", "l2n", "--config", data("l2n_onb8.json")});
  CHECK(build.code == 0);
  CHECK(build.out.find("\"tail_bound\"") != std::string::npos);
  CHECK(build.out.find("\"n_terms\": 8") != std::string::npos);
  CHECK(run_cli({"scenario", "--name", "two_orbit", "--D", "12"}).code == 0);
  CHECK(run_cli({"scenario", "--name", "suborbit_independence", "--kind", "l2r", "--config",
                 data("l2r_indicators.json")})
            .code == 0);
}

TEST_CASE("errors exit 2 and name the offending field") {
  const auto dir = scratch("bad");
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "no_lambda.json") << R"({"family": {"kind": "canonical_basis", "size": 4}, "epsilon": 0.1})";
  }
  const Outcome missing = run_cli({"verify", "--kind", "l2n", "--config", (dir / "no_lambda.json").string()});
  CHECK(missing.code == 2);
  CHECK(missing.err.find("lambda") != std::string::npos);

  CHECK(run_cli({"frobnicate"}).code == 2);
  CHECK(run_cli({"verify", "--kind", "spiral", "--config", data("l2n_onb8.json")}).code == 2);
  CHECK(run_cli({"verify", "--kind", "l2n", "--config", "/nonexistent.json"}).code == 2);
  const Outcome no_m = run_cli({"schedule", "--rule", "sqrt2", "--N", "1", "--j", "1"});
  CHECK(no_m.code == 2);
  CHECK(no_m.err.find("--m") != std::string::npos);
  {
    std::ofstream(dir / "big_eps.json") << R"({"family": {"kind": "canonical_basis", "size": 4}, "lambda": 2, "epsilon": 3})";
  }
  const Outcome eps = run_cli({"verify", "--kind", "l2n", "--config", (dir / "big_eps.json").string()});
  CHECK(eps.code == 2);
  CHECK(eps.err.find("epsilon") != std::string::npos);
}

TEST_CASE("help documents the CSV columns") {
  const Outcome o = run_cli({"--help"});
  CHECK(o.code == 0);
  CHECK(o.out.find("budget_eps_2k") != std::string::npos);
  CHECK(o.out.find("alpha_k") != std::string::npos);
}
