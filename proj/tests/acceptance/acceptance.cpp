// One PASS/FAIL line per acceptance criterion. Tolerances are fixed; exit
// status is nonzero when any criterion fails. argv[1] names a scratch
// directory for the determinism reruns.

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

#include "support.hpp"
#include "suborbit/approx_l2n.hpp"
#include "suborbit/approx_l2r.hpp"
#include "suborbit/approx_localized.hpp"
#include "suborbit/frame_algebra.hpp"
#include "suborbit/report.hpp"
#include "suborbit/verify_suite.hpp"

using namespace suborbit;
using suborbit::testing::Draw;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

template <class T>
std::string list(const std::vector<T>& xs) {
  std::ostringstream out;
  out << "(";
  for (std::size_t i = 0; i < xs.size(); ++i) out << (i ? "," : "") << xs[i];
  out << ")";
  return out.str();
}

// Row k passes when measured plus charges sits under the bound and, squared
// where the row stores a norm, under epsilon 2^{-k}.
bool row_holds(const ResidualRow& row, bool measured_is_norm) {
  const LogReal charged = row.measured + row.charge;
  const double squared = measured_is_norm ? (charged * charged).value() : charged.value();
  return leq(charged, row.bound, kRoundingSlack) && squared <= row.budget * (1 + kRoundingSlack);
}

FrameFamily canonical_basis(std::size_t n) {
  std::vector<Vector> out;
  for (std::size_t k = 1; k <= n; ++k) out.emplace_back(basis_vector(static_cast<Index>(k)));
  return FrameFamily(std::move(out));
}

VerificationTable run_finite_support() {
  FiniteSupportOptions o;
  o.lambda = std::numbers::sqrt2;
  o.epsilon = 0.125;
  o.upper = 2.0;
  o.rule = FiniteSupportRule::sqrt2;
  o.N = 1;
  o.j = 3;
  return verify_finite_support(canonical_basis(8), o);
}

VerificationTable run_localized() {
  const LocalizedFamily bump = exponential_bump_family(14, 1.0, 0.5);
  LocalizedOptions o;
  o.lambda = 1.1;
  o.C = 1.0;
  o.beta = 0.5;
  o.epsilon_fraction = 0.1;
  o.rows = 6;
  o.truncation_radius = bump.radius;
  return verify_localized(bump.family, o);
}

VerificationTable run_gabor() {
  GaborSpec spec;
  spec.window = SampledFunction::indicator(16, Rational(0), Rational(1));
  spec.a = Rational(1);
  spec.b = 1.0;
  spec.m_range = 3;
  spec.n_range = 3;
  L2rOptions o;
  o.lambda = std::numbers::sqrt2;
  o.N = 1;
  o.j = 2;
  o.rows = 6;
  return verify_gabor(spec, o);
}

Verdict criterion_finite_support(const VerificationTable& t) {
  // alpha(k) = (k-1)(N+j+1) + k(k-1)/2 + sum_{l<k} m(l) with m(l) = l.
  std::vector<std::int64_t> expected;
  for (std::int64_t k = 1; k <= 9; ++k) expected.push_back((k - 1) * 5 + k * (k - 1) / 2 + (k - 1) * k / 2);
  const std::vector<std::int64_t> stated{0, 7, 16, 27};
  const std::vector<std::int64_t>& got = t.schedules.front().second.steps;
  bool ok = got.size() >= expected.size() && std::equal(expected.begin(), expected.end(), got.begin()) &&
            std::equal(stated.begin(), stated.end(), got.begin());

  // ||e_1 - phi||^2 with phi = sum_n 2^{-alpha(n)/2} e_{n + alpha(n)}, formed coordinate-wise.
  std::map<Index, double> diff{{1, 1.0}};
  for (std::size_t n = 1; n <= 8; ++n) diff[static_cast<Index>(n) + expected[n - 1]] -= std::pow(2.0, -0.5 * static_cast<double>(expected[n - 1]));
  long double oracle = 0.0L;
  for (const auto& [j, x] : diff) oracle += static_cast<long double>(x) * x;
  const double measured = t.rows.front().measured.value();
  const double rel = std::abs(measured - static_cast<double>(oracle)) / static_cast<double>(oracle);
  ok = ok && rel <= 1e-15;

  std::size_t rows_ok = 0;
  for (const auto& row : t.rows) rows_ok += row_holds(row, false) ? 1 : 0;
  ok = ok && rows_ok == 8 && t.rows.size() == 8;
  return {ok, "alpha=" + list(std::vector<std::int64_t>(got.begin(), got.begin() + 4)) + " rows " +
                  std::to_string(rows_ok) + "/8 measured(1)=" + num(measured) + " rel_err=" + num(rel)};
}

Verdict criterion_perturbation() {
  Draw draw(20171218);
  std::size_t violations = 0, pairs = 0;
  double worst = -1e300;
  const double slack = 1e-9;
  while (pairs < 200) {
    const auto K = static_cast<std::size_t>(draw.integer(1, 12));
    const Index D = draw.integer(static_cast<Index>(K), 24);
    const std::vector<Vector> f = draw.dense_family(K, D);
    const Eigen::MatrixXcd uf = suborbit::testing::synthesis_matrix(f, D);
    const Eigen::VectorXd sf = Eigen::JacobiSVD<Eigen::MatrixXcd>(uf).singularValues();
    const double A = sf(sf.size() - 1) * sf(sf.size() - 1);
    const double B = sf(0) * sf(0);
    const double eps = draw.uniform(0.05, 0.95) * A;

    // G = F + W with ||W||^2 a random fraction of epsilon.
    const std::vector<Vector> w = draw.dense_family(K, D);
    Eigen::MatrixXcd uw = suborbit::testing::synthesis_matrix(w, D);
    uw *= std::sqrt(draw.uniform(0.0, 1.0) * eps) / Eigen::JacobiSVD<Eigen::MatrixXcd>(uw).singularValues()(0);
    const Eigen::MatrixXcd ug = uf + uw;
    std::vector<Vector> g;
    for (std::size_t k = 0; k < K; ++k) {
      CoordinateVector::Entries e;
      for (Index j = 1; j <= D; ++j) e[j] = ug(j - 1, static_cast<Eigen::Index>(k));
      g.emplace_back(CoordinateVector(std::move(e)));
    }
    ++pairs;

    const PerturbationReport r = perturbation_report(FrameFamily(f), FrameFamily(g), eps, A, B);
    const auto spectral = [](const Eigen::MatrixXcd& m) { return Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues()(0); };
    const auto pinv = [](const Eigen::MatrixXcd& m) {
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(m);
      cod.setThreshold(1e-10);
      return Eigen::MatrixXcd(cod.pseudoInverse());
    };
    const Eigen::MatrixXcd SF = uf * uf.adjoint();
    const Eigen::MatrixXcd SG = ug * ug.adjoint();
    const double gap_u = spectral(uf - ug);
    const double gap_s = spectral(SF - SG);
    const double gap_inv = spectral(pinv(SF) - pinv(SG));
    const double bound_u = std::sqrt(eps);
    const double bound_s = std::sqrt(eps * B) * (2 + std::sqrt(eps / B));
    const double bound_inv = bound_s / (A * A * std::pow(1 - std::sqrt(eps / A), 2));
    const Eigen::VectorXd sg = Eigen::JacobiSVD<Eigen::MatrixXcd>(ug).singularValues();
    const double A_g = sg(sg.size() - 1) * sg(sg.size() - 1);
    const double B_g = sg(0) * sg(0);
    const double new_lower = A * std::pow(1 - std::sqrt(eps / A), 2);
    const double new_upper = B * std::pow(1 + std::sqrt(eps / B), 2);
    const auto kernel = [](const Eigen::MatrixXcd& u) {
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(u);
      cod.setThreshold(1e-10);
      return u.cols() - cod.rank();
    };

    const double margins[] = {gap_u - bound_u, gap_s - bound_s, gap_inv - bound_inv, new_lower - A_g, B_g - new_upper};
    bool ok = kernel(uf) == kernel(ug) && r.excess_original == r.excess_perturbed &&
              r.excess_original == static_cast<std::size_t>(kernel(uf)) && r.all_bounds_hold;
    for (const double m : margins) {
      ok = ok && m <= slack;
      worst = std::max(worst, m);
    }
    // The library's measured gaps must agree with the dense evaluation.
    ok = ok && std::abs(r.synthesis_gap - gap_u) <= 1e-9 * (1 + gap_u) &&
         std::abs(r.frame_op_gap - gap_s) <= 1e-9 * (1 + gap_s) &&
         std::abs(r.inv_frame_op_gap - gap_inv) <= 1e-7 * (1 + gap_inv);
    violations += ok ? 0 : 1;
  }
  return {violations == 0, std::to_string(pairs) + " pairs, " + std::to_string(violations) +
                               " violations, worst (measured - bound) " + num(worst)};
}

Verdict criterion_quadratic_form() {
  Draw draw(20191001);
  std::size_t violations = 0, instances = 0;
  double worst = -1e300;
  for (; instances < 50; ++instances) {
    const auto K = static_cast<std::size_t>(draw.integer(1, 12));
    const Index D = draw.integer(1, 24);
    const std::vector<Vector> f = draw.dense_family(K, D);
    const std::vector<Vector> g = draw.dense_family(K, D);
    const double gap = synthesis_gap(FrameFamily(f), FrameFamily(g));
    for (int trial = 0; trial < 1000; ++trial) {
      // ||sum_k c_k (f_k - g_k)||^2 accumulated coordinate-wise.
      std::vector<Complex> sum(static_cast<std::size_t>(D));
      double c2 = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        const Complex c = draw.complex_unit_box();
        c2 += std::norm(c);
        const auto& fk = std::get<CoordinateVector>(f[k]);
        const auto& gk = std::get<CoordinateVector>(g[k]);
        for (Index j = 1; j <= D; ++j) sum[static_cast<std::size_t>(j - 1)] += c * (fk.coordinate(j) - gk.coordinate(j));
      }
      double form = 0.0;
      for (const Complex& x : sum) form += std::norm(x);
      const double margin = form - (gap * gap * c2 + 1e-9);
      worst = std::max(worst, margin);
      violations += margin > 0 ? 1 : 0;
    }
  }
  return {violations == 0, std::to_string(instances) + " instances x 1000 sequences, " + std::to_string(violations) +
                               " violations, worst (form - bound) " + num(worst)};
}

Verdict criterion_localized(const VerificationTable& t) {
  std::size_t rows_ok = 0;
  for (const auto& row : t.rows) {
    const bool halves = leq(*row.near, *row.bound_near, kRoundingSlack) && leq(*row.far, *row.bound_far, kRoundingSlack);
    rows_ok += (row_holds(row, true) && halves) ? 1 : 0;
  }
  const bool eps_ok = std::abs(t.epsilon - 0.1 * t.lower) <= 1e-15 * t.lower;
  return {rows_ok == 6 && t.rows.size() == 6 && eps_ok,
          "rows " + std::to_string(rows_ok) + "/6 epsilon=" + num(t.epsilon) + " A_emp=" + num(t.lower) +
              " alpha=" + list(t.schedules.front().second.steps)};
}

Verdict criterion_gabor(const VerificationTable& t) {
  const std::vector<std::int64_t> stated_alpha{0, 6, 14, 24};
  const std::vector<std::int64_t> stated_gamma{0, 7, 16, 27};
  const auto integers = [](const PowerSchedule& s) {
    std::vector<std::int64_t> out;
    for (std::size_t k = 1; k <= 4; ++k) {
      const Rational a = s.alpha(k);
      out.push_back(a.den() == 1 ? a.num() : -1);
    }
    return out;
  };
  std::vector<std::int64_t> alpha, gamma;
  for (const auto& [name, s] : t.schedules) (name == "alpha" ? alpha : gamma) = integers(s);
  const bool schedules_ok = alpha == stated_alpha && gamma == stated_gamma;

  std::size_t rows_ok = 0;
  for (const auto& row : t.rows) rows_ok += row_holds(row, false) ? 1 : 0;
  const bool rows_all = rows_ok == t.rows.size() && t.rows.size() == 12;
  const bool eps_ok = t.epsilon == 0.25 && t.eps_approximation;
  return {schedules_ok && rows_all && eps_ok,
          "alpha=" + list(alpha) + " (stated " + list(stated_alpha) + ") gamma=" + list(gamma) + " (stated " +
              list(stated_gamma) + ") rows " + std::to_string(rows_ok) + "/" + std::to_string(t.rows.size()) +
              " eps_approx(2^-2)=" + (eps_ok ? "true" : "false")};
}

Verdict criterion_two_orbit(const ScenarioReport& r) {
  double dependency = -1, reconstruction = -1, excess = -1;
  for (const auto& c : r.checks) {
    if (c.name == "dependency_relation") dependency = c.measured;
    if (c.name == "dual_reconstruction") reconstruction = c.measured;
    if (c.name == "excess_positive") excess = c.measured;
  }
  const std::size_t direct_excess = excess_finite(two_orbit_family(12));
  const bool ok = r.passed() && dependency == 0.0 && reconstruction >= 0 && reconstruction <= 1e-12 &&
                  direct_excess > 0 && excess == static_cast<double>(direct_excess);
  return {ok, "dependency=" + num(dependency) + " reconstruction=" + num(reconstruction) +
                  " excess=" + std::to_string(direct_excess)};
}

Verdict criterion_independence(const std::vector<std::pair<std::string, const VerificationTable*>>& tables) {
  bool ok = true;
  std::string detail;
  for (const auto& [name, t] : tables) {
    const double margin = independence_margin(FrameFamily(t->suborbit));
    ok = ok && margin > kIndependenceThreshold && margin == t->independence_margin;
    detail += (detail.empty() ? "" : " ") + name + "=" + num(margin);
  }
  return {ok, detail};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

Verdict criterion_determinism(const std::filesystem::path& root) {
  const std::vector<std::pair<std::string, std::function<std::string()>>> runs{
      {"finite_support", [] { return to_json(run_finite_support()).dump(2) + table_csv(run_finite_support()); }},
      {"localized", [] { return to_json(run_localized()).dump(2) + table_csv(run_localized()); }},
      {"gabor", [] { return to_json(run_gabor()).dump(2) + table_csv(run_gabor()); }},
      {"two_orbit", [] { return to_json(scenario_two_orbit_example(12, 1, 100)).dump(2); }},
  };
  bool ok = true;
  std::size_t identical = 0;
  for (const auto& [name, run] : runs) {
    for (const char* pass : {"first", "second"}) {
      const auto dir = root / pass;
      std::filesystem::create_directories(dir);
      write(dir / (name + ".json"), run());
    }
    const bool same = slurp(root / "first" / (name + ".json")) == slurp(root / "second" / (name + ".json"));
    ok = ok && same;
    identical += same ? 1 : 0;
  }
  return {ok, std::to_string(identical) + "/" + std::to_string(runs.size()) + " report files byte-identical"};
}

Verdict guarded(const std::function<Verdict()>& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    return {false, std::string("exception: ") + e.what()};
  }
}

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path root =
      argc > 1 ? std::filesystem::path(argv[1]) : std::filesystem::temp_directory_path() / "suborbit_acceptance";
  std::filesystem::remove_all(root);

  std::optional<VerificationTable> finite, localized, gabor;
  const auto keep = [](std::optional<VerificationTable>& slot, VerificationTable (*run)()) {
    try {
      slot = run();
    } catch (const std::exception&) {
    }
  };
  keep(finite, run_finite_support);
  keep(localized, run_localized);
  keep(gabor, run_gabor);
  const auto need = [](const std::optional<VerificationTable>& t, Verdict (*check)(const VerificationTable&),
                       VerificationTable (*run)()) {
    return guarded([&] { return t ? check(*t) : check(run()); });
  };

  const std::vector<std::pair<std::string, Verdict>> verdicts{
      {"finite-support pipeline", need(finite, criterion_finite_support, run_finite_support)},
      {"perturbation suite", guarded(criterion_perturbation)},
      {"quadratic form", guarded(criterion_quadratic_form)},
      {"localized pipeline", need(localized, criterion_localized, run_localized)},
      {"two-operator Gabor pipeline", need(gabor, criterion_gabor, run_gabor)},
      {"two-orbit scenario", guarded([] { return criterion_two_orbit(scenario_two_orbit_example(12, 1, 100)); })},
      {"suborbit independence", guarded([&] {
         if (!finite || !localized || !gabor) return Verdict{false, "a pipeline threw"};
         return criterion_independence({{"finite_support", &*finite}, {"localized", &*localized}, {"gabor", &*gabor}});
       })},
      {"determinism", guarded([&] { return criterion_determinism(root); })},
  };

  int failures = 0;
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    const auto& [name, v] = verdicts[i];
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " " << name << ": " << v.detail << "\n";
    failures += v.pass ? 0 : 1;
  }
  std::cout << (verdicts.size() - static_cast<std::size_t>(failures)) << "/" << verdicts.size() << " criteria pass\n";
  return failures == 0 ? 0 : 1;
}
