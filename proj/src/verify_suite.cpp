#include "suborbit/verify_suite.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "suborbit/frame_algebra.hpp"

namespace suborbit {

bool ScenarioReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const ScenarioCheck& c) { return c.pass; });
}

double unit_uniform(std::uint64_t bits) { return std::ldexp(static_cast<double>(bits >> 11), -53); }

FrameFamily two_orbit_family(Index D) {
  if (D < 4) {
    throw PreconditionError("the two-orbit scenario needs D >= 4");
  }
  std::vector<Vector> elements;
  for (const double sign : {1.0, -1.0}) {
    for (Index k = 1; k < D; ++k) {
      elements.emplace_back(CoordinateVector{{k, Complex(1.0)}, {k + 1, Complex(sign)}});
    }
  }
  return FrameFamily(std::move(elements));
}

ScenarioReport scenario_two_orbit_example(Index D, std::uint64_t seed, std::size_t trials) {
  const FrameFamily family = two_orbit_family(D);
  const auto plus = [&](Index k) { return std::get<CoordinateVector>(family.element(static_cast<std::size_t>(k))); };
  const auto minus = [&](Index k) {
    return std::get<CoordinateVector>(family.element(static_cast<std::size_t>(D - 1 + k)));
  };

  ScenarioReport report;
  report.scenario = "two_orbit";
  report.params = {{"D", static_cast<double>(D)},
                   {"seed", static_cast<double>(seed)},
                   {"trials", static_cast<double>(trials)}};

  const CoordinateVector relation = plus(1) - minus(1) - plus(2) - minus(2);
  report.checks.push_back({"dependency_relation", std::sqrt(relation.norm_sq()), 0.0, relation.is_zero()});

  // The orbit of e1 +- e2 under the unweighted shift e_k -> e_{k+1}.
  std::size_t mismatches = 0;
  for (Index n = 0; n < D - 2; ++n) {
    if (plus(1).shifted(n) != plus(n + 1)) ++mismatches;
    if (minus(1).shifted(n) != minus(n + 1)) ++mismatches;
  }
  report.checks.push_back({"orbit_identity", static_cast<double>(mismatches), 0.0, mismatches == 0});

  std::mt19937_64 rng(seed);
  const Index interior = D / 2;
  double worst = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    CoordinateVector::Entries entries;
    for (Index j = 1; j <= interior; ++j) {
      const double re = 2.0 * unit_uniform(rng()) - 1.0;
      const double im = 2.0 * unit_uniform(rng()) - 1.0;
      entries.emplace(j, Complex(re, im));
    }
    const CoordinateVector f(std::move(entries));
    CoordinateVector rebuilt;
    for (Index k = 1; k < D; ++k) {
      const Complex c = inner(f, basis_vector(k)) * 0.5;
      rebuilt = rebuilt + c * plus(k) + c * minus(k);
    }
    worst = std::max(worst, std::sqrt((f - rebuilt).norm_sq()));
  }
  report.checks.push_back({"dual_reconstruction", worst, 1e-12, worst <= 1e-12});

  const auto excess = static_cast<double>(excess_finite(family));
  report.checks.push_back({"excess_positive", excess, 0.0, excess > 0.0});
  return report;
}

ScenarioReport scenario_suborbit_independence(const FrameFamily& suborbit, double threshold) {
  ScenarioReport report;
  report.scenario = "suborbit_independence";
  report.params = {{"size", static_cast<double>(suborbit.size())}, {"threshold", threshold}};
  const double margin = independence_margin(suborbit);
  report.checks.push_back({"independence_margin", margin, threshold, margin > threshold});
  return report;
}

ScenarioReport scenario_suborbit_independence(const VerificationTable& table, double threshold) {
  ScenarioReport report;
  report.scenario = "suborbit_independence";
  report.params = {{"size", static_cast<double>(table.section_size)}, {"threshold", threshold}};
  report.checks.push_back({"independence_margin", table.independence_margin, threshold,
                           table.independence_margin > threshold});
  return report;
}

}  // namespace suborbit
