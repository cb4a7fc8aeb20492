#pragma once

// Named verification scenarios. Each produces a list of checks, every check
// a measured value against a bound, and is deterministic given its seed.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "suborbit/core_types.hpp"
#include "suborbit/verification.hpp"

namespace suborbit {

struct ScenarioCheck {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct ScenarioReport {
  std::string scenario;
  std::vector<std::pair<std::string, double>> params;
  std::vector<ScenarioCheck> checks;

  bool passed() const;
};

/// {e_k + e_{k+1}}_{k<D} followed by {e_k - e_{k+1}}_{k<D}.
FrameFamily two_orbit_family(Index D);

/// The two-orbit frame in dimension D >= 4: the dependency relation
/// (e1+e2) - (e1-e2) - (e2+e3) - (e2-e3) = 0, the orbit identities under the
/// unweighted right shift, reconstruction with the dual frame {e_k / 2} for
/// `trials` random vectors supported in the first D/2 coordinates, and a
/// positive excess.
ScenarioReport scenario_two_orbit_example(Index D, std::uint64_t seed = 1, std::size_t trials = 100);

/// Independence margin of a constructed suborbit against `threshold`.
ScenarioReport scenario_suborbit_independence(const FrameFamily& suborbit,
                                              double threshold = kIndependenceThreshold);
ScenarioReport scenario_suborbit_independence(const VerificationTable& table,
                                              double threshold = kIndependenceThreshold);

/// Uniform double in [0, 1) from the top 53 bits, identical on every platform.
double unit_uniform(std::uint64_t bits);

}  // namespace suborbit
