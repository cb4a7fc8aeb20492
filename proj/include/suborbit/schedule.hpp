#pragma once

// Power schedules alpha(1) = 0 < alpha(2) < ... held exactly as integer
// multiples of 1/denominator, with the rule that produced each gap.

#include <cstdint>
#include <string>
#include <vector>

#include "suborbit/core_types.hpp"

namespace suborbit {

/// Which clause of a schedule rule set a gap alpha(k+1) - alpha(k).
enum class GapRule {
  support,          // the support width m(k), b(k) or L - c(k)
  budget,           // the logarithmic residual-budget term
  closed_form,      // a closed-form schedule
  admissibility,    // alpha(k) + k - 1 in the localized rule
  localization,     // the near-term sum in the localized rule
  explicit_values,  // supplied by the caller
};

std::string to_string(GapRule rule);

struct PowerSchedule {
  /// alpha(k) * denominator for k = 1..size().
  std::vector<std::int64_t> steps;
  std::int64_t denominator = 1;
  /// provenance[k - 1] produced the gap alpha(k+1) - alpha(k).
  std::vector<GapRule> provenance;

  std::size_t size() const { return steps.size(); }
  /// 1-based.
  Rational alpha(std::size_t k) const;
  /// alpha(k+1) - alpha(k).
  Rational gap(std::size_t k) const;
  /// alpha(k) as an integer power; throws PreconditionError when fractional.
  Index integer_alpha(std::size_t k) const;

  /// Throws ScheduleViolation unless alpha(1) = 0 and the steps increase
  /// strictly.
  void validate() const;
};

/// Schedule from explicit values on the grid 1/denominator.
PowerSchedule schedule_from_values(const std::vector<Rational>& alphas, std::int64_t denominator = 1);

}  // namespace suborbit
