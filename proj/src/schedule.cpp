#include "suborbit/schedule.hpp"

namespace suborbit {

std::string to_string(GapRule rule) {
  switch (rule) {
    case GapRule::support:
      return "support";
    case GapRule::budget:
      return "budget";
    case GapRule::closed_form:
      return "closed_form";
    case GapRule::admissibility:
      return "admissibility";
    case GapRule::localization:
      return "localization";
    case GapRule::explicit_values:
      return "explicit";
  }
  return "unknown";
}

Rational PowerSchedule::alpha(std::size_t k) const {
  if (k < 1 || k > steps.size()) {
    throw IndexError("schedule index " + std::to_string(k) + " outside 1.." + std::to_string(steps.size()));
  }
  return {steps[k - 1], denominator};
}

Rational PowerSchedule::gap(std::size_t k) const { return alpha(k + 1) - alpha(k); }

Index PowerSchedule::integer_alpha(std::size_t k) const {
  const Rational a = alpha(k);
  if (!a.is_integer()) {
    throw PreconditionError("alpha(" + std::to_string(k) + ") = " + to_string(a) + " is not an integer power");
  }
  return a.num();
}

void PowerSchedule::validate() const {
  if (steps.empty()) {
    throw ScheduleViolation("schedule is empty");
  }
  if (denominator <= 0) {
    throw ScheduleViolation("schedule denominator must be positive");
  }
  if (steps.front() != 0) {
    throw ScheduleViolation("alpha(1) must be 0");
  }
  for (std::size_t k = 1; k < steps.size(); ++k) {
    if (steps[k] <= steps[k - 1]) {
      throw ScheduleViolation("schedule not strictly increasing at k = " + std::to_string(k));
    }
  }
}

PowerSchedule schedule_from_values(const std::vector<Rational>& alphas, std::int64_t denominator) {
  PowerSchedule s;
  s.denominator = denominator;
  for (const auto& a : alphas) {
    const Rational scaled = a * denominator;
    if (!scaled.is_integer()) {
      throw GridMismatch("schedule value " + to_string(a) + " is off the grid 1/" + std::to_string(denominator));
    }
    s.steps.push_back(scaled.num());
  }
  if (!s.steps.empty()) s.provenance.assign(s.steps.size() - 1, GapRule::explicit_values);
  s.validate();
  return s;
}

}  // namespace suborbit
