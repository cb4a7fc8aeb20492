#include "suborbit/verification.hpp"

#include <algorithm>

namespace suborbit {

Rational Generator::min_exponent() const {
  if (terms.empty()) return {};
  Rational out = terms.front().exponent();
  for (const auto& t : terms) out = std::min(out, t.exponent());
  return out;
}

Rational Generator::max_exponent() const {
  if (terms.empty()) return {};
  Rational out = terms.front().exponent();
  for (const auto& t : terms) out = std::max(out, t.exponent());
  return out;
}

ScaledVector Generator::phi() const {
  if (terms.empty()) {
    throw PreconditionError("generator has no terms");
  }
  std::vector<ScaledVector> kept;
  for (std::size_t n = 1; n <= terms.size(); ++n) {
    if (std::find(skipped.begin(), skipped.end(), n) == skipped.end()) kept.push_back(terms[n - 1]);
  }
  if (kept.empty()) return ScaledVector(zero_like(terms.front().base()), Rational(0), terms.front().lambda());
  return accumulate(kept);
}

}  // namespace suborbit
