#include "suborbit/operators.hpp"

#include <string>

namespace suborbit {

namespace {

void require_nonnegative(Index power) {
  if (power < 0) {
    throw PreconditionError("operator power must be nonnegative, got " + std::to_string(power));
  }
}

const CoordinateVector& as_sequence(const ScaledVector& v) {
  const auto* c = std::get_if<CoordinateVector>(&v.base());
  if (c == nullptr) {
    throw IncompatibleOperands("shift operators act on sequences, not sampled functions");
  }
  return *c;
}

const SampledFunction& as_function(const ScaledVector& v) {
  const auto* f = std::get_if<SampledFunction>(&v.base());
  if (f == nullptr) {
    throw IncompatibleOperands("translation operators act on sampled functions, not sequences");
  }
  return *f;
}

// Grid steps covered by a translation of length t on grid q.
Index grid_steps(const Rational& t, std::int64_t q) {
  const Rational steps = t * q;
  if (!steps.is_integer()) {
    throw GridMismatch("translation by " + to_string(t) + " is off the grid 1/" + std::to_string(q));
  }
  return steps.num();
}

}  // namespace

ScaledVector apply_T_power(const CoordinateVector& v, Index power, double lambda) {
  require_nonnegative(power);
  return ScaledVector(v.shifted(-power), Rational(power), lambda);
}

ScaledVector apply_T_power(const ScaledVector& v, Index power) {
  require_nonnegative(power);
  return ScaledVector(as_sequence(v).shifted(-power), v.exponent() + Rational(power), v.lambda());
}

ScaledVector apply_U_power(const CoordinateVector& v, Index power, double lambda) {
  require_nonnegative(power);
  return ScaledVector(v.shifted(power), Rational(-power), lambda);
}

ScaledVector apply_U_power(const ScaledVector& v, Index power) {
  require_nonnegative(power);
  return ScaledVector(as_sequence(v).shifted(power), v.exponent() - Rational(power), v.lambda());
}

ScaledVector apply(const ShiftPower& op, const CoordinateVector& v) {
  return op.direction == ShiftDirection::left ? apply_T_power(v, op.power, op.lambda)
                                              : apply_U_power(v, op.power, op.lambda);
}

ScaledVector apply_translation_power(const SampledFunction& f, const TranslationPower& op) {
  return apply_translation_power(ScaledVector(f, Rational(0), op.lambda), op);
}

ScaledVector apply_translation_power(const ScaledVector& v, const TranslationPower& op) {
  if (op.power < Rational(0)) {
    throw PreconditionError("translation power must be nonnegative, got " + to_string(op.power));
  }
  if (op.lambda != v.lambda()) {
    throw IncompatibleOperands("operator lambda differs from the vector's lambda");
  }
  const SampledFunction& f = as_function(v);
  const Index s = grid_steps(op.power, f.q());
  // The zeroth power is the identity; no cut applies.
  if (s == 0) return v;
  switch (op.kind) {
    case TranslationKind::T1: {
      // f(x + t) restricted to x >= 0.
      const SampledFunction moved = f.shifted(-s);
      return ScaledVector(moved.restricted(0, std::max<Index>(0, moved.end())), v.exponent() + op.power, v.lambda());
    }
    case TranslationKind::U1:
      return ScaledVector(f.shifted(s), v.exponent() - op.power, v.lambda());
    case TranslationKind::T2: {
      // f(x - t) restricted to cells inside (-inf, L]: i + 1 <= L q.
      const Rational lq = op.cutoff * f.q();
      const Index last = lq.num() >= 0 ? lq.num() / lq.den() : -((-lq.num() + lq.den() - 1) / lq.den());
      const SampledFunction moved = f.shifted(s);
      return ScaledVector(moved.restricted(std::min(moved.start(), last), last), v.exponent() + op.power,
                          v.lambda());
    }
    case TranslationKind::U2:
      return ScaledVector(f.shifted(-s), v.exponent() - op.power, v.lambda());
  }
  throw PreconditionError("unknown translation operator");
}

}  // namespace suborbit
