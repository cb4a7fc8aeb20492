#pragma once

// Scaled shifts on l2(N) and truncated scaled translations on L2(R), applied
// in closed form at any power. The lambda factor goes into the exponent of a
// ScaledVector and is never multiplied out.
//
//   T (x1, x2, ...) = lambda (x2, x3, ...)        U (x1, x2, ...) = lambda^{-1} (0, x1, x2, ...)
//   T1 f(x) = lambda f(x+1) chi_[0,inf)(x)        U1 f(x) = lambda^{-1} f(x-1)
//   T2 f(x) = lambda f(x-1) chi_(-inf,L](x)       U2 f(x) = lambda^{-1} f(x+1)

#include "suborbit/core_types.hpp"

namespace suborbit {

enum class ShiftDirection { left, right };

struct ShiftPower {
  ShiftDirection direction = ShiftDirection::left;
  Index power = 0;
  double lambda = 2.0;
};

/// lambda^p times v shifted left by p; coordinates 1..p drop off.
ScaledVector apply_T_power(const CoordinateVector& v, Index power, double lambda);
ScaledVector apply_T_power(const ScaledVector& v, Index power);
/// lambda^{-p} times v shifted right by p.
ScaledVector apply_U_power(const CoordinateVector& v, Index power, double lambda);
ScaledVector apply_U_power(const ScaledVector& v, Index power);
ScaledVector apply(const ShiftPower& op, const CoordinateVector& v);

enum class TranslationKind { T1, U1, T2, U2 };

struct TranslationPower {
  TranslationKind kind = TranslationKind::T1;
  Rational power;  // t >= 0; t * q must be an integer
  double lambda = 2.0;
  Rational cutoff;  // L, used by T2 only
};

/// Closed form of op^t on a sampled function. The T2 cutoff keeps the grid
/// cells [i/q, (i+1)/q) that lie inside (-inf, L]. Throws GridMismatch when
/// t is not a multiple of 1/q.
ScaledVector apply_translation_power(const SampledFunction& f, const TranslationPower& op);
ScaledVector apply_translation_power(const ScaledVector& f, const TranslationPower& op);

}  // namespace suborbit
