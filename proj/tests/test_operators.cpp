#include <doctest.h>

#include <cmath>
#include <numbers>

#include "support.hpp"
#include "suborbit/operators.hpp"

using namespace suborbit;
using suborbit::testing::Draw;

namespace {

const CoordinateVector& seq(const ScaledVector& v) { return std::get<CoordinateVector>(v.base()); }
const SampledFunction& fn(const ScaledVector& v) { return std::get<SampledFunction>(v.base()); }

SampledFunction random_function(Draw& draw, std::int64_t q) {
  std::vector<Complex> samples(static_cast<std::size_t>(draw.integer(1, 3 * q)));
  for (auto& s : samples) s = draw.complex_unit_box();
  return SampledFunction(q, draw.integer(-3 * q, 3 * q), std::move(samples));
}

}  // namespace

TEST_CASE("shift examples") {
  const double lambda = 1.7;
  const CoordinateVector v{{2, 1.0}, {5, Complex(0, 2)}};
  CHECK(seq(apply_T_power(v, 0, lambda)) == v);
  CHECK(apply_T_power(v, 0, lambda).exponent() == Rational(0));

  const ScaledVector t2 = apply_T_power(basis_vector(3), 2, lambda);
  CHECK(seq(t2) == basis_vector(1));
  CHECK(t2.exponent() == Rational(2));
  CHECK(std::get<CoordinateVector>(t2.materialize()).coordinate(1).real() == doctest::Approx(lambda * lambda));
  CHECK(apply_T_power(basis_vector(2), 2, lambda).is_zero());

  const ScaledVector u3 = apply_U_power(basis_vector(1), 3, lambda);
  CHECK(seq(u3) == basis_vector(4));
  CHECK(u3.exponent() == Rational(-3));

  CHECK(seq(apply({ShiftDirection::right, 2, lambda}, basis_vector(1))) == basis_vector(3));
  CHECK(seq(apply({ShiftDirection::left, 2, lambda}, basis_vector(3))) == basis_vector(1));
  CHECK_THROWS_AS(apply_T_power(v, -1, lambda), PreconditionError);
  CHECK_THROWS_AS(apply_U_power(v, 1, 1.0), PreconditionError);
}

TEST_CASE("shift powers compose by index arithmetic") {
  Draw draw(21);
  for (int trial = 0; trial < 300; ++trial) {
    const CoordinateVector v = draw.sparse(60, 10);
    const Index p = draw.integer(0, 20);
    const Index r = draw.integer(0, 20);
    const double lambda = draw.uniform(1.1, 3.0);
    const ScaledVector once = apply_T_power(v, p + r, lambda);
    const ScaledVector twice = apply_T_power(apply_T_power(v, r, lambda), p);
    CHECK(seq(once) == seq(twice));
    CHECK(once.exponent() == twice.exponent());
    const ScaledVector u_once = apply_U_power(v, p + r, lambda);
    const ScaledVector u_twice = apply_U_power(apply_U_power(v, r, lambda), p);
    CHECK(seq(u_once) == seq(u_twice));
    CHECK(u_once.exponent() == u_twice.exponent());
  }
}

TEST_CASE("T^p U^p is the identity and U^p T^p zeroes the first p coordinates") {
  Draw draw(22);
  for (int trial = 0; trial < 300; ++trial) {
    const CoordinateVector v = draw.sparse(40, 10);
    const Index p = draw.integer(0, 30);
    const double lambda = draw.uniform(1.1, 3.0);
    const ScaledVector tu = apply_T_power(apply_U_power(v, p, lambda), p);
    CHECK(seq(tu) == v);
    CHECK(tu.exponent() == Rational(0));
    const ScaledVector ut = apply_U_power(apply_T_power(v, p, lambda), p);
    CHECK(seq(ut) == v.restricted(p + 1, std::numeric_limits<Index>::max()));
  }
}

TEST_CASE("U is a multiple of an isometry") {
  Draw draw(23);
  for (int trial = 0; trial < 200; ++trial) {
    const CoordinateVector v = draw.sparse(40, 10);
    const Index p = draw.integer(0, 5000);
    const double lambda = draw.uniform(1.01, 3.0);
    const LogReal n = apply_U_power(v, p, lambda).norm();
    CHECK(n.log() == doctest::Approx(0.5 * std::log(v.norm_sq()) - static_cast<double>(p) * std::log(lambda))
                         .epsilon(1e-13));
  }
}

TEST_CASE("translation examples on indicators") {
  const double lambda = std::numbers::sqrt2;
  const SampledFunction chi01 = SampledFunction::indicator(16, Rational(0), Rational(1));
  const SampledFunction chi12 = SampledFunction::indicator(16, Rational(1), Rational(2));

  const ScaledVector t1 = apply_translation_power(chi12, {TranslationKind::T1, Rational(1), lambda, {}});
  CHECK(fn(t1) == chi01);
  CHECK(t1.exponent() == Rational(1));

  const ScaledVector u2 = apply_translation_power(chi01, {TranslationKind::U2, Rational(2), lambda, {}});
  CHECK(fn(u2) == SampledFunction::indicator(16, Rational(-2), Rational(-1)));
  CHECK(u2.exponent() == Rational(-2));

  const ScaledVector u1 = apply_translation_power(chi01, {TranslationKind::U1, Rational(5, 16), lambda, {}});
  CHECK(fn(u1) == SampledFunction::indicator(16, Rational(5, 16), Rational(21, 16)));
  CHECK(u1.exponent() == Rational(-5, 16));

  // T1 keeps only x >= 0; T2 keeps only cells inside (-inf, L].
  const ScaledVector cut1 = apply_translation_power(chi01, {TranslationKind::T1, Rational(1, 2), lambda, {}});
  CHECK(fn(cut1) == SampledFunction::indicator(16, Rational(0), Rational(1, 2)));
  const SampledFunction chi_m = SampledFunction::indicator(16, Rational(-1), Rational(0));
  const ScaledVector cut2 = apply_translation_power(chi_m, {TranslationKind::T2, Rational(1, 2), lambda, Rational(0)});
  CHECK(fn(cut2) == SampledFunction::indicator(16, Rational(-1, 2), Rational(0)));

  const ScaledVector zero = apply_translation_power(chi01, {TranslationKind::T1, Rational(0), lambda, {}});
  CHECK(fn(zero) == chi01);

  CHECK_THROWS_AS(apply_translation_power(chi01, {TranslationKind::U1, Rational(1, 3), lambda, {}}), GridMismatch);
  CHECK_THROWS_AS(apply_translation_power(chi01, {TranslationKind::U1, Rational(-1), lambda, {}}), PreconditionError);
  CHECK_THROWS_AS(apply_translation_power(ScaledVector(basis_vector(1), Rational(0), lambda),
                                          {TranslationKind::U1, Rational(1), lambda, {}}),
                  IncompatibleOperands);
}

TEST_CASE("single-step translations compose to the closed form") {
  Draw draw(24);
  const double lambda = 1.3;
  for (int trial = 0; trial < 100; ++trial) {
    const std::int64_t q = draw.integer(1, 8);
    const SampledFunction f = random_function(draw, q);
    const Index steps = draw.integer(0, 64);
    const Rational t(steps, q);
    const Rational cutoff(draw.integer(-2 * q, 2 * q), q);
    for (const auto kind : {TranslationKind::T1, TranslationKind::U1, TranslationKind::T2, TranslationKind::U2}) {
      const TranslationPower closed{kind, t, lambda, cutoff};
      const TranslationPower step{kind, Rational(1, q), lambda, cutoff};
      ScaledVector iterated(f, Rational(0), lambda);
      for (Index i = 0; i < steps; ++i) iterated = apply_translation_power(iterated, step);
      const ScaledVector direct = apply_translation_power(f, closed);
      CHECK(fn(iterated) == fn(direct));
      CHECK(iterated.exponent() == direct.exponent());
    }
  }
}

TEST_CASE("T1 undoes U1 and U2 undoes nothing beyond the cutoff") {
  Draw draw(25);
  for (int trial = 0; trial < 100; ++trial) {
    const std::int64_t q = draw.integer(1, 8);
    SampledFunction f = random_function(draw, q);
    f = f.restricted(0, std::max<Index>(0, f.end()));
    if (f.is_zero()) continue;
    const Rational t(draw.integer(0, 40), q);
    const ScaledVector back = apply_translation_power(
        apply_translation_power(f, {TranslationKind::U1, t, 2.0, {}}), {TranslationKind::T1, t, 2.0, {}});
    CHECK(fn(back) == f);
    CHECK(back.exponent() == Rational(0));
  }
}
