#include "suborbit/core_types.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace suborbit {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// exp() stays finite and normal inside this window.
constexpr double kMaxLogScale = 709.0;
constexpr double kMinLogScale = -708.0;

__extension__ typedef __int128 Int128;

}  // namespace

// ---------------------------------------------------------------------------
// Rational
// ---------------------------------------------------------------------------

Rational::Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
  if (den_ == 0) {
    throw PreconditionError("rational with zero denominator");
  }
  if (den_ < 0) {
    num_ = -num_;
    den_ = -den_;
  }
  const std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
  if (g > 1) {
    num_ /= g;
    den_ /= g;
  }
}

Rational Rational::ceil_to_grid(double x, std::int64_t den) {
  if (!std::isfinite(x)) {
    throw RangeError("cannot place a non-finite value on the grid");
  }
  const double scaled = x * static_cast<double>(den);
  const double nearest = std::round(scaled);
  const double snapped =
      std::abs(scaled - nearest) <= 1e-10 * std::max(1.0, std::abs(scaled)) ? nearest : std::ceil(scaled);
  if (std::abs(snapped) > 9.0e15) {
    throw RangeError("grid value exceeds exact integer range");
  }
  return {static_cast<std::int64_t>(snapped), den};
}

Rational operator+(const Rational& a, const Rational& b) {
  const Int128 num = Int128(a.num_) * b.den_ + Int128(b.num_) * a.den_;
  const Int128 den = Int128(a.den_) * b.den_;
  const Int128 limit = Int128(std::numeric_limits<std::int64_t>::max());
  if (num > limit || num < -limit || den > limit) {
    // Reduce before narrowing; the common grids here keep this exact.
    Int128 g = den;
    Int128 n = num < 0 ? -num : num;
    while (n != 0) {
      const Int128 t = g % n;
      g = n;
      n = t;
    }
    if (num / g > limit || num / g < -limit || den / g > limit) {
      throw RangeError("rational overflow");
    }
    return {static_cast<std::int64_t>(num / g), static_cast<std::int64_t>(den / g)};
  }
  return {static_cast<std::int64_t>(num), static_cast<std::int64_t>(den)};
}

Rational operator*(const Rational& a, const Rational& b) {
  const Int128 num = Int128(a.num_) * b.num_;
  const Int128 den = Int128(a.den_) * b.den_;
  const Int128 limit = Int128(std::numeric_limits<std::int64_t>::max());
  Int128 g = den;
  Int128 n = num < 0 ? -num : num;
  while (n != 0) {
    const Int128 t = g % n;
    g = n;
    n = t;
  }
  if (num / g > limit || num / g < -limit || den / g > limit) {
    throw RangeError("rational overflow");
  }
  return {static_cast<std::int64_t>(num / g), static_cast<std::int64_t>(den / g)};
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  const Int128 lhs = Int128(a.num_) * b.den_;
  const Int128 rhs = Int128(b.num_) * a.den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::string to_string(const Rational& r) {
  if (r.is_integer()) {
    return std::to_string(r.num());
  }
  return std::to_string(r.num()) + "/" + std::to_string(r.den());
}

// ---------------------------------------------------------------------------
// LogReal
// ---------------------------------------------------------------------------

LogReal LogReal::normalized(double mantissa, std::int64_t exponent) {
  LogReal r;
  if (mantissa == 0.0) return r;
  if (std::isinf(mantissa)) {
    r.mantissa_ = mantissa;
    return r;
  }
  int shift = 0;
  r.mantissa_ = std::frexp(mantissa, &shift);
  r.exponent_ = exponent + shift;
  return r;
}

LogReal::LogReal(double value) {
  if (std::isnan(value) || value < 0.0) {
    throw PreconditionError("LogReal requires a nonnegative value");
  }
  *this = normalized(value, 0);
}

LogReal LogReal::from_binary(std::int64_t exponent) { return normalized(0.5, exponent + 1); }

LogReal LogReal::from_log(double log_value) {
  if (std::isnan(log_value)) {
    throw PreconditionError("LogReal logarithm is NaN");
  }
  if (log_value == kNegInf) return {};
  if (std::isinf(log_value)) return normalized(log_value, 0);
  const double exponent = std::floor(log_value / std::numbers::ln2);
  return normalized(std::exp(log_value - exponent * std::numbers::ln2), static_cast<std::int64_t>(exponent));
}

double LogReal::log() const {
  if (is_zero()) return kNegInf;
  return std::log(mantissa_) + static_cast<double>(exponent_) * std::numbers::ln2;
}

double LogReal::value() const {
  if (is_zero() || std::isinf(mantissa_)) return mantissa_;
  // Clamp so that ldexp sees an int; beyond +-4096 the result is 0 or inf anyway.
  const auto e = static_cast<int>(std::clamp<std::int64_t>(exponent_, -4096, 4096));
  return std::ldexp(mantissa_, e);
}

LogReal& LogReal::operator+=(const LogReal& other) {
  if (other.is_zero()) return *this;
  if (is_zero() || std::isinf(other.mantissa_)) return *this = other;
  if (std::isinf(mantissa_)) return *this;
  const bool mine_larger = exponent_ >= other.exponent_;
  const LogReal& hi = mine_larger ? *this : other;
  const LogReal& lo = mine_larger ? other : *this;
  const std::int64_t gap = hi.exponent_ - lo.exponent_;
  // Past 64 binary places the smaller term cannot change the sum.
  const double m = gap > 64 ? hi.mantissa_ : hi.mantissa_ + std::ldexp(lo.mantissa_, -static_cast<int>(gap));
  return *this = normalized(m, hi.exponent_);
}

LogReal operator*(const LogReal& a, const LogReal& b) {
  if (a.is_zero() || b.is_zero()) return {};
  return LogReal::normalized(a.mantissa_ * b.mantissa_, a.exponent_ + b.exponent_);
}

LogReal operator/(const LogReal& a, const LogReal& b) {
  if (b.is_zero()) {
    throw RangeError("LogReal division by zero");
  }
  if (a.is_zero()) return {};
  return LogReal::normalized(a.mantissa_ / b.mantissa_, a.exponent_ - b.exponent_);
}

LogReal sqrt(const LogReal& a) {
  if (a.is_zero() || std::isinf(a.mantissa_)) return a;
  // Even exponent so that it halves exactly.
  const bool odd = (a.exponent_ % 2) != 0;
  const double m = odd ? 2.0 * a.mantissa_ : a.mantissa_;
  const std::int64_t e = odd ? a.exponent_ - 1 : a.exponent_;
  return LogReal::normalized(std::sqrt(m), e / 2);
}

LogReal pow(const LogReal& a, double p) {
  if (a.is_zero()) {
    return p > 0 ? LogReal{} : LogReal(1.0);
  }
  if (p == 1.0) return a;
  if (p == 2.0) return a * a;
  if (p == 0.5) return sqrt(a);
  return LogReal::from_log(p * a.log());
}

std::partial_ordering operator<=>(const LogReal& a, const LogReal& b) {
  if (a.is_zero() || b.is_zero() || std::isinf(a.mantissa_) || std::isinf(b.mantissa_) ||
      a.exponent_ == b.exponent_) {
    return a.mantissa_ <=> b.mantissa_;
  }
  return a.exponent_ <=> b.exponent_;
}

bool leq(const LogReal& a, const LogReal& b, double rel_slack) {
  if (a.is_zero()) return true;
  if (b.is_zero()) return false;
  return a <= b * LogReal(1.0 + rel_slack);
}

namespace {

// lambda^d by halving d until std::pow stays inside the normal range.
LogReal power_split(double lambda, double d, int depth) {
  const double p = std::pow(lambda, d);
  if ((std::isnormal(p) && p < 1e300 && p > 1e-300) || depth > 64) {
    return depth > 64 ? LogReal::from_log(d * std::log(lambda)) : LogReal(p);
  }
  const LogReal half = power_split(lambda, 0.5 * d, depth + 1);
  return half * half;
}

// sqrt(2)^d = 2^{d/2}; exact whenever d is an even integer.
LogReal sqrt2_power(double d) {
  const double h = 0.5 * d;
  const double whole = std::floor(h);
  return LogReal(std::exp2(h - whole)) * LogReal::from_binary(static_cast<std::int64_t>(whole));
}

}  // namespace

LogReal lambda_power(double lambda, const Rational& exponent) {
  if (!(lambda > 0.0)) {
    throw PreconditionError("lambda_power needs lambda > 0");
  }
  // The double nearest sqrt(2) is read as sqrt(2) itself, so that its even
  // powers are exact powers of two.
  if (lambda == std::numbers::sqrt2) return sqrt2_power(exponent.to_double());
  return power_split(lambda, exponent.to_double(), 0);
}

// ---------------------------------------------------------------------------
// CoordinateVector
// ---------------------------------------------------------------------------

CoordinateVector::CoordinateVector(Entries entries, std::optional<Index> support_bound)
    : support_bound_(support_bound) {
  if (support_bound_ && *support_bound_ < 1) {
    throw IndexError("support_bound must be a positive integer");
  }
  for (const auto& [j, amplitude] : entries) {
    if (j < 1) {
      throw IndexError("coordinate index " + std::to_string(j) + " is below 1");
    }
    if (support_bound_ && j > *support_bound_) {
      throw IndexError("coordinate index " + std::to_string(j) + " exceeds support_bound " +
                       std::to_string(*support_bound_));
    }
    if (amplitude != Complex(0.0, 0.0)) {
      entries_.emplace(j, amplitude);
    }
  }
}

Complex CoordinateVector::coordinate(Index j) const {
  const auto it = entries_.find(j);
  return it == entries_.end() ? Complex{} : it->second;
}

double CoordinateVector::norm_sq() const {
  double sum = 0.0;
  for (const auto& [j, a] : entries_) sum += std::norm(a);
  return sum;
}

CoordinateVector CoordinateVector::shifted(Index offset) const {
  CoordinateVector out;
  for (const auto& [j, a] : entries_) {
    if (j + offset >= 1) out.entries_.emplace_hint(out.entries_.end(), j + offset, a);
  }
  return out;
}

CoordinateVector CoordinateVector::scaled(Complex factor) const {
  CoordinateVector out;
  if (factor == Complex{}) return out;
  for (const auto& [j, a] : entries_) {
    const Complex v = a * factor;
    if (v != Complex{}) out.entries_.emplace_hint(out.entries_.end(), j, v);
  }
  return out;
}

CoordinateVector CoordinateVector::restricted(Index first, Index last) const {
  CoordinateVector out;
  for (auto it = entries_.lower_bound(first); it != entries_.end() && it->first <= last; ++it) {
    out.entries_.emplace_hint(out.entries_.end(), it->first, it->second);
  }
  return out;
}

CoordinateVector operator+(const CoordinateVector& a, const CoordinateVector& b) {
  CoordinateVector out = a;
  out.support_bound_.reset();
  for (const auto& [j, v] : b.entries_) {
    auto [it, inserted] = out.entries_.emplace(j, v);
    if (!inserted) {
      it->second += v;
      if (it->second == Complex{}) out.entries_.erase(it);
    }
  }
  return out;
}

CoordinateVector operator-(const CoordinateVector& a, const CoordinateVector& b) {
  return a + b.scaled(-1.0);
}

CoordinateVector basis_vector(Index k) {
  if (k < 1) {
    throw IndexError("basis_vector index must be >= 1");
  }
  return CoordinateVector({{k, Complex(1.0, 0.0)}});
}

// ---------------------------------------------------------------------------
// SampledFunction
// ---------------------------------------------------------------------------

SampledFunction::SampledFunction(std::int64_t q, Index start, std::vector<Complex> samples)
    : q_(q), start_(start), samples_(std::move(samples)) {
  if (q_ <= 0) {
    throw PreconditionError("grid denominator q must be positive");
  }
  trim();
}

void SampledFunction::trim() {
  const auto nonzero = [](const Complex& z) { return z != Complex{}; };
  const auto first = std::find_if(samples_.begin(), samples_.end(), nonzero);
  if (first == samples_.end()) {
    samples_.clear();
    start_ = 0;
    return;
  }
  const auto last = std::find_if(samples_.rbegin(), samples_.rend(), nonzero).base();
  start_ += static_cast<Index>(first - samples_.begin());
  samples_ = std::vector<Complex>(first, last);
}

SampledFunction SampledFunction::indicator(std::int64_t q, const Rational& left, const Rational& right) {
  const Rational lq = left * q;
  const Rational rq = right * q;
  if (!lq.is_integer() || !rq.is_integer()) {
    throw GridMismatch("indicator endpoints must lie on the grid 1/" + std::to_string(q));
  }
  if (rq.num() < lq.num()) {
    throw PreconditionError("indicator needs left <= right");
  }
  return SampledFunction(q, lq.num(), std::vector<Complex>(static_cast<std::size_t>(rq.num() - lq.num()), 1.0));
}

Complex SampledFunction::at(Index i) const {
  if (i < start_ || i >= end()) return {};
  return samples_[static_cast<std::size_t>(i - start_)];
}

double SampledFunction::norm_sq() const {
  double sum = 0.0;
  for (const auto& s : samples_) sum += std::norm(s);
  return sum / static_cast<double>(q_);
}

SampledFunction SampledFunction::shifted(Index steps) const {
  SampledFunction out = *this;
  if (!out.is_zero()) out.start_ += steps;
  return out;
}

SampledFunction SampledFunction::restricted(Index first, Index last) const {
  const Index lo = std::max(first, start_);
  const Index hi = std::min(last, end());
  if (lo >= hi) return SampledFunction(q_);
  return SampledFunction(q_, lo,
                         std::vector<Complex>(samples_.begin() + (lo - start_), samples_.begin() + (hi - start_)));
}

SampledFunction SampledFunction::scaled(Complex factor) const {
  std::vector<Complex> out(samples_.size());
  std::transform(samples_.begin(), samples_.end(), out.begin(), [&](const Complex& z) { return z * factor; });
  return SampledFunction(q_, start_, std::move(out));
}

SampledFunction SampledFunction::modulated(double freq) const {
  std::vector<Complex> out(samples_.size());
  for (std::size_t n = 0; n < samples_.size(); ++n) {
    // Reduce the phase to [0, 1) turns before multiplying by 2 pi.
    double turns = freq * static_cast<double>(start_ + static_cast<Index>(n)) / static_cast<double>(q_);
    turns -= std::floor(turns);
    out[n] = samples_[n] * std::polar(1.0, 2.0 * std::numbers::pi * turns);
  }
  return SampledFunction(q_, start_, std::move(out));
}

namespace {

SampledFunction combine(const SampledFunction& a, const SampledFunction& b, double sign) {
  if (a.q() != b.q()) {
    throw IncompatibleOperands("sampled functions live on different grids");
  }
  if (a.is_zero()) return b.scaled(sign);
  if (b.is_zero()) return a;
  const Index lo = std::min(a.start(), b.start());
  const Index hi = std::max(a.end(), b.end());
  std::vector<Complex> out(static_cast<std::size_t>(hi - lo));
  for (Index i = lo; i < hi; ++i) out[static_cast<std::size_t>(i - lo)] = a.at(i) + sign * b.at(i);
  return SampledFunction(a.q(), lo, std::move(out));
}

}  // namespace

SampledFunction operator+(const SampledFunction& a, const SampledFunction& b) { return combine(a, b, 1.0); }
SampledFunction operator-(const SampledFunction& a, const SampledFunction& b) { return combine(a, b, -1.0); }

// ---------------------------------------------------------------------------
// Vector
// ---------------------------------------------------------------------------

Complex inner(const CoordinateVector& u, const CoordinateVector& v) {
  Complex sum{};
  const auto& ue = u.entries();
  const auto& ve = v.entries();
  auto it = ue.begin();
  auto jt = ve.begin();
  while (it != ue.end() && jt != ve.end()) {
    if (it->first < jt->first) {
      ++it;
    } else if (jt->first < it->first) {
      ++jt;
    } else {
      sum += it->second * std::conj(jt->second);
      ++it;
      ++jt;
    }
  }
  return sum;
}

Complex inner(const SampledFunction& u, const SampledFunction& v) {
  if (u.q() != v.q()) {
    throw IncompatibleOperands("inner product of functions on grids 1/" + std::to_string(u.q()) + " and 1/" +
                               std::to_string(v.q()));
  }
  Complex sum{};
  const Index lo = std::max(u.start(), v.start());
  const Index hi = std::min(u.end(), v.end());
  for (Index i = lo; i < hi; ++i) sum += u.at(i) * std::conj(v.at(i));
  return sum / static_cast<double>(u.q());
}

Complex inner(const Vector& u, const Vector& v) {
  if (u.index() != v.index()) {
    throw IncompatibleOperands("inner product of a " + kind_name(u) + " and a " + kind_name(v));
  }
  if (const auto* cu = std::get_if<CoordinateVector>(&u)) {
    return inner(*cu, std::get<CoordinateVector>(v));
  }
  return inner(std::get<SampledFunction>(u), std::get<SampledFunction>(v));
}

double norm_sq(const Vector& u) {
  return std::visit([](const auto& x) { return x.norm_sq(); }, u);
}

bool is_zero(const Vector& u) {
  return std::visit([](const auto& x) { return x.is_zero(); }, u);
}

Vector scaled(const Vector& u, Complex factor) {
  return std::visit([&](const auto& x) -> Vector { return x.scaled(factor); }, u);
}

Vector add(const Vector& u, const Vector& v) {
  if (u.index() != v.index()) {
    throw IncompatibleOperands("cannot add a " + kind_name(u) + " and a " + kind_name(v));
  }
  if (const auto* cu = std::get_if<CoordinateVector>(&u)) {
    return *cu + std::get<CoordinateVector>(v);
  }
  return std::get<SampledFunction>(u) + std::get<SampledFunction>(v);
}

Vector subtract(const Vector& u, const Vector& v) { return add(u, scaled(v, -1.0)); }

Vector zero_like(const Vector& u) {
  if (const auto* f = std::get_if<SampledFunction>(&u)) return SampledFunction(f->q());
  return CoordinateVector{};
}

std::string kind_name(const Vector& u) {
  return std::holds_alternative<CoordinateVector>(u) ? "sequence" : "sampled function";
}

// ---------------------------------------------------------------------------
// ScaledVector
// ---------------------------------------------------------------------------

ScaledVector::ScaledVector(Vector base, Rational exponent, double lambda)
    : base_(std::move(base)), exponent_(exponent), lambda_(lambda) {
  if (!(lambda_ > 1.0) || !std::isfinite(lambda_)) {
    throw PreconditionError("lambda must be a finite real > 1");
  }
}

LogReal ScaledVector::norm_sq() const {
  return LogReal(suborbit::norm_sq(base_)) * lambda_power(lambda_, exponent_ * 2);
}

ScaledVector ScaledVector::renormalized() const {
  const double n2 = suborbit::norm_sq(base_);
  if (n2 == 0.0) return *this;
  const double log_lambda = std::log(lambda_);
  const auto shift = static_cast<std::int64_t>(std::llround(0.5 * std::log(n2) / log_lambda));
  if (shift == 0) return *this;
  // Two half steps so that neither factor overflows for extreme bases.
  const double half = lambda_power(lambda_, Rational(-shift, 2)).value();
  return ScaledVector(suborbit::scaled(suborbit::scaled(base_, half), half), exponent_ + Rational(shift), lambda_);
}

Vector ScaledVector::materialize() const {
  const double log_scale = exponent_.to_double() * std::log(lambda_);
  if (log_scale > kMaxLogScale || log_scale < kMinLogScale) {
    throw RangeError("lambda^" + to_string(exponent_) + " is outside double range");
  }
  return suborbit::scaled(base_, lambda_power(lambda_, exponent_).value());
}

bool same_vector(const ScaledVector& a, const ScaledVector& b, double rel_tol) {
  if (a.lambda() != b.lambda()) {
    throw IncompatibleOperands("scaled vectors with different lambda");
  }
  if (a.is_zero() || b.is_zero()) return a.is_zero() && b.is_zero();
  const ScaledVector ra = a.renormalized();
  const ScaledVector rb = b.renormalized();
  const Rational top = std::max(ra.exponent(), rb.exponent());
  const Vector va = suborbit::scaled(ra.base(), lambda_power(a.lambda(), ra.exponent() - top).value());
  const Vector vb = suborbit::scaled(rb.base(), lambda_power(a.lambda(), rb.exponent() - top).value());
  const double diff = suborbit::norm_sq(subtract(va, vb));
  const double scale = std::max(suborbit::norm_sq(va), suborbit::norm_sq(vb));
  return diff <= rel_tol * rel_tol * scale;
}

ScaledVector accumulate(std::span<const ScaledVector> terms) {
  if (terms.empty()) {
    throw PreconditionError("accumulate needs at least one term");
  }
  const double lambda = terms.front().lambda();
  std::vector<ScaledVector> live;
  for (const auto& t : terms) {
    if (t.lambda() != lambda) {
      throw IncompatibleOperands("accumulating scaled vectors with different lambda");
    }
    if (!t.is_zero()) live.push_back(t.renormalized());
  }
  if (live.empty()) return ScaledVector(zero_like(terms.front().base()), Rational(0), lambda);
  Rational top = live.front().exponent();
  for (const auto& t : live) top = std::max(top, t.exponent());
  Vector sum = zero_like(live.front().base());
  for (const auto& t : live) {
    const double factor = lambda_power(lambda, t.exponent() - top).value();
    if (factor > 0.0) sum = add(sum, suborbit::scaled(t.base(), factor));
  }
  return ScaledVector(std::move(sum), top, lambda);
}

// ---------------------------------------------------------------------------
// FrameFamily
// ---------------------------------------------------------------------------

FrameFamily::FrameFamily(std::vector<Vector> elements, std::optional<double> declared_lower,
                         std::optional<double> declared_upper)
    : elements_(std::move(elements)), lower_(declared_lower), upper_(declared_upper) {
  if (elements_.empty()) {
    throw PreconditionError("frame family must be nonempty");
  }
  const auto kind = elements_.front().index();
  for (const auto& e : elements_) {
    if (e.index() != kind) {
      throw IncompatibleOperands("frame family mixes sequences and sampled functions");
    }
  }
  if (const auto* f = std::get_if<SampledFunction>(&elements_.front())) {
    for (const auto& e : elements_) {
      if (std::get<SampledFunction>(e).q() != f->q()) {
        throw IncompatibleOperands("frame family mixes sampling grids");
      }
    }
  }
  if (lower_ && !(*lower_ > 0.0)) throw PreconditionError("declared lower frame bound must be positive");
  if (upper_ && !(*upper_ > 0.0)) throw PreconditionError("declared upper frame bound must be positive");
  if (lower_ && upper_ && *lower_ > *upper_) {
    throw PreconditionError("declared frame bounds need A <= B");
  }
}

const Vector& FrameFamily::element(std::size_t k) const {
  if (k < 1 || k > elements_.size()) {
    throw IndexError("frame index " + std::to_string(k) + " outside 1.." + std::to_string(elements_.size()));
  }
  return elements_[k - 1];
}

FrameFamily FrameFamily::section(std::size_t n) const {
  if (n == 0 || n > elements_.size()) {
    throw IndexError("section size " + std::to_string(n) + " outside 1.." + std::to_string(elements_.size()));
  }
  return FrameFamily(std::vector<Vector>(elements_.begin(), elements_.begin() + static_cast<std::ptrdiff_t>(n)),
                     lower_, upper_);
}

}  // namespace suborbit
