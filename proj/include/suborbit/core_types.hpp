#pragma once

#include <compare>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace suborbit {

using Complex = std::complex<double>;
using Index = std::int64_t;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands of different kinds, or functions sampled on different grids.
class IncompatibleOperands : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class DegenerateFamily : public Error {
 public:
  using Error::Error;
};

/// A power schedule that does not keep the generator blocks apart.
class ScheduleViolation : public Error {
 public:
  using Error::Error;
};

/// Materializing a scaled quantity whose scale is not a finite double.
class RangeError : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Rational: exact exponents and grid positions
// ---------------------------------------------------------------------------

class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  bool is_integer() const { return den_ == 1; }

  /// Smallest multiple of 1/den that is >= x. Values within 1e-10 (relative)
  /// of a grid point snap to it, so exact formulas are not bumped by rounding
  /// noise in logarithms.
  static Rational ceil_to_grid(double x, std::int64_t den);

  Rational operator-() const { return {-num_, den_}; }
  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
  friend Rational operator*(const Rational& a, std::int64_t k) { return {a.num_ * k, a.den_}; }
  friend Rational operator*(const Rational& a, const Rational& b);
  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

std::string to_string(const Rational& r);

// ---------------------------------------------------------------------------
// LogReal: nonnegative reals with an unbounded binary exponent
// ---------------------------------------------------------------------------

/// Nonnegative real number held as mantissa * 2^exponent with the mantissa in
/// [1/2, 1). Products of lambda^{+-alpha(k)} with alpha(k) = O(k^2) stay
/// representable, and values inside double range convert back exactly.
class LogReal {
 public:
  LogReal() = default;  // zero
  explicit LogReal(double value);
  static LogReal from_log(double log_value);
  /// 2^exponent, exact.
  static LogReal from_binary(std::int64_t exponent);

  /// Natural logarithm; -inf for zero.
  double log() const;
  /// mantissa * 2^exponent; underflows to 0 or overflows to inf like any double.
  double value() const;
  bool is_zero() const { return mantissa_ == 0.0; }

  LogReal& operator+=(const LogReal& other);
  friend LogReal operator+(LogReal a, const LogReal& b) { return a += b; }
  friend LogReal operator*(const LogReal& a, const LogReal& b);
  friend LogReal operator/(const LogReal& a, const LogReal& b);
  friend LogReal sqrt(const LogReal& a);
  friend LogReal pow(const LogReal& a, double p);

  friend bool operator==(const LogReal& a, const LogReal& b) = default;
  friend std::partial_ordering operator<=>(const LogReal& a, const LogReal& b);

 private:
  static LogReal normalized(double mantissa, std::int64_t exponent);

  double mantissa_ = 0.0;  // 0, inf, or in [1/2, 1)
  std::int64_t exponent_ = 0;
};

/// a <= b * (1 + rel_slack), evaluated in the log domain.
bool leq(const LogReal& a, const LogReal& b, double rel_slack = 0.0);

/// lambda^{exponent} as a LogReal. The double nearest sqrt(2) counts as
/// sqrt(2) exactly.
LogReal lambda_power(double lambda, const Rational& exponent);

// ---------------------------------------------------------------------------
// CoordinateVector: finitely supported vector in l2(N), indices from 1
// ---------------------------------------------------------------------------

class CoordinateVector {
 public:
  using Entries = std::map<Index, Complex>;

  CoordinateVector() = default;
  /// Zero amplitudes are dropped. Throws IndexError for an index < 1 or
  /// above support_bound.
  explicit CoordinateVector(Entries entries, std::optional<Index> support_bound = std::nullopt);
  CoordinateVector(std::initializer_list<std::pair<const Index, Complex>> entries)
      : CoordinateVector(Entries(entries)) {}

  const Entries& entries() const { return entries_; }
  std::optional<Index> support_bound() const { return support_bound_; }
  Complex coordinate(Index j) const;
  bool is_zero() const { return entries_.empty(); }
  std::size_t nnz() const { return entries_.size(); }
  /// Largest stored index; 0 for the zero vector.
  Index max_index() const { return entries_.empty() ? 0 : entries_.rbegin()->first; }
  Index min_index() const { return entries_.empty() ? 0 : entries_.begin()->first; }
  double norm_sq() const;

  /// Moves coordinate j to j + offset; coordinates landing below 1 are dropped.
  CoordinateVector shifted(Index offset) const;
  CoordinateVector scaled(Complex factor) const;
  /// Keeps coordinates with first <= j <= last.
  CoordinateVector restricted(Index first, Index last) const;

  friend CoordinateVector operator+(const CoordinateVector& a, const CoordinateVector& b);
  friend CoordinateVector operator-(const CoordinateVector& a, const CoordinateVector& b);
  friend CoordinateVector operator*(Complex factor, const CoordinateVector& v) { return v.scaled(factor); }
  friend bool operator==(const CoordinateVector& a, const CoordinateVector& b) {
    return a.entries_ == b.entries_;
  }

 private:
  Entries entries_;
  std::optional<Index> support_bound_;
};

/// The canonical basis vector e_k.
CoordinateVector basis_vector(Index k);

// ---------------------------------------------------------------------------
// SampledFunction: compactly supported function on the grid {i/q}
// ---------------------------------------------------------------------------

/// Left-endpoint samples on the grid {i/q}: sample i stands for the cell
/// [i/q, (i+1)/q). chi_[0,1] at grid q is q samples of value 1 at
/// i = 0, ..., q-1, so translation by 1/q is an index shift.
class SampledFunction {
 public:
  explicit SampledFunction(std::int64_t q, Index start = 0, std::vector<Complex> samples = {});

  /// chi_[left, right) on grid q; both ends must lie on the grid.
  static SampledFunction indicator(std::int64_t q, const Rational& left, const Rational& right);

  std::int64_t q() const { return q_; }
  Index start() const { return start_; }
  /// One past the last stored sample index.
  Index end() const { return start_ + static_cast<Index>(samples_.size()); }
  const std::vector<Complex>& samples() const { return samples_; }
  bool is_zero() const { return samples_.empty(); }
  Complex at(Index i) const;
  double norm_sq() const;

  /// Smallest closed interval [left, right] containing the support.
  Rational support_left() const { return {start_, q_}; }
  Rational support_right() const { return {end(), q_}; }

  SampledFunction shifted(Index steps) const;
  /// Keeps samples with first <= i < last.
  SampledFunction restricted(Index first, Index last) const;
  SampledFunction scaled(Complex factor) const;
  /// x -> exp(2 pi i freq x) f(x), sample by sample.
  SampledFunction modulated(double freq) const;

  friend SampledFunction operator+(const SampledFunction& a, const SampledFunction& b);
  friend SampledFunction operator-(const SampledFunction& a, const SampledFunction& b);
  friend bool operator==(const SampledFunction& a, const SampledFunction& b) = default;

 private:
  void trim();

  std::int64_t q_ = 1;
  Index start_ = 0;
  std::vector<Complex> samples_;
};

// ---------------------------------------------------------------------------
// Vector: either kind, with the shared inner product
// ---------------------------------------------------------------------------

using Vector = std::variant<CoordinateVector, SampledFunction>;

Complex inner(const CoordinateVector& u, const CoordinateVector& v);
Complex inner(const SampledFunction& u, const SampledFunction& v);
/// Linear in u, conjugate-linear in v. Throws IncompatibleOperands on a kind
/// or grid mismatch.
Complex inner(const Vector& u, const Vector& v);

double norm_sq(const Vector& u);
bool is_zero(const Vector& u);
Vector scaled(const Vector& u, Complex factor);
Vector add(const Vector& u, const Vector& v);
Vector subtract(const Vector& u, const Vector& v);
Vector zero_like(const Vector& u);
std::string kind_name(const Vector& u);

// ---------------------------------------------------------------------------
// ScaledVector: lambda^e * base with an exact exponent
// ---------------------------------------------------------------------------

class ScaledVector {
 public:
  ScaledVector(Vector base, Rational exponent, double lambda);

  const Vector& base() const { return base_; }
  const Rational& exponent() const { return exponent_; }
  double lambda() const { return lambda_; }
  bool is_zero() const { return suborbit::is_zero(base_); }

  LogReal norm_sq() const;
  LogReal norm() const { return sqrt(norm_sq()); }

  /// Same vector with the magnitude of base moved into the exponent, so that
  /// ||base|| lies in [lambda^{-1/2}, lambda^{1/2}].
  ScaledVector renormalized() const;

  /// Plain vector lambda^e * base. Throws RangeError when lambda^e is not a
  /// finite, normal double.
  Vector materialize() const;

 private:
  Vector base_;
  Rational exponent_;
  double lambda_;
};

/// Whether a and b represent the same vector up to rel_tol (relative to the
/// larger norm), comparing after shifting both to a common exponent.
bool same_vector(const ScaledVector& a, const ScaledVector& b, double rel_tol = 1e-12);

/// Sum of terms sharing one lambda. The result carries the exponent of the
/// largest term; contributions below double range relative to it vanish.
ScaledVector accumulate(std::span<const ScaledVector> terms);

// ---------------------------------------------------------------------------
// FrameFamily
// ---------------------------------------------------------------------------

class FrameFamily {
 public:
  /// Nonempty, one vector kind, one grid. Declared bounds need 0 < A <= B.
  explicit FrameFamily(std::vector<Vector> elements,
                       std::optional<double> declared_lower = std::nullopt,
                       std::optional<double> declared_upper = std::nullopt);

  std::size_t size() const { return elements_.size(); }
  const std::vector<Vector>& elements() const { return elements_; }
  /// 1-based, matching the frame index k.
  const Vector& element(std::size_t k) const;
  const Vector& operator[](std::size_t i) const { return elements_[i]; }
  std::optional<double> declared_lower() const { return lower_; }
  std::optional<double> declared_upper() const { return upper_; }
  bool is_sequence_family() const { return std::holds_alternative<CoordinateVector>(elements_.front()); }

  /// First n elements, keeping declared bounds.
  FrameFamily section(std::size_t n) const;

 private:
  std::vector<Vector> elements_;
  std::optional<double> lower_;
  std::optional<double> upper_;
};

}  // namespace suborbit
