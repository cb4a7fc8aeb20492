#pragma once

// Suborbit approximation of finitely supported frames in l2(N) by the scaled
// shifts T, U: the support-driven schedule, its lambda = sqrt(2) closed
// forms, the generator phi = sum_n U^{alpha(n)} f_n, and residuals
// f_k - T^{alpha(k)} phi evaluated through the telescoped identity
//
//   f_k - T^{alpha(k)} phi = - sum_{n > k} U^{alpha(n) - alpha(k)} f_n,
//
// so no lambda^{alpha(k)} is ever formed.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "suborbit/core_types.hpp"
#include "suborbit/schedule.hpp"
#include "suborbit/verification.hpp"

namespace suborbit {

/// m(k): the largest index of a nonzero coordinate of f_k. Throws
/// PreconditionError naming k for a zero element.
std::vector<Index> support_profile(const FrameFamily& family);

/// alpha(1) = 0 and
///   alpha(k+1) - alpha(k) = ceil(max(m(k), [k ln2 + ln(B/eps) + ln(lambda^2/(lambda^2-1))] / (2 ln lambda)))
/// for k = 1..length-1. Needs m.size() >= length - 1.
PowerSchedule schedule_finite_support(std::span<const Index> m, double lambda, double upper, double epsilon,
                                      std::size_t length);

/// B = 2^N and epsilon = 2^{-j}, both exponents at least 1.
struct Sqrt2Config {
  int N = 1;
  int j = 1;
};

/// alpha(k) = (k-1)(N+j+1) + k(k-1)/2 + sum_{l<k} m(l); the restricted form
/// drops the sum and requires m(k) <= N+j+1+k for the covered k.
PowerSchedule schedule_sqrt2(std::span<const Index> m, const Sqrt2Config& config, bool restricted,
                             std::size_t length);

/// B = declared, else the least power of two >= B_emp, at least 2.
double default_upper_bound(double empirical_upper, std::optional<double> declared);

/// Terms U^{alpha(n)} f_n for n = 1..n_terms with their disjointness
/// checked, and the squared tail bound B lambda^2/(lambda^2-1) lambda^{-2 alpha(n_terms+1)}.
/// Throws ScheduleViolation when two blocks overlap.
Generator build_generator(const FrameFamily& family, const PowerSchedule& schedule, double lambda,
                          std::size_t n_terms, double upper);

struct L2nResidual {
  /// ||f_k - T^{alpha(k)} phi||^2 over the stored terms.
  LogReal measured{};
  /// Squared mass of the omitted terms n > n_terms, seen from row k.
  LogReal tail{};
  LogReal bound{};
  /// T^{alpha(k)} phi - f_k, the stored terms other than n = k.
  ScaledVector offset;
  bool cross_checked = false;
  bool cross_check_ok = true;
};

/// Residual of row k. Asserts T^{alpha(k)} U^{alpha(n)} f_n = 0 for n < k
/// (ScheduleViolation otherwise). When every exponent fits comfortably in a
/// double, the telescoped value is compared with a direct evaluation of
/// f_k - T^{alpha(k)} phi.
L2nResidual residual_l2n(const FrameFamily& family, const PowerSchedule& schedule, double lambda, std::size_t k,
                         std::size_t n_terms, double upper);

enum class FiniteSupportRule { general, sqrt2, sqrt2_restricted };

struct FiniteSupportOptions {
  double lambda = 0.0;
  double epsilon = 0.0;
  std::optional<double> upper;  // B; defaults per default_upper_bound
  std::optional<std::size_t> rows;     // K; defaults to the family size
  std::optional<std::size_t> n_terms;  // defaults to min(family size, K + 8)
  FiniteSupportRule rule = FiniteSupportRule::general;
  /// Closed-form parameters; derived from B and epsilon when absent.
  std::optional<int> N;
  std::optional<int> j;
  double rank_tol = kDefaultRankTol;
};

/// Schedule, generator, per-row residuals, and the finite-section frame
/// comparison between F and the suborbit {T^{alpha(k)} phi}.
VerificationTable verify_finite_support(const FrameFamily& family, const FiniteSupportOptions& options);

/// Materialized vector, or zero when its scale is below double range.
Vector materialize_or_zero(const ScaledVector& v);

}  // namespace suborbit
