#pragma once

// Suborbit approximation of beta-exponentially localized frames in l2(N),
// |<e_j, f_k>| <= C e^{-beta |j - k|}, by the scaled shifts T, U with
// ln(lambda) < beta. Earlier terms no longer vanish under T^{alpha(k)}, so
// the residual splits into a near part (n < k) and a far part (n > k), each
// with its own bound. Residuals here are norms, not squared norms.

#include <cstddef>
#include <optional>

#include "suborbit/core_types.hpp"
#include "suborbit/schedule.hpp"
#include "suborbit/verification.hpp"

namespace suborbit {

struct LocalizationCheck {
  bool holds = true;
  /// Location and size of the largest |<e_j, f_k>| e^{beta |j-k|} / C.
  std::size_t worst_k = 0;
  Index worst_j = 0;
  double worst_ratio = 0.0;
  /// Window that was checked: every stored coordinate up to these indices.
  std::size_t checked_k = 0;
  Index checked_j = 0;
};

/// Checks the localization inequality at every stored coordinate, with a
/// few ulps of slack for values computed as C e^{-beta |j-k|}.
LocalizationCheck check_localization(const FrameFamily& family, double C, double beta);

/// Smallest R with e^{-beta (R+1)} < trunc_tol.
Index truncation_radius(double beta, double trunc_tol);

/// Norm bound on the coordinates of a localized f_k farther than R from k.
LogReal truncation_mass(double C, double beta, Index radius);

struct LocalizedFamily {
  FrameFamily family;
  /// Coordinates farther than this from the diagonal were dropped.
  std::optional<Index> radius;
};

/// f_k(j) = C e^{-beta |j-k|}, stored for |j - k| <= truncation_radius(beta, trunc_tol).
/// Every dropped coordinate is below trunc_tol * ||f_k||.
LocalizedFamily exponential_bump_family(std::size_t size, double C, double beta, double trunc_tol = 1e-14);

/// alpha(1) = 0 and alpha(k+1) = ceil(max(e1, e2, e3)) with
///   e1 = alpha(k) + k - 1,
///   e2 = alpha(k) + [(k/2+1) ln2 + ln(lambda/(lambda-1)) + ln sqrt(B/eps)] / ln(lambda),
///   e3 = [(k/2+3/2) ln2 + ln S_k + ln(C e^{-beta}/sqrt(1-e^{-2beta})) - ln sqrt(eps)] / (beta - ln(lambda)),
///   S_k = sum_{n<=k} (lambda e^{-beta})^{-alpha(n)} e^{beta n}, kept in the log domain.
PowerSchedule schedule_localized(double C, double beta, double lambda, double upper, double epsilon,
                                 std::size_t length);

struct LocalizedResidual {
  /// ||f_k - T^{alpha(k)} phi|| over the stored terms.
  LogReal measured{};
  /// Norm of the dropped coordinates of f_k.
  LogReal truncation{};
  /// Norm bound of the omitted terms n > n_terms.
  LogReal tail{};
  /// sum_{n<k} ||T^{alpha(k)-alpha(n)} f_n|| and its bound.
  LogReal near{};
  LogReal bound_near{};
  /// sum_{n>k} ||U^{alpha(n)-alpha(k)} f_n|| plus the tail, and its bound.
  LogReal far{};
  LogReal bound_far{};
  LogReal bound{};
  /// T^{alpha(k)} phi - f_k over the stored terms.
  ScaledVector offset;
};

LocalizedResidual residual_localized(const FrameFamily& family, const PowerSchedule& schedule, double lambda,
                                     double C, double beta, std::size_t k, std::size_t n_terms, double upper,
                                     std::optional<Index> radius = std::nullopt);

struct LocalizedOptions {
  double lambda = 0.0;
  double C = 0.0;
  double beta = 0.0;
  /// Either epsilon, or epsilon_fraction * A_emp of the K-section.
  std::optional<double> epsilon;
  std::optional<double> epsilon_fraction;
  std::optional<double> upper;
  std::optional<std::size_t> rows;
  std::optional<std::size_t> n_terms;
  std::optional<Index> truncation_radius;
  double rank_tol = kDefaultRankTol;
};

VerificationTable verify_localized(const FrameFamily& family, const LocalizedOptions& options);

}  // namespace suborbit
