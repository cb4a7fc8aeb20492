#pragma once

// Result types shared by the verification pipelines.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "suborbit/core_types.hpp"
#include "suborbit/frame_algebra.hpp"
#include "suborbit/schedule.hpp"

namespace suborbit {

/// Truncated generator series sum_{n <= n_terms} op^{alpha(n)} f_n, kept as
/// one exactly scaled term per n.
struct Generator {
  std::vector<ScaledVector> terms;
  std::size_t n_terms = 0;
  /// Bound on the squared norm of everything left out of `terms`, including
  /// the skipped terms.
  LogReal tail_bound;
  /// 1-based indices of terms whose scale is below double range; their mass
  /// is part of tail_bound and they are left out of phi().
  std::vector<std::size_t> skipped;

  Rational min_exponent() const;
  Rational max_exponent() const;
  /// The generator itself, summed at the exponent of its largest term.
  ScaledVector phi() const;
};

/// One residual comparison f_k against its suborbit approximation.
struct ResidualRow {
  std::string branch;  // "G" or "H" for two-operator runs, empty otherwise
  std::size_t k = 0;
  Rational alpha;
  Rational gap;
  /// Squared residual norm for l2n and l2r rows; the plain norm for
  /// localized rows.
  LogReal measured;
  /// Charged on top of `measured` before every comparison: the omitted
  /// series tail, plus truncation mass for localized rows.
  LogReal charge;
  LogReal bound;
  /// epsilon * 2^{-k}, halved per branch in two-operator runs. Always a
  /// squared quantity.
  double budget = 0.0;
  bool cross_checked = false;
  bool cross_check_ok = true;
  bool pass = false;

  // Localized rows only: the two halves of the residual and their bounds.
  std::optional<LogReal> near;
  std::optional<LogReal> far;
  std::optional<LogReal> bound_near;
  std::optional<LogReal> bound_far;
};

struct VerificationTable {
  std::string kind;
  double lambda = 0.0;
  double epsilon = 0.0;
  double lower = 0.0;  // A_emp of the compared section
  double upper = 0.0;  // B used by every bound
  std::size_t section_size = 0;
  std::size_t n_terms = 0;
  /// Free-form parameters recorded in the report, in insertion order.
  std::vector<std::pair<std::string, std::string>> params;

  std::vector<ResidualRow> rows;
  std::vector<std::pair<std::string, PowerSchedule>> schedules;
  std::vector<std::pair<std::string, Generator>> generators;

  /// The compared section of the approximating suborbit, in the order of F.
  std::vector<Vector> suborbit;
  PerturbationReport perturbation;
  DominationTable domination;
  bool eps_approximation = false;
  double independence_margin = 0.0;

  bool rows_pass = false;
  bool passed = false;
};

/// Independence threshold on the normalized suborbit Gram.
inline constexpr double kIndependenceThreshold = 1e-10;

/// Relative slack for comparisons between log-domain quantities whose exact
/// values may coincide.
inline constexpr double kRoundingSlack = 1e-12;

}  // namespace suborbit
