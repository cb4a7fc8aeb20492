#include "suborbit/approx_localized.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "suborbit/approx_l2n.hpp"
#include "suborbit/frame_algebra.hpp"
#include "suborbit/operators.hpp"

namespace suborbit {

namespace {

// C e^{-beta |j-k|} evaluated in floating point may exceed the exact bound by
// a few ulps.
constexpr double kLocalizationSlack = 1.0 + 4.0 * std::numeric_limits<double>::epsilon();
constexpr double kMinLogScale = -708.0;

void require_parameters(double C, double beta, double lambda) {
  if (!(lambda > 1.0) || !std::isfinite(lambda)) {
    throw PreconditionError("lambda must be a finite real > 1");
  }
  if (!(C > 0.0) || !(beta > 0.0)) {
    throw PreconditionError("C and beta must be positive");
  }
  if (std::log(lambda) >= beta) {
    throw PreconditionError("the localized construction needs ln(lambda) < beta; got ln(lambda) = " +
                            std::to_string(std::log(lambda)) + ", beta = " + std::to_string(beta));
  }
}

const CoordinateVector& sequence(const FrameFamily& family, std::size_t k) {
  const auto* c = std::get_if<CoordinateVector>(&family.element(k));
  if (c == nullptr) {
    throw IncompatibleOperands("the localized construction needs a family of sequences");
  }
  return *c;
}

// ln(C e^{-beta} / sqrt(1 - e^{-2 beta})).
double log_decay_constant(double C, double beta) {
  return std::log(C) - beta - 0.5 * std::log1p(-std::exp(-2.0 * beta));
}

// lambda / (lambda - 1) sqrt(B) lambda^{-exponent}.
LogReal far_series(double upper, double lambda, const Rational& exponent) {
  return LogReal(lambda / (lambda - 1.0)) * sqrt(LogReal(upper)) * lambda_power(lambda, -exponent);
}

}  // namespace

LocalizationCheck check_localization(const FrameFamily& family, double C, double beta) {
  if (!(C > 0.0) || !(beta > 0.0)) {
    throw PreconditionError("C and beta must be positive");
  }
  LocalizationCheck out;
  out.checked_k = family.size();
  for (std::size_t k = 1; k <= family.size(); ++k) {
    for (const auto& [j, a] : sequence(family, k).entries()) {
      const auto distance = static_cast<double>(j > static_cast<Index>(k) ? j - static_cast<Index>(k)
                                                                          : static_cast<Index>(k) - j);
      const double ratio = std::abs(a) * std::exp(beta * distance) / C;
      if (ratio > out.worst_ratio) {
        out.worst_ratio = ratio;
        out.worst_k = k;
        out.worst_j = j;
      }
      out.checked_j = std::max(out.checked_j, j);
    }
  }
  out.holds = out.worst_ratio <= kLocalizationSlack;
  return out;
}

Index truncation_radius(double beta, double trunc_tol) {
  if (!(beta > 0.0) || !(trunc_tol > 0.0) || !(trunc_tol < 1.0)) {
    throw PreconditionError("truncation needs beta > 0 and 0 < trunc_tol < 1");
  }
  return static_cast<Index>(std::floor(-std::log(trunc_tol) / beta));
}

LogReal truncation_mass(double C, double beta, Index radius) {
  const double log_sq = std::log(2.0) + 2.0 * std::log(C) - 2.0 * beta * static_cast<double>(radius + 1) -
                        std::log1p(-std::exp(-2.0 * beta));
  return LogReal::from_log(0.5 * log_sq);
}

LocalizedFamily exponential_bump_family(std::size_t size, double C, double beta, double trunc_tol) {
  if (size < 1) {
    throw PreconditionError("family size must be at least 1");
  }
  if (!(C > 0.0)) {
    throw PreconditionError("C must be positive");
  }
  const Index radius = truncation_radius(beta, trunc_tol);
  std::vector<Vector> elements;
  elements.reserve(size);
  for (std::size_t i = 1; i <= size; ++i) {
    const auto k = static_cast<Index>(i);
    CoordinateVector::Entries entries;
    for (Index j = std::max<Index>(1, k - radius); j <= k + radius; ++j) {
      entries.emplace(j, C * std::exp(-beta * static_cast<double>(std::abs(j - k))));
    }
    elements.emplace_back(CoordinateVector(std::move(entries)));
  }
  return {FrameFamily(std::move(elements)), radius};
}

PowerSchedule schedule_localized(double C, double beta, double lambda, double upper, double epsilon,
                                 std::size_t length) {
  require_parameters(C, beta, lambda);
  if (!(upper > 0.0) || !(epsilon > 0.0)) {
    throw PreconditionError("B and epsilon must be positive");
  }
  if (length < 1) {
    throw PreconditionError("schedule length must be at least 1");
  }
  const double log_lambda = std::log(lambda);
  const double rate = beta - log_lambda;  // ln of 1 / (lambda e^{-beta})
  const double budget_constant = std::log(lambda / (lambda - 1.0)) + 0.5 * std::log(upper / epsilon);
  const double near_constant = log_decay_constant(C, beta) - 0.5 * std::log(epsilon);

  PowerSchedule s;
  s.steps.push_back(0);
  LogReal near_sum;  // S_k
  for (std::size_t i = 1; i < length; ++i) {
    const auto k = static_cast<double>(i);
    const auto alpha_k = static_cast<double>(s.steps.back());
    near_sum += LogReal::from_log(alpha_k * rate + beta * k);
    const double e1 = alpha_k + k - 1.0;
    const double e2 = alpha_k + ((k / 2.0 + 1.0) * std::numbers::ln2 + budget_constant) / log_lambda;
    const double e3 = ((k / 2.0 + 1.5) * std::numbers::ln2 + near_sum.log() + near_constant) / rate;
    const double top = std::max({e1, e2, e3});
    const Rational next = Rational::ceil_to_grid(top, 1);
    if (next.num() <= s.steps.back()) {
      throw ScheduleViolation("localized schedule failed to increase at k = " + std::to_string(i));
    }
    s.steps.push_back(next.num());
    s.provenance.push_back(top == e1 ? GapRule::admissibility : top == e2 ? GapRule::budget : GapRule::localization);
  }
  s.validate();
  return s;
}

LocalizedResidual residual_localized(const FrameFamily& family, const PowerSchedule& schedule, double lambda,
                                     double C, double beta, std::size_t k, std::size_t n_terms, double upper,
                                     std::optional<Index> radius) {
  require_parameters(C, beta, lambda);
  if (n_terms < 1 || n_terms > family.size()) {
    throw IndexError("n_terms = " + std::to_string(n_terms) + " outside 1.." + std::to_string(family.size()));
  }
  if (k < 1 || k > n_terms) {
    throw IndexError("row k = " + std::to_string(k) + " outside 1.." + std::to_string(n_terms));
  }
  if (schedule.size() < n_terms + 1) {
    throw PreconditionError("schedule has " + std::to_string(schedule.size()) + " values; n_terms = " +
                            std::to_string(n_terms) + " needs " + std::to_string(n_terms + 1));
  }
  schedule.validate();
  for (std::size_t n = 2; n <= k; ++n) {
    if (schedule.alpha(n) < schedule.alpha(n - 1) + Rational(static_cast<Index>(n) - 2)) {
      throw ScheduleViolation("localized schedule needs alpha(k) >= alpha(k-1) + k - 2; fails at k = " +
                              std::to_string(n));
    }
  }

  const Index ak = schedule.integer_alpha(k);
  std::vector<ScaledVector> terms;
  LocalizedResidual r{.offset = ScaledVector(CoordinateVector{}, Rational(0), lambda)};
  for (std::size_t n = 1; n <= n_terms; ++n) {
    if (n == k) continue;
    ScaledVector term =
        apply_T_power(apply_U_power(sequence(family, n), schedule.integer_alpha(n), lambda), ak);
    (n < k ? r.near : r.far) += term.norm();
    terms.push_back(std::move(term));
  }
  if (!terms.empty()) r.offset = accumulate(terms);
  r.measured = r.offset.norm();
  if (radius) r.truncation = truncation_mass(C, beta, *radius);
  r.tail = far_series(upper, lambda, schedule.alpha(n_terms + 1) - schedule.alpha(k));
  r.far += r.tail;

  r.bound_far = far_series(upper, lambda, schedule.gap(k));
  if (k >= 2) {
    const double rate = beta - std::log(lambda);
    LogReal sum;
    for (std::size_t n = 1; n < k; ++n) {
      sum += LogReal::from_log(schedule.alpha(n).to_double() * rate + beta * static_cast<double>(n));
    }
    r.bound_near = LogReal::from_log(-static_cast<double>(ak) * rate + log_decay_constant(C, beta)) * sum;
  }
  r.bound = r.bound_near + r.bound_far;
  return r;
}

VerificationTable verify_localized(const FrameFamily& family, const LocalizedOptions& options) {
  require_parameters(options.C, options.beta, options.lambda);
  if (options.epsilon.has_value() == options.epsilon_fraction.has_value()) {
    throw PreconditionError("give exactly one of epsilon and epsilon_fraction");
  }
  const std::size_t rows = options.rows.value_or(family.size());
  if (rows < 1 || rows > family.size()) {
    throw IndexError("K = " + std::to_string(rows) + " outside 1.." + std::to_string(family.size()));
  }
  const std::size_t n_terms = options.n_terms.value_or(std::min(family.size(), rows + 8));
  if (n_terms < rows || n_terms > family.size()) {
    throw IndexError("n_terms = " + std::to_string(n_terms) + " outside " + std::to_string(rows) + ".." +
                     std::to_string(family.size()));
  }

  const FrameFamily generating = family.section(n_terms);
  const LocalizationCheck localization = check_localization(generating, options.C, options.beta);
  if (!localization.holds) {
    throw PreconditionError("localization fails at k = " + std::to_string(localization.worst_k) +
                            ", j = " + std::to_string(localization.worst_j) + " (ratio " +
                            std::to_string(localization.worst_ratio) + " to C e^{-beta|j-k|})");
  }

  const FrameFamily section = family.section(rows);
  const FrameBounds section_bounds = empirical_frame_bounds(section, options.rank_tol);
  const double epsilon =
      options.epsilon ? *options.epsilon : *options.epsilon_fraction * section_bounds.lower;
  if (!(epsilon > 0.0) || epsilon >= section_bounds.lower) {
    throw PreconditionError("epsilon = " + std::to_string(epsilon) + " must lie in ]0, A_emp[ with A_emp = " +
                            std::to_string(section_bounds.lower));
  }
  const double empirical_upper = empirical_frame_bounds(generating, options.rank_tol).upper;
  const double upper =
      default_upper_bound(empirical_upper, options.upper ? options.upper : family.declared_upper());
  if (upper < empirical_upper * (1.0 - 1e-12)) {
    throw PreconditionError("B = " + std::to_string(upper) + " is below the empirical upper bound " +
                            std::to_string(empirical_upper));
  }

  VerificationTable table;
  table.kind = "localized";
  table.lambda = options.lambda;
  table.epsilon = epsilon;
  table.lower = section_bounds.lower;
  table.upper = upper;
  table.section_size = rows;
  table.n_terms = n_terms;
  table.params.emplace_back("C", std::to_string(options.C));
  table.params.emplace_back("beta", std::to_string(options.beta));
  if (options.truncation_radius) {
    table.params.emplace_back("truncation_radius", std::to_string(*options.truncation_radius));
  }

  const PowerSchedule schedule =
      schedule_localized(options.C, options.beta, options.lambda, upper, epsilon, n_terms + 1);
  table.schedules.emplace_back("alpha", schedule);

  Generator generator;
  generator.n_terms = n_terms;
  const double log_lambda = std::log(options.lambda);
  for (std::size_t n = 1; n <= n_terms; ++n) {
    ScaledVector term = apply_U_power(sequence(family, n), schedule.integer_alpha(n), options.lambda);
    if (-schedule.alpha(n).to_double() * log_lambda < kMinLogScale) {
      generator.skipped.push_back(n);
      generator.tail_bound += term.norm_sq();
    }
    generator.terms.push_back(std::move(term));
  }
  const LogReal tail = far_series(upper, options.lambda, schedule.alpha(n_terms + 1));
  generator.tail_bound += tail * tail;
  table.generators.emplace_back("phi", generator);

  std::vector<Vector> suborbit;
  table.rows_pass = true;
  for (std::size_t k = 1; k <= rows; ++k) {
    const LocalizedResidual r = residual_localized(family, schedule, options.lambda, options.C, options.beta, k,
                                                   n_terms, upper, options.truncation_radius);
    ResidualRow row;
    row.k = k;
    row.alpha = schedule.alpha(k);
    row.gap = schedule.gap(k);
    row.measured = r.measured;
    row.charge = r.truncation + r.tail;
    row.bound = r.bound;
    row.budget = std::ldexp(epsilon, -static_cast<int>(k));
    row.near = r.near;
    row.far = r.far;
    row.bound_near = r.bound_near;
    row.bound_far = r.bound_far;
    const LogReal charged = r.measured + row.charge;
    row.pass = leq(charged, r.bound, kRoundingSlack) && leq(charged * charged, LogReal(row.budget), kRoundingSlack) &&
               leq(r.near, r.bound_near, kRoundingSlack) && leq(r.far, r.bound_far, kRoundingSlack);
    table.rows_pass = table.rows_pass && row.pass;
    table.rows.push_back(row);
    suborbit.push_back(add(family.element(k), materialize_or_zero(r.offset)));
  }

  const FrameFamily approximation(std::move(suborbit));
  table.perturbation =
      perturbation_report(section, approximation, epsilon, section_bounds.lower, upper, options.rank_tol);
  table.domination = geometric_domination(section, approximation, epsilon);
  table.eps_approximation = is_eps_approximation(section, approximation, epsilon);
  table.independence_margin = independence_margin(approximation);
  table.suborbit = approximation.elements();
  table.passed = table.rows_pass && table.perturbation.all_bounds_hold && table.domination.holds &&
                 table.eps_approximation && table.independence_margin > kIndependenceThreshold;
  return table;
}

}  // namespace suborbit
