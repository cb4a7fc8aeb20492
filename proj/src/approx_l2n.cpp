#include "suborbit/approx_l2n.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "suborbit/frame_algebra.hpp"
#include "suborbit/operators.hpp"

namespace suborbit {

namespace {

// |exponent * ln(lambda)| below this leaves room for the base norms when a
// term is materialized directly.
constexpr double kDirectLogLimit = 600.0;
constexpr double kMinLogScale = -708.0;

void require_lambda(double lambda) {
  if (!(lambda > 1.0) || !std::isfinite(lambda)) {
    throw PreconditionError("lambda must be a finite real > 1");
  }
}

const CoordinateVector& sequence(const FrameFamily& family, std::size_t k) {
  const auto* c = std::get_if<CoordinateVector>(&family.element(k));
  if (c == nullptr) {
    throw IncompatibleOperands("the l2(N) construction needs a family of sequences");
  }
  return *c;
}

// B lambda^2 / (lambda^2 - 1) as a LogReal.
LogReal geometric_factor(double upper, double lambda) {
  const double square = lambda_power(lambda, Rational(2)).value();
  return LogReal(upper) * LogReal(square / (square - 1.0));
}

void require_terms(const FrameFamily& family, const PowerSchedule& schedule, std::size_t n_terms) {
  if (n_terms < 1 || n_terms > family.size()) {
    throw IndexError("n_terms = " + std::to_string(n_terms) + " outside 1.." + std::to_string(family.size()));
  }
  if (schedule.size() < n_terms + 1) {
    throw PreconditionError("schedule has " + std::to_string(schedule.size()) + " values; n_terms = " +
                            std::to_string(n_terms) + " needs " + std::to_string(n_terms + 1));
  }
  schedule.validate();
}

}  // namespace

Vector materialize_or_zero(const ScaledVector& v) {
  if (v.is_zero()) return zero_like(v.base());
  const ScaledVector r = v.renormalized();
  if (r.exponent().to_double() * std::log(r.lambda()) < kMinLogScale) return zero_like(v.base());
  return r.materialize();
}

std::vector<Index> support_profile(const FrameFamily& family) {
  std::vector<Index> m;
  m.reserve(family.size());
  for (std::size_t k = 1; k <= family.size(); ++k) {
    const CoordinateVector& f = sequence(family, k);
    if (f.is_zero()) {
      throw PreconditionError("m(" + std::to_string(k) + ") is undefined: f_" + std::to_string(k) +
                              " is the zero vector");
    }
    m.push_back(f.max_index());
  }
  return m;
}

PowerSchedule schedule_finite_support(std::span<const Index> m, double lambda, double upper, double epsilon,
                                      std::size_t length) {
  require_lambda(lambda);
  if (!(upper > 0.0) || !(epsilon > 0.0)) {
    throw PreconditionError("B and epsilon must be positive");
  }
  if (length < 1) {
    throw PreconditionError("schedule length must be at least 1");
  }
  if (m.size() + 1 < length) {
    throw PreconditionError("support profile has " + std::to_string(m.size()) + " entries; length " +
                            std::to_string(length) + " needs " + std::to_string(length - 1));
  }
  const double log_lambda = std::log(lambda);
  const double constant = std::log(upper / epsilon) + std::log(lambda * lambda / (lambda * lambda - 1.0));
  PowerSchedule s;
  s.steps.push_back(0);
  for (std::size_t k = 1; k < length; ++k) {
    const double budget = (static_cast<double>(k) * std::numbers::ln2 + constant) / (2.0 * log_lambda);
    const auto support = static_cast<double>(m[k - 1]);
    const Rational gap = Rational::ceil_to_grid(std::max(support, budget), 1);
    s.steps.push_back(s.steps.back() + gap.num());
    s.provenance.push_back(support >= budget ? GapRule::support : GapRule::budget);
  }
  s.validate();
  return s;
}

PowerSchedule schedule_sqrt2(std::span<const Index> m, const Sqrt2Config& config, bool restricted,
                             std::size_t length) {
  if (config.N < 1 || config.j < 1) {
    throw PreconditionError("N and j must be at least 1");
  }
  if (length < 1) {
    throw PreconditionError("schedule length must be at least 1");
  }
  if (m.size() + 1 < length) {
    throw PreconditionError("support profile has " + std::to_string(m.size()) + " entries; length " +
                            std::to_string(length) + " needs " + std::to_string(length - 1));
  }
  const Index base = config.N + config.j + 1;
  PowerSchedule s;
  Index support_sum = 0;
  for (std::size_t i = 1; i <= length; ++i) {
    const auto k = static_cast<Index>(i);
    s.steps.push_back((k - 1) * base + k * (k - 1) / 2 + (restricted ? 0 : support_sum));
    if (i < length) {
      const Index mk = m[i - 1];
      if (restricted && mk > base + k) {
        throw PreconditionError("restricted closed form needs m(k) <= N+j+1+k; m(" + std::to_string(k) +
                                ") = " + std::to_string(mk) + " exceeds " + std::to_string(base + k));
      }
      support_sum += mk;
      s.provenance.push_back(GapRule::closed_form);
    }
  }
  s.validate();
  return s;
}

double default_upper_bound(double empirical_upper, std::optional<double> declared) {
  if (declared) return *declared;
  const double exponent = std::max(1.0, std::ceil(std::log2(empirical_upper) - 1e-12));
  return std::ldexp(1.0, static_cast<int>(exponent));
}

Generator build_generator(const FrameFamily& family, const PowerSchedule& schedule, double lambda,
                          std::size_t n_terms, double upper) {
  require_lambda(lambda);
  require_terms(family, schedule, n_terms);
  Generator g;
  g.n_terms = n_terms;
  const double log_lambda = std::log(lambda);
  Index previous_end = 0;
  std::size_t previous_n = 0;
  for (std::size_t n = 1; n <= n_terms; ++n) {
    const CoordinateVector& f = sequence(family, n);
    const Index a = schedule.integer_alpha(n);
    ScaledVector term = apply_U_power(f, a, lambda);
    const auto& block = std::get<CoordinateVector>(term.base());
    if (!block.is_zero()) {
      if (block.min_index() <= previous_end) {
        throw ScheduleViolation("blocks of terms " + std::to_string(previous_n) + " and " + std::to_string(n) +
                                " overlap at index " + std::to_string(block.min_index()));
      }
      previous_end = block.max_index();
      previous_n = n;
    }
    if (-static_cast<double>(a) * log_lambda < kMinLogScale) {
      g.skipped.push_back(n);
      g.tail_bound += term.norm_sq();
    }
    g.terms.push_back(std::move(term));
  }
  g.tail_bound += geometric_factor(upper, lambda) * lambda_power(lambda, -schedule.alpha(n_terms + 1) * 2);
  return g;
}

L2nResidual residual_l2n(const FrameFamily& family, const PowerSchedule& schedule, double lambda, std::size_t k,
                         std::size_t n_terms, double upper) {
  require_lambda(lambda);
  require_terms(family, schedule, n_terms);
  if (k < 1 || k > n_terms) {
    throw IndexError("row k = " + std::to_string(k) + " outside 1.." + std::to_string(n_terms));
  }
  const Index ak = schedule.integer_alpha(k);
  std::vector<ScaledVector> far;
  for (std::size_t n = 1; n <= n_terms; ++n) {
    if (n == k) continue;
    const ScaledVector term = apply_T_power(apply_U_power(sequence(family, n), schedule.integer_alpha(n), lambda), ak);
    if (n < k) {
      if (!term.is_zero()) {
        throw ScheduleViolation("T^alpha(" + std::to_string(k) + ") U^alpha(" + std::to_string(n) + ") f_" +
                                std::to_string(n) + " is not zero");
      }
      continue;
    }
    far.push_back(term);
  }

  L2nResidual r{.measured = {},
                .tail = {},
                .bound = {},
                .offset = far.empty() ? ScaledVector(CoordinateVector{}, Rational(0), lambda) : accumulate(far)};
  r.measured = r.offset.norm_sq();
  const LogReal factor = geometric_factor(upper, lambda);
  r.tail = factor * lambda_power(lambda, (schedule.alpha(k) - schedule.alpha(n_terms + 1)) * 2);
  r.bound = factor * lambda_power(lambda, -schedule.gap(k) * 2);

  const double log_lambda = std::log(lambda);
  if (static_cast<double>(schedule.integer_alpha(n_terms)) * log_lambda < kDirectLogLimit) {
    CoordinateVector phi;
    for (std::size_t n = 1; n <= n_terms; ++n) {
      phi = phi + std::get<CoordinateVector>(
                      apply_U_power(sequence(family, n), schedule.integer_alpha(n), lambda).materialize());
    }
    const auto moved = std::get<CoordinateVector>(apply_T_power(phi, ak, lambda).materialize());
    const double direct = std::sqrt((sequence(family, k) - moved).norm_sq());
    const double telescoped = std::sqrt(r.measured.value());
    const double scale = std::sqrt(sequence(family, k).norm_sq()) + telescoped;
    r.cross_checked = true;
    r.cross_check_ok = std::abs(direct - telescoped) <= 1e-12 * scale;
  }
  return r;
}

namespace {

bool is_power_of_two(double x, int exponent) { return std::abs(std::ldexp(x, -exponent) - 1.0) <= 1e-12; }

PowerSchedule finite_support_schedule(const FiniteSupportOptions& options, std::span<const Index> m, double& upper,
                                      double empirical_upper, std::optional<double> declared, std::size_t length,
                                      VerificationTable& table) {
  if (options.rule == FiniteSupportRule::general) {
    upper = default_upper_bound(empirical_upper, declared);
    return schedule_finite_support(m, options.lambda, upper, options.epsilon, length);
  }
  if (std::abs(options.lambda - std::numbers::sqrt2) > 1e-15) {
    throw PreconditionError("the sqrt2 rule needs lambda = sqrt(2)");
  }
  Sqrt2Config config;
  if (options.N) {
    config.N = *options.N;
    upper = std::ldexp(1.0, config.N);
    if (declared && !is_power_of_two(*declared, config.N)) {
      throw PreconditionError("declared B does not equal 2^N with N = " + std::to_string(config.N));
    }
  } else {
    upper = default_upper_bound(empirical_upper, declared);
    config.N = static_cast<int>(std::lround(std::log2(upper)));
    if (config.N < 1 || !is_power_of_two(upper, config.N)) {
      throw PreconditionError("the sqrt2 rule needs B = 2^N with N >= 1");
    }
  }
  if (options.j) {
    config.j = *options.j;
    if (!is_power_of_two(options.epsilon, -config.j)) {
      throw PreconditionError("epsilon does not equal 2^-j with j = " + std::to_string(config.j));
    }
  } else {
    config.j = static_cast<int>(std::lround(-std::log2(options.epsilon)));
    if (config.j < 1 || !is_power_of_two(options.epsilon, -config.j)) {
      throw PreconditionError("the sqrt2 rule needs epsilon = 2^-j with j >= 1");
    }
  }
  table.params.emplace_back("N", std::to_string(config.N));
  table.params.emplace_back("j", std::to_string(config.j));
  return schedule_sqrt2(m, config, options.rule == FiniteSupportRule::sqrt2_restricted, length);
}

}  // namespace

VerificationTable verify_finite_support(const FrameFamily& family, const FiniteSupportOptions& options) {
  require_lambda(options.lambda);
  if (!(options.epsilon > 0.0)) {
    throw PreconditionError("epsilon must be positive");
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

  VerificationTable table;
  table.kind = "l2n";
  table.lambda = options.lambda;
  table.epsilon = options.epsilon;
  table.section_size = rows;
  table.n_terms = n_terms;

  const FrameFamily section = family.section(rows);
  const FrameFamily generating = family.section(n_terms);
  const std::vector<Index> m = support_profile(generating);
  const FrameBounds section_bounds = empirical_frame_bounds(section, options.rank_tol);
  if (options.epsilon >= section_bounds.lower) {
    throw PreconditionError("epsilon = " + std::to_string(options.epsilon) + " must be below A_emp = " +
                            std::to_string(section_bounds.lower) + " of the K-section");
  }
  table.lower = section_bounds.lower;
  const double empirical_upper = empirical_frame_bounds(generating, options.rank_tol).upper;
  const std::optional<double> declared = options.upper ? options.upper : family.declared_upper();

  double upper = 0.0;
  const PowerSchedule schedule =
      finite_support_schedule(options, m, upper, empirical_upper, declared, n_terms + 1, table);
  if (upper < empirical_upper * (1.0 - 1e-12)) {
    throw PreconditionError("B = " + std::to_string(upper) + " is below the empirical upper bound " +
                            std::to_string(empirical_upper));
  }
  table.upper = upper;

  const Generator generator = build_generator(family, schedule, options.lambda, n_terms, upper);
  table.schedules.emplace_back("alpha", schedule);
  table.generators.emplace_back("phi", generator);

  std::vector<Vector> suborbit;
  table.rows_pass = true;
  for (std::size_t k = 1; k <= rows; ++k) {
    const L2nResidual r = residual_l2n(family, schedule, options.lambda, k, n_terms, upper);
    ResidualRow row;
    row.k = k;
    row.alpha = schedule.alpha(k);
    row.gap = schedule.gap(k);
    row.measured = r.measured;
    row.charge = r.tail;
    row.bound = r.bound;
    row.budget = std::ldexp(options.epsilon, -static_cast<int>(k));
    row.cross_checked = r.cross_checked;
    row.cross_check_ok = r.cross_check_ok;
    const LogReal charged = r.measured + r.tail;
    row.pass = leq(charged, r.bound, kRoundingSlack) && leq(charged, LogReal(row.budget), kRoundingSlack) &&
               r.cross_check_ok;
    table.rows_pass = table.rows_pass && row.pass;
    table.rows.push_back(row);
    suborbit.push_back(add(family.element(k), materialize_or_zero(r.offset)));
  }

  const FrameFamily approximation(std::move(suborbit));
  table.perturbation =
      perturbation_report(section, approximation, options.epsilon, section_bounds.lower, upper, options.rank_tol);
  table.domination = geometric_domination(section, approximation, options.epsilon);
  table.eps_approximation = is_eps_approximation(section, approximation, options.epsilon);
  table.independence_margin = independence_margin(approximation);
  table.suborbit = approximation.elements();
  table.passed = table.rows_pass && table.perturbation.all_bounds_hold && table.domination.holds &&
                 table.eps_approximation && table.independence_margin > kIndependenceThreshold;
  return table;
}

}  // namespace suborbit
