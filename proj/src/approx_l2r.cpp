#include "suborbit/approx_l2r.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "suborbit/approx_l2n.hpp"
#include "suborbit/frame_algebra.hpp"

namespace suborbit {

namespace {

constexpr double kMinLogScale = -708.0;

void require_lambda(double lambda) {
  if (!(lambda > 1.0) || !std::isfinite(lambda)) {
    throw PreconditionError("lambda must be a finite real > 1");
  }
}

LogReal geometric_factor(double upper, double lambda) {
  const double square = lambda_power(lambda, Rational(2)).value();
  return LogReal(upper) * LogReal(square / (square - 1.0));
}

TranslationPower lowering(Branch branch, const Rational& power, double lambda) {
  return {branch == Branch::G ? TranslationKind::U1 : TranslationKind::U2, power, lambda, Rational(0)};
}

TranslationPower raising(Branch branch, const Rational& power, double lambda, const Rational& cutoff) {
  return {branch == Branch::G ? TranslationKind::T1 : TranslationKind::T2, power, lambda, cutoff};
}

void require_terms(std::span<const SampledFunction> functions, const PowerSchedule& schedule, std::size_t n_terms) {
  if (n_terms < 1 || n_terms > functions.size()) {
    throw IndexError("n_terms = " + std::to_string(n_terms) + " outside 1.." + std::to_string(functions.size()));
  }
  if (schedule.size() < n_terms + 1) {
    throw PreconditionError("schedule has " + std::to_string(schedule.size()) + " values; n_terms = " +
                            std::to_string(n_terms) + " needs " + std::to_string(n_terms + 1));
  }
  schedule.validate();
}

int exponent_of_two(double x, const char* what) {
  const auto e = static_cast<int>(std::lround(std::log2(x)));
  if (std::abs(std::ldexp(x, -e) - 1.0) > 1e-12) {
    throw PreconditionError(std::string(what) + " must be a power of two");
  }
  return e;
}

struct BranchRun {
  Branch branch = Branch::G;
  std::vector<SampledFunction> functions;  // the generating section
  PowerSchedule schedule;
  std::size_t rows = 0;
};

// Rows, generators and the finite-section comparison shared by the general
// and Gabor pipelines. `order` lists the union in the order of F.
void run_branches(VerificationTable& table, const std::vector<BranchRun>& branches,
                  const std::vector<std::pair<Branch, std::size_t>>& order, const FrameFamily& section,
                  const Rational& cutoff, double rank_tol) {
  std::vector<std::vector<Vector>> approximations(2);
  table.rows_pass = true;
  table.domination.holds = true;
  for (const auto& run : branches) {
    if (run.rows == 0) continue;
    const std::string name = to_string(run.branch);
    const std::size_t n_terms = run.schedule.size() - 1;
    table.schedules.emplace_back(run.branch == Branch::G ? "alpha" : "gamma", run.schedule);
    table.generators.emplace_back(run.branch == Branch::G ? "phi1" : "phi2",
                                  build_branch_generator(run.branch, run.functions, run.schedule, table.lambda,
                                                         n_terms, table.upper));
    std::vector<Vector> originals;
    auto& approx = approximations[run.branch == Branch::G ? 0 : 1];
    for (std::size_t k = 1; k <= run.rows; ++k) {
      const L2rResidual r = residual_l2r(run.branch, run.functions, run.schedule, table.lambda, k, n_terms,
                                         table.upper, cutoff);
      ResidualRow row;
      row.branch = name;
      row.k = k;
      row.alpha = run.schedule.alpha(k);
      row.gap = run.schedule.gap(k);
      row.measured = r.measured;
      row.charge = r.tail;
      row.bound = r.bound;
      row.budget = std::ldexp(table.epsilon, -static_cast<int>(k) - 1);
      const LogReal charged = r.measured + r.tail;
      row.pass = leq(charged, r.bound, kRoundingSlack) && leq(charged, LogReal(row.budget), kRoundingSlack);
      table.rows_pass = table.rows_pass && row.pass;
      table.rows.push_back(row);
      originals.emplace_back(run.functions[k - 1]);
      approx.push_back(add(run.functions[k - 1], materialize_or_zero(r.offset)));
    }
    const DominationTable d = geometric_domination(FrameFamily(originals), FrameFamily(approx), table.epsilon, 0.5);
    table.domination.holds = table.domination.holds && d.holds;
    table.domination.rows.insert(table.domination.rows.end(), d.rows.begin(), d.rows.end());
  }

  std::vector<Vector> united;
  for (const auto& [branch, index] : order) united.push_back(approximations[branch == Branch::G ? 0 : 1][index - 1]);
  const FrameFamily approximation(std::move(united));
  table.perturbation = perturbation_report(section, approximation, table.epsilon, table.lower, table.upper, rank_tol);
  table.eps_approximation = is_eps_approximation(section, approximation, table.epsilon);
  table.independence_margin = independence_margin(approximation);
  table.suborbit = approximation.elements();
  table.passed = table.rows_pass && table.perturbation.all_bounds_hold && table.domination.holds &&
                 table.eps_approximation && table.independence_margin > kIndependenceThreshold;
}

std::size_t branch_rows(const L2rOptions& options, std::size_t available) {
  return std::min(options.rows.value_or(available), available);
}

std::size_t branch_terms(const L2rOptions& options, std::size_t rows, std::size_t available) {
  if (rows == 0) return 0;
  const std::size_t n = options.n_terms.value_or(std::min(available, rows + 8));
  if (n < rows || n > available) {
    throw IndexError("n_terms = " + std::to_string(n) + " outside " + std::to_string(rows) + ".." +
                     std::to_string(available));
  }
  return n;
}

}  // namespace

std::string to_string(Branch branch) { return branch == Branch::G ? "G" : "H"; }

SupportIntervalProfile support_intervals(std::span<const SampledFunction> g, std::span<const SampledFunction> h) {
  SupportIntervalProfile p;
  const SampledFunction* first = !g.empty() ? &g.front() : !h.empty() ? &h.front() : nullptr;
  if (first != nullptr) p.q = first->q();
  for (const auto& f : g) {
    if (f.q() != p.q) throw IncompatibleOperands("branches mix sampling grids");
    if (f.support_left() < Rational(0)) {
      throw PreconditionError("an element of G starts below 0");
    }
    p.a.push_back(f.support_left());
    p.b.push_back(f.support_right());
    p.L = std::max(p.L, f.support_right() - f.support_left());
  }
  for (const auto& f : h) {
    if (f.q() != p.q) throw IncompatibleOperands("branches mix sampling grids");
    if (!(f.support_left() < Rational(0))) {
      throw PreconditionError("an element of H is supported in [0, inf)");
    }
    p.c.push_back(f.support_left());
    p.d.push_back(f.support_right());
    p.L = std::max(p.L, f.support_right() - f.support_left());
  }
  return p;
}

L2rPartition partition_frame(const FrameFamily& family) {
  if (family.is_sequence_family()) {
    throw IncompatibleOperands("the L2(R) construction needs a family of sampled functions");
  }
  L2rPartition out;
  for (std::size_t k = 1; k <= family.size(); ++k) {
    const auto& f = std::get<SampledFunction>(family.element(k));
    if (f.support_left() >= Rational(0)) {
      out.g.push_back(f);
      out.g_positions.push_back(k);
    } else {
      out.h.push_back(f);
      out.h_positions.push_back(k);
    }
  }
  out.profile = support_intervals(out.g, out.h);
  return out;
}

std::pair<PowerSchedule, PowerSchedule> schedules_l2r(const SupportIntervalProfile& profile, double lambda,
                                                      double upper, double epsilon, std::size_t length_g,
                                                      std::size_t length_h) {
  require_lambda(lambda);
  if (!(upper > 0.0) || !(epsilon > 0.0)) {
    throw PreconditionError("B and epsilon must be positive");
  }
  if (profile.b.size() + 1 < length_g || profile.c.size() + 1 < length_h) {
    throw PreconditionError("support profile is shorter than the requested schedules");
  }
  const double constant = std::log(2.0 * upper / epsilon) + std::log(lambda * lambda / (lambda * lambda - 1.0));
  const auto bracket = [&](std::size_t k) {
    return (static_cast<double>(k) * std::numbers::ln2 + constant) / (2.0 * std::log(lambda));
  };
  const auto build = [&](std::size_t length, auto support) {
    PowerSchedule s;
    s.denominator = profile.q;
    if (length == 0) return s;
    s.steps.push_back(0);
    for (std::size_t k = 1; k < length; ++k) {
      const double width = support(k).to_double();
      const double budget = bracket(k);
      const Rational gap = std::max(Rational::ceil_to_grid(budget, profile.q), support(k));
      s.steps.push_back(s.steps.back() + (gap * profile.q).num());
      s.provenance.push_back(width >= budget ? GapRule::support : GapRule::budget);
    }
    s.validate();
    return s;
  };
  PowerSchedule alpha = build(length_g, [&](std::size_t k) { return profile.b[k - 1]; });
  PowerSchedule gamma = build(length_h, [&](std::size_t k) { return profile.L - profile.c[k - 1]; });
  return {std::move(alpha), std::move(gamma)};
}

Generator build_branch_generator(Branch branch, std::span<const SampledFunction> functions,
                                 const PowerSchedule& schedule, double lambda, std::size_t n_terms, double upper) {
  require_lambda(lambda);
  require_terms(functions, schedule, n_terms);
  Generator g;
  g.n_terms = n_terms;
  bool have_previous = false;
  Index previous_start = 0;
  Index previous_end = 0;
  std::size_t previous_n = 0;
  for (std::size_t n = 1; n <= n_terms; ++n) {
    ScaledVector term = apply_translation_power(functions[n - 1], lowering(branch, schedule.alpha(n), lambda));
    const auto& block = std::get<SampledFunction>(term.base());
    if (!block.is_zero()) {
      const bool overlap = have_previous && (branch == Branch::G ? block.start() < previous_end
                                                                 : block.end() > previous_start);
      if (overlap) {
        throw ScheduleViolation("blocks of terms " + std::to_string(previous_n) + " and " + std::to_string(n) +
                                " overlap in branch " + to_string(branch));
      }
      have_previous = true;
      previous_start = block.start();
      previous_end = block.end();
      previous_n = n;
    }
    if (-schedule.alpha(n).to_double() * std::log(lambda) < kMinLogScale) {
      g.skipped.push_back(n);
      g.tail_bound += term.norm_sq();
    }
    g.terms.push_back(std::move(term));
  }
  g.tail_bound += geometric_factor(upper, lambda) * lambda_power(lambda, -schedule.alpha(n_terms + 1) * 2);
  return g;
}

std::pair<Generator, Generator> build_generators_l2r(std::span<const SampledFunction> g,
                                                     std::span<const SampledFunction> h, const PowerSchedule& alpha,
                                                     const PowerSchedule& gamma, double lambda, std::size_t n_terms_g,
                                                     std::size_t n_terms_h, double upper) {
  return {build_branch_generator(Branch::G, g, alpha, lambda, n_terms_g, upper),
          build_branch_generator(Branch::H, h, gamma, lambda, n_terms_h, upper)};
}

L2rResidual residual_l2r(Branch branch, std::span<const SampledFunction> functions, const PowerSchedule& schedule,
                         double lambda, std::size_t k, std::size_t n_terms, double upper, const Rational& cutoff) {
  require_lambda(lambda);
  require_terms(functions, schedule, n_terms);
  if (k < 1 || k > n_terms) {
    throw IndexError("row k = " + std::to_string(k) + " outside 1.." + std::to_string(n_terms));
  }
  const TranslationPower up = raising(branch, schedule.alpha(k), lambda, cutoff);
  std::vector<ScaledVector> far;
  for (std::size_t n = 1; n <= n_terms; ++n) {
    const ScaledVector lowered =
        apply_translation_power(functions[n - 1], lowering(branch, schedule.alpha(n), lambda));
    const ScaledVector term = apply_translation_power(lowered, up);
    if (n < k && !term.is_zero()) {
      throw ScheduleViolation("the truncated translation does not annihilate term " + std::to_string(n) +
                              " in row " + std::to_string(k) + " of branch " + to_string(branch));
    }
    if (n == k && (term.exponent() != Rational(0) || std::get<SampledFunction>(term.base()) != functions[k - 1])) {
      throw ScheduleViolation("the truncated translation does not restore element " + std::to_string(k) +
                              " of branch " + to_string(branch));
    }
    if (n > k) far.push_back(term);
  }
  L2rResidual r{.offset = far.empty() ? ScaledVector(SampledFunction(functions[k - 1].q()), Rational(0), lambda)
                                      : accumulate(far)};
  r.measured = r.offset.norm_sq();
  const LogReal factor = geometric_factor(upper, lambda);
  r.tail = factor * lambda_power(lambda, (schedule.alpha(k) - schedule.alpha(n_terms + 1)) * 2);
  r.bound = factor * lambda_power(lambda, -schedule.gap(k) * 2);
  return r;
}

std::vector<std::pair<Index, Index>> gabor_path(Index m_range, Index n_range) {
  if (m_range < 0 || n_range < 0) {
    throw PreconditionError("m_range and n_range must be nonnegative");
  }
  std::vector<std::pair<Index, Index>> path{{0, 0}};
  const auto inside = [&](Index m, Index n) { return std::abs(m) <= m_range && n <= n_range; };
  for (Index s = 1;; ++s) {
    const Index sign = s % 2 == 1 ? 1 : -1;
    std::vector<std::pair<Index, Index>> shell;
    for (Index n = 0; n <= s; ++n) shell.emplace_back(sign * s, n);
    for (Index m = s - 1; m >= -s; --m) shell.emplace_back(sign * m, s);
    for (Index n = s - 1; n >= 0; --n) shell.emplace_back(-sign * s, n);
    for (const auto& [m, n] : shell) {
      if (!inside(m, n)) return path;
      path.emplace_back(m, n);
    }
  }
}

GaborFamily gabor_family(const GaborSpec& spec) {
  const SampledFunction& w = spec.window;
  if (w.is_zero()) {
    throw PreconditionError("the Gabor window must be nonzero");
  }
  if (w.support_left() < Rational(0)) {
    throw PreconditionError("the Gabor window must be supported in [0, C]");
  }
  if (!(spec.a > Rational(0)) || !(spec.b > 0.0)) {
    throw PreconditionError("Gabor parameters a and b must be positive");
  }
  const Rational step = spec.a * w.q();
  if (!step.is_integer()) {
    throw GridMismatch("a = " + to_string(spec.a) + " is off the grid 1/" + std::to_string(w.q()));
  }
  GaborFamily out;
  out.C = w.support_right();
  for (const auto& [m, n] : gabor_path(spec.m_range, spec.n_range)) {
    const double freq = static_cast<double>(m) * spec.b;
    out.g.push_back(w.shifted(n * step.num()).modulated(freq));
    out.g_lattice.emplace_back(m, n);
    out.ell.push_back(n + 1);
    out.h.push_back(w.shifted((-1 - n) * step.num()).modulated(freq));
    out.h_lattice.emplace_back(m, -1 - n);
    out.r.push_back(n + 1);
  }
  return out;
}

std::pair<PowerSchedule, PowerSchedule> gabor_schedules(const Rational& C, const Rational& a, int N, int j,
                                                        std::size_t length, std::int64_t q) {
  if (N < 1 || j < 1) {
    throw PreconditionError("N and j must be at least 1");
  }
  std::vector<Rational> alpha;
  std::vector<Rational> gamma;
  const Rational shared = Rational(N + j + 2) + C;
  for (std::size_t i = 1; i <= length; ++i) {
    const auto k = static_cast<Index>(i);
    const Rational quadratic = Rational(k * (k - 1), 2) * (a + Rational(1));
    alpha.push_back(quadratic + (shared - a) * (k - 1));
    gamma.push_back(quadratic + shared * (k - 1));
  }
  PowerSchedule sa = schedule_from_values(alpha, q);
  PowerSchedule sg = schedule_from_values(gamma, q);
  sa.provenance.assign(sa.provenance.size(), GapRule::closed_form);
  sg.provenance.assign(sg.provenance.size(), GapRule::closed_form);
  return {std::move(sa), std::move(sg)};
}

VerificationTable verify_l2r(const FrameFamily& family, const L2rOptions& options) {
  require_lambda(options.lambda);
  if (!options.epsilon) {
    throw PreconditionError("missing epsilon");
  }
  const double epsilon = *options.epsilon;
  const L2rPartition part = partition_frame(family);
  const std::size_t rows_g = branch_rows(options, part.g.size());
  const std::size_t rows_h = branch_rows(options, part.h.size());
  const std::size_t terms_g = branch_terms(options, rows_g, part.g.size());
  const std::size_t terms_h = branch_terms(options, rows_h, part.h.size());

  std::vector<std::pair<std::size_t, std::pair<Branch, std::size_t>>> positioned;
  for (std::size_t i = 0; i < rows_g; ++i) positioned.push_back({part.g_positions[i], {Branch::G, i + 1}});
  for (std::size_t i = 0; i < rows_h; ++i) positioned.push_back({part.h_positions[i], {Branch::H, i + 1}});
  std::sort(positioned.begin(), positioned.end());
  std::vector<std::pair<Branch, std::size_t>> order;
  std::vector<Vector> section_elements;
  for (const auto& [position, entry] : positioned) {
    order.push_back(entry);
    section_elements.push_back(family.element(position));
  }
  const FrameFamily section(std::move(section_elements));
  const FrameBounds section_bounds = empirical_frame_bounds(section, options.rank_tol);
  if (!(epsilon > 0.0) || epsilon >= section_bounds.lower) {
    throw PreconditionError("epsilon = " + std::to_string(epsilon) + " must lie in ]0, A_emp[ with A_emp = " +
                            std::to_string(section_bounds.lower));
  }

  const std::vector<SampledFunction> g(part.g.begin(), part.g.begin() + static_cast<std::ptrdiff_t>(terms_g));
  const std::vector<SampledFunction> h(part.h.begin(), part.h.begin() + static_cast<std::ptrdiff_t>(terms_h));
  std::vector<Vector> generating(g.begin(), g.end());
  generating.insert(generating.end(), h.begin(), h.end());
  const double empirical_upper = empirical_frame_bounds(FrameFamily(generating), options.rank_tol).upper;
  const double upper =
      default_upper_bound(empirical_upper, options.upper ? options.upper : family.declared_upper());
  if (upper < empirical_upper * (1.0 - 1e-12)) {
    throw PreconditionError("B = " + std::to_string(upper) + " is below the empirical upper bound " +
                            std::to_string(empirical_upper));
  }

  const SupportIntervalProfile profile = support_intervals(g, h);
  auto [alpha, gamma] = schedules_l2r(profile, options.lambda, upper, epsilon, terms_g == 0 ? 0 : terms_g + 1,
                                      terms_h == 0 ? 0 : terms_h + 1);

  VerificationTable table;
  table.kind = "l2r";
  table.lambda = options.lambda;
  table.epsilon = epsilon;
  table.lower = section_bounds.lower;
  table.upper = upper;
  table.section_size = section.size();
  table.n_terms = std::max(terms_g, terms_h);
  table.params.emplace_back("L", to_string(profile.L));
  table.params.emplace_back("q", std::to_string(profile.q));
  table.params.emplace_back("rows_G", std::to_string(rows_g));
  table.params.emplace_back("rows_H", std::to_string(rows_h));
  if (rows_g == 0 || rows_h == 0) table.params.emplace_back("degenerate_branch", rows_g == 0 ? "G" : "H");
  run_branches(table, {{Branch::G, g, alpha, rows_g}, {Branch::H, h, gamma, rows_h}}, order, section, profile.L,
               options.rank_tol);
  return table;
}

VerificationTable verify_gabor(const GaborSpec& spec, const L2rOptions& options) {
  require_lambda(options.lambda);
  const GaborFamily family = gabor_family(spec);
  const std::size_t rows = branch_rows(options, family.g.size());
  const std::size_t terms = branch_terms(options, rows, family.g.size());

  int j = 0;
  double epsilon = 0.0;
  if (options.j) {
    j = *options.j;
    epsilon = std::ldexp(1.0, -j);
    if (options.epsilon && std::abs(*options.epsilon / epsilon - 1.0) > 1e-12) {
      throw PreconditionError("epsilon does not equal 2^-j with j = " + std::to_string(j));
    }
  } else if (options.epsilon) {
    epsilon = *options.epsilon;
    j = -exponent_of_two(epsilon, "epsilon");
  } else {
    throw PreconditionError("missing epsilon (or j)");
  }

  std::vector<std::pair<Branch, std::size_t>> order;
  std::vector<Vector> section_elements;
  for (std::size_t i = 1; i <= rows; ++i) {
    order.emplace_back(Branch::G, i);
    section_elements.emplace_back(family.g[i - 1]);
    order.emplace_back(Branch::H, i);
    section_elements.emplace_back(family.h[i - 1]);
  }
  const FrameFamily section(std::move(section_elements));
  const FrameBounds section_bounds = empirical_frame_bounds(section, options.rank_tol);
  if (!(epsilon > 0.0) || epsilon >= section_bounds.lower) {
    throw PreconditionError("epsilon = " + std::to_string(epsilon) + " must lie in ]0, A_emp[ with A_emp = " +
                            std::to_string(section_bounds.lower));
  }

  const std::vector<SampledFunction> g(family.g.begin(), family.g.begin() + static_cast<std::ptrdiff_t>(terms));
  const std::vector<SampledFunction> h(family.h.begin(), family.h.begin() + static_cast<std::ptrdiff_t>(terms));
  std::vector<Vector> generating(g.begin(), g.end());
  generating.insert(generating.end(), h.begin(), h.end());
  const double empirical_upper = empirical_frame_bounds(FrameFamily(generating), options.rank_tol).upper;
  int N = 0;
  if (options.N) {
    N = *options.N;
  } else if (options.upper) {
    N = exponent_of_two(*options.upper, "B");
  } else {
    N = static_cast<int>(std::ceil(std::log2(empirical_upper) - 1e-12)) + 1;
  }
  if (N < 1 || j < 1) {
    throw PreconditionError("N and j must be at least 1");
  }
  const double upper = std::ldexp(1.0, N);
  if (options.upper && std::abs(*options.upper / upper - 1.0) > 1e-12) {
    throw PreconditionError("B does not equal 2^N with N = " + std::to_string(N));
  }
  if (upper < empirical_upper * (1.0 - 1e-12)) {
    throw PreconditionError("B = 2^" + std::to_string(N) + " is below the empirical upper bound " +
                            std::to_string(empirical_upper));
  }

  const SupportIntervalProfile profile = support_intervals(g, h);
  auto [alpha, gamma] = gabor_schedules(family.C, spec.a, N, j, terms + 1, spec.window.q());

  VerificationTable table;
  table.kind = "gabor";
  table.lambda = options.lambda;
  table.epsilon = epsilon;
  table.lower = section_bounds.lower;
  table.upper = upper;
  table.section_size = section.size();
  table.n_terms = terms;
  table.params.emplace_back("N", std::to_string(N));
  table.params.emplace_back("j", std::to_string(j));
  table.params.emplace_back("a", to_string(spec.a));
  table.params.emplace_back("b", std::to_string(spec.b));
  table.params.emplace_back("C", to_string(family.C));
  table.params.emplace_back("L", to_string(profile.L));
  table.params.emplace_back("q", std::to_string(spec.window.q()));
  table.params.emplace_back("m_range", std::to_string(spec.m_range));
  table.params.emplace_back("n_range", std::to_string(spec.n_range));
  run_branches(table, {{Branch::G, g, alpha, rows}, {Branch::H, h, gamma, rows}}, order, section, profile.L,
               options.rank_tol);
  return table;
}

}  // namespace suborbit
