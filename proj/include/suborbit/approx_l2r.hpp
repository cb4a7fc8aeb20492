#pragma once

// Two-operator suborbit approximation of compactly supported frames in
// L2(R). Elements supported in [0, inf) form the family G, approximated by
// T1^{alpha(k)} phi1 with phi1 = sum_n U1^{alpha(n)} g_n; the rest form H,
// approximated by T2^{gamma(k)} phi2 with phi2 = sum_n U2^{gamma(n)} h_n.
// Each branch gets half of the epsilon budget. Includes the Gabor family
// {E_{mb} T_{na} g} with its closed-form schedules.

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "suborbit/core_types.hpp"
#include "suborbit/operators.hpp"
#include "suborbit/schedule.hpp"
#include "suborbit/verification.hpp"

namespace suborbit {

enum class Branch { G, H };

std::string to_string(Branch branch);

struct SupportIntervalProfile {
  std::int64_t q = 1;
  std::vector<Rational> a, b;  // supp g_k in [a(k), b(k)], a(k) >= 0
  std::vector<Rational> c, d;  // supp h_k in [c(k), d(k)], c(k) < 0
  /// Largest support length over both branches.
  Rational L;
};

struct L2rPartition {
  std::vector<SampledFunction> g;
  std::vector<SampledFunction> h;
  /// 1-based positions of the branch elements in the input family.
  std::vector<std::size_t> g_positions;
  std::vector<std::size_t> h_positions;
  SupportIntervalProfile profile;
};

/// Splits F by support, keeping the input order inside each branch. An empty
/// branch is allowed and disables that branch.
L2rPartition partition_frame(const FrameFamily& family);

/// Profile of two explicit branches on one grid.
SupportIntervalProfile support_intervals(std::span<const SampledFunction> g, std::span<const SampledFunction> h);

/// alpha(1) = gamma(1) = 0 and
///   alpha(k+1) - alpha(k) = max(b(k),     [k ln2 + ln(2B/eps) + ln(lambda^2/(lambda^2-1))] / (2 ln lambda)),
///   gamma(k+1) - gamma(k) = max(L - c(k), same bracket),
/// each rounded up to a multiple of 1/q. A branch with length 0 gets an
/// empty schedule.
std::pair<PowerSchedule, PowerSchedule> schedules_l2r(const SupportIntervalProfile& profile, double lambda,
                                                      double upper, double epsilon, std::size_t length_g,
                                                      std::size_t length_h);

/// Terms U1^{alpha(n)} g_n (branch G) or U2^{gamma(n)} h_n (branch H) with
/// disjointness checked sample-wise, and the squared tail bound.
Generator build_branch_generator(Branch branch, std::span<const SampledFunction> functions,
                                 const PowerSchedule& schedule, double lambda, std::size_t n_terms, double upper);

std::pair<Generator, Generator> build_generators_l2r(std::span<const SampledFunction> g,
                                                     std::span<const SampledFunction> h, const PowerSchedule& alpha,
                                                     const PowerSchedule& gamma, double lambda, std::size_t n_terms_g,
                                                     std::size_t n_terms_h, double upper);

struct L2rResidual {
  /// Squared residual norm over the stored terms.
  LogReal measured{};
  LogReal tail{};
  LogReal bound{};
  ScaledVector offset;
};

/// Residual of row k in one branch through the telescoped identity. Asserts
/// that the truncated T annihilates the earlier terms and fixes the k-th
/// (ScheduleViolation otherwise). `cutoff` is L, used by T2.
L2rResidual residual_l2r(Branch branch, std::span<const SampledFunction> functions, const PowerSchedule& schedule,
                         double lambda, std::size_t k, std::size_t n_terms, double upper, const Rational& cutoff);

struct GaborSpec {
  SampledFunction window{1};
  Rational a;
  double b = 1.0;
  Index m_range = 0;
  Index n_range = 0;
};

/// Lattice points (m, n) with n >= 0 in path order: shell s is the U-shaped
/// ring max(|m|, n) = s, walked from (s, 0) to (-s, 0) for odd s and back for
/// even s, so consecutive points differ by one unit step. Returns the longest
/// prefix inside |m| <= m_range, n <= n_range.
std::vector<std::pair<Index, Index>> gabor_path(Index m_range, Index n_range);

struct GaborFamily {
  std::vector<SampledFunction> g;
  std::vector<SampledFunction> h;
  std::vector<std::pair<Index, Index>> g_lattice;  // (m, n) of g_k
  std::vector<std::pair<Index, Index>> h_lattice;  // (m, n) of h_k, n <= -1
  /// supp g_k in [(l_k - 1) a, C + (l_k - 1) a], supp h_k in [-r_k a, C - r_k a].
  std::vector<Index> ell;
  std::vector<Index> r;
  /// Right end of the window support.
  Rational C;
};

/// g_k = E_{m b} T_{n a} g along gabor_path; h_k mirrors it with n -> -1 - n,
/// so g_1 = g and h_1 = T_{-a} g.
GaborFamily gabor_family(const GaborSpec& spec);

/// alpha(k) = (k-1)[k(a+1)/2 + C - a + N + j + 2] and
/// gamma(k) = (k-1)[k(a+1)/2 + C + N + j + 2], on the grid 1/q.
std::pair<PowerSchedule, PowerSchedule> gabor_schedules(const Rational& C, const Rational& a, int N, int j,
                                                        std::size_t length, std::int64_t q);

struct L2rOptions {
  double lambda = 0.0;
  std::optional<double> epsilon;
  std::optional<double> upper;
  /// K per branch; defaults to the branch size.
  std::optional<std::size_t> rows;
  /// Terms per branch; defaults to min(branch size, K + 8).
  std::optional<std::size_t> n_terms;
  /// Gabor closed forms: B = 2^N, epsilon = 2^{-j}.
  std::optional<int> N;
  std::optional<int> j;
  double rank_tol = kDefaultRankTol;
};

/// General two-operator pipeline on an explicit family.
VerificationTable verify_l2r(const FrameFamily& family, const L2rOptions& options);

/// Gabor pipeline with the closed-form schedules; the union is ordered
/// g_1, h_1, g_2, h_2, ...
VerificationTable verify_gabor(const GaborSpec& spec, const L2rOptions& options);

}  // namespace suborbit
