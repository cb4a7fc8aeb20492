#pragma once

// Finite-section frame algebra: Gram and frame operators, empirical frame
// bounds, excess, operator gaps between a family and a perturbation of it,
// and the epsilon-approximation predicate.
//
// All operators are evaluated through Gram matrices of inner products, so the
// only eigensolver needed is the Hermitian Jacobi iteration in jacobi.hpp.

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

#include "suborbit/core_types.hpp"

namespace suborbit {

/// Relative eigenvalue threshold for rank decisions: eigenvalues at or below
/// kDefaultRankTol * (largest eigenvalue) count as zero.
inline constexpr double kDefaultRankTol = 1e-10;

/// G(j, k) = <f_k, f_j>.
Eigen::MatrixXcd gram_matrix(const FrameFamily& family);
Eigen::MatrixXcd gram_matrix(std::span<const Vector> vectors);

struct FrameBounds {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t section_size = 0;
};

/// Optimal frame bounds of the family as a frame for its own span: the
/// smallest Gram eigenvalue above rel_tol * largest, and the largest.
FrameBounds empirical_frame_bounds(const FrameFamily& family, double rel_tol = kDefaultRankTol);

/// K - rank(Gram).
std::size_t excess_finite(const FrameFamily& family, double rel_tol = kDefaultRankTol);

/// ||U - U~||, the norm of the difference of synthesis operators.
double synthesis_gap(const FrameFamily& f, const FrameFamily& g);

bool is_eps_approximation(const FrameFamily& f, const FrameFamily& g, double epsilon);

/// sum_k ||f_k - g_k||^2.
double pairwise_deficit(const FrameFamily& f, const FrameFamily& g);

struct DominationRow {
  std::size_t k = 0;
  double measured = 0.0;
  double budget = 0.0;
  bool pass = false;
};

struct DominationTable {
  bool holds = true;
  std::vector<DominationRow> rows;
};

/// Checks ||f_k - g_k||^2 <= budget_scale * epsilon * 2^{-k} for every k.
DominationTable geometric_domination(const FrameFamily& f, const FrameFamily& g, double epsilon,
                                     double budget_scale = 1.0);

struct PerturbationDiagnostics {
  std::size_t section_size = 0;
  double declared_lower = 0.0;  // A used for the bounds
  double declared_upper = 0.0;  // B used for the bounds
  double perturbed_lower_emp = 0.0;
  double perturbed_upper_emp = 0.0;
  std::size_t joint_span_dim = 0;
  /// F and G do not span the same subspace; S^{-1} gaps were taken with
  /// pseudo-inverses on the joint span.
  bool spans_differ = false;
};

struct PerturbationReport {
  double epsilon = 0.0;
  double synthesis_gap = 0.0;
  double frame_op_gap = 0.0;
  double inv_frame_op_gap = 0.0;
  double bound_synthesis = 0.0;
  double bound_frame_op = 0.0;
  double bound_inv = 0.0;
  double new_lower_bound = 0.0;
  double new_upper_bound = 0.0;
  std::size_t excess_original = 0;
  std::size_t excess_perturbed = 0;
  bool all_bounds_hold = false;

  PerturbationDiagnostics diagnostics;
};

/// Measured operator gaps between F and its perturbation G, next to the
/// perturbation-theoretic bounds for an epsilon-approximation of a frame
/// with bounds A, B. Requires 0 < epsilon < A <= B and equal lengths.
/// `slack` is the absolute tolerance allowed on every comparison.
PerturbationReport perturbation_report(const FrameFamily& f, const FrameFamily& g, double epsilon, double lower,
                                       double upper, double rel_tol = kDefaultRankTol, double slack = 1e-9);

/// Smallest eigenvalue of the Gram matrix of the normalized family; positive
/// iff the finite section is linearly independent.
double independence_margin(const FrameFamily& family);

}  // namespace suborbit
