#include "suborbit/frame_algebra.hpp"

#include <algorithm>
#include <cmath>

#include "suborbit/jacobi.hpp"

namespace suborbit {

namespace {

void require_same_length(const FrameFamily& f, const FrameFamily& g) {
  if (f.size() != g.size()) {
    throw PreconditionError("families differ in length: " + std::to_string(f.size()) + " vs " +
                            std::to_string(g.size()));
  }
}

std::vector<Vector> differences(const FrameFamily& f, const FrameFamily& g) {
  require_same_length(f, g);
  std::vector<Vector> out;
  out.reserve(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out.push_back(subtract(f[i], g[i]));
  return out;
}

double largest(const Eigen::VectorXd& values) { return values.size() == 0 ? 0.0 : values(values.size() - 1); }

std::size_t rank_of(const Eigen::VectorXd& values, double rel_tol) {
  const double top = largest(values);
  if (!(top > 0.0)) return 0;
  return static_cast<std::size_t>((values.array() > rel_tol * top).count());
}

}  // namespace

Eigen::MatrixXcd gram_matrix(std::span<const Vector> vectors) {
  const auto n = static_cast<Eigen::Index>(vectors.size());
  Eigen::MatrixXcd g(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index j = 0; j <= k; ++j) {
      const Complex value = inner(vectors[static_cast<std::size_t>(k)], vectors[static_cast<std::size_t>(j)]);
      g(j, k) = value;
      g(k, j) = std::conj(value);
    }
    g(k, k) = Complex(g(k, k).real(), 0.0);
  }
  return g;
}

Eigen::MatrixXcd gram_matrix(const FrameFamily& family) { return gram_matrix(family.elements()); }

FrameBounds empirical_frame_bounds(const FrameFamily& family, double rel_tol) {
  const Eigen::VectorXd values = jacobi_eigenvalues(gram_matrix(family));
  const double top = largest(values);
  if (!(top > 0.0)) {
    throw DegenerateFamily("every Gram eigenvalue is zero; the family spans nothing");
  }
  FrameBounds out;
  out.upper = top;
  out.section_size = family.size();
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values(i) > rel_tol * top) {
      out.lower = values(i);
      break;
    }
  }
  return out;
}

std::size_t excess_finite(const FrameFamily& family, double rel_tol) {
  return family.size() - rank_of(jacobi_eigenvalues(gram_matrix(family)), rel_tol);
}

double synthesis_gap(const FrameFamily& f, const FrameFamily& g) {
  const Eigen::VectorXd values = jacobi_eigenvalues(gram_matrix(differences(f, g)));
  return std::sqrt(std::max(0.0, largest(values)));
}

bool is_eps_approximation(const FrameFamily& f, const FrameFamily& g, double epsilon) {
  if (!(epsilon > 0.0)) {
    throw PreconditionError("epsilon must be positive");
  }
  const double gap = synthesis_gap(f, g);
  return gap * gap <= epsilon;
}

double pairwise_deficit(const FrameFamily& f, const FrameFamily& g) {
  double sum = 0.0;
  for (const auto& d : differences(f, g)) sum += norm_sq(d);
  return sum;
}

DominationTable geometric_domination(const FrameFamily& f, const FrameFamily& g, double epsilon, double budget_scale) {
  DominationTable table;
  const auto diffs = differences(f, g);
  for (std::size_t i = 0; i < diffs.size(); ++i) {
    DominationRow row;
    row.k = i + 1;
    row.measured = norm_sq(diffs[i]);
    row.budget = budget_scale * std::ldexp(epsilon, -static_cast<int>(row.k));
    row.pass = row.measured <= row.budget;
    table.holds = table.holds && row.pass;
    table.rows.push_back(row);
  }
  return table;
}

PerturbationReport perturbation_report(const FrameFamily& f, const FrameFamily& g, double epsilon, double lower,
                                       double upper, double rel_tol, double slack) {
  require_same_length(f, g);
  if (!(epsilon > 0.0)) {
    throw PreconditionError("epsilon must be positive");
  }
  if (!(lower > 0.0) || lower > upper) {
    throw PreconditionError("frame bounds need 0 < A <= B");
  }
  if (epsilon >= lower) {
    throw PreconditionError("epsilon must lie in ]0, A[; got epsilon = " + std::to_string(epsilon) +
                            ", A = " + std::to_string(lower));
  }

  PerturbationReport r;
  r.epsilon = epsilon;
  const double root_eps_a = std::sqrt(epsilon / lower);
  const double root_eps_b = std::sqrt(epsilon / upper);
  r.bound_synthesis = std::sqrt(epsilon);
  r.bound_frame_op = std::sqrt(epsilon * upper) * (2.0 + root_eps_b);
  r.new_lower_bound = lower * (1.0 - root_eps_a) * (1.0 - root_eps_a);
  r.new_upper_bound = upper * (1.0 + root_eps_b) * (1.0 + root_eps_b);
  r.bound_inv = r.bound_frame_op / (lower * lower * (1.0 - root_eps_a) * (1.0 - root_eps_a));

  r.synthesis_gap = synthesis_gap(f, g);

  // Coordinates of both families in an orthonormal basis of their joint span:
  // with J = V diag(mu) V^* the Gram of (f_1..f_K, g_1..g_K), the vector v_b
  // has coordinates sqrt(mu_i) conj(V(b, i)) along the i-th basis vector.
  const auto k = static_cast<Eigen::Index>(f.size());
  std::vector<Vector> joint = f.elements();
  joint.insert(joint.end(), g.elements().begin(), g.elements().end());
  const auto joint_eig = jacobi_eigen(gram_matrix(joint), true);
  const double joint_top = largest(joint_eig.values);
  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = 0; i < joint_eig.values.size(); ++i) {
    if (joint_eig.values(i) > rel_tol * joint_top) kept.push_back(i);
  }
  const auto dim = static_cast<Eigen::Index>(kept.size());
  Eigen::MatrixXcd coords(dim, 2 * k);
  for (Eigen::Index row = 0; row < dim; ++row) {
    const Eigen::Index i = kept[static_cast<std::size_t>(row)];
    coords.row(row) = std::sqrt(joint_eig.values(i)) * joint_eig.vectors.col(i).adjoint();
  }
  const Eigen::MatrixXcd synth_f = coords.leftCols(k);
  const Eigen::MatrixXcd synth_g = coords.rightCols(k);
  const Eigen::MatrixXcd frame_op_f = synth_f * synth_f.adjoint();
  const Eigen::MatrixXcd frame_op_g = synth_g * synth_g.adjoint();

  r.frame_op_gap = hermitian_norm(frame_op_f - frame_op_g);
  r.inv_frame_op_gap = hermitian_norm(hermitian_pinv(frame_op_f, rel_tol) - hermitian_pinv(frame_op_g, rel_tol));

  const Eigen::VectorXd gram_f = jacobi_eigenvalues(gram_matrix(f));
  const Eigen::VectorXd gram_g = jacobi_eigenvalues(gram_matrix(g));
  r.excess_original = f.size() - rank_of(gram_f, rel_tol);
  r.excess_perturbed = g.size() - rank_of(gram_g, rel_tol);

  auto& d = r.diagnostics;
  d.section_size = f.size();
  d.declared_lower = lower;
  d.declared_upper = upper;
  d.joint_span_dim = kept.size();
  d.spans_differ = rank_of(jacobi_eigenvalues(frame_op_f), rel_tol) != kept.size() ||
                   rank_of(jacobi_eigenvalues(frame_op_g), rel_tol) != kept.size();
  const FrameBounds perturbed = empirical_frame_bounds(g, rel_tol);
  d.perturbed_lower_emp = perturbed.lower;
  d.perturbed_upper_emp = perturbed.upper;

  r.all_bounds_hold = r.synthesis_gap <= r.bound_synthesis + slack && r.frame_op_gap <= r.bound_frame_op + slack &&
                      r.inv_frame_op_gap <= r.bound_inv + slack &&
                      d.perturbed_lower_emp >= r.new_lower_bound - slack &&
                      d.perturbed_upper_emp <= r.new_upper_bound + slack && r.excess_original == r.excess_perturbed;
  return r;
}

double independence_margin(const FrameFamily& family) {
  std::vector<Vector> normalized;
  normalized.reserve(family.size());
  for (std::size_t i = 0; i < family.size(); ++i) {
    const double n2 = norm_sq(family[i]);
    if (n2 == 0.0) {
      throw DegenerateFamily("family element " + std::to_string(i + 1) + " is the zero vector");
    }
    normalized.push_back(scaled(family[i], 1.0 / std::sqrt(n2)));
  }
  const Eigen::VectorXd values = jacobi_eigenvalues(gram_matrix(normalized));
  return std::max(0.0, values(0));
}

}  // namespace suborbit
