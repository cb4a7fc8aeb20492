#pragma once

// Cyclic Jacobi eigensolver for small dense Hermitian (or real symmetric)
// matrices. Templated on the Eigen expression so that it accepts blocks,
// products and maps without copies at the call site.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "suborbit/core_types.hpp"

namespace suborbit {

template <typename Scalar>
struct HermitianEigen {
  using RealScalar = typename Eigen::NumTraits<Scalar>::Real;
  Eigen::Matrix<RealScalar, Eigen::Dynamic, 1> values;            // ascending
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> vectors;  // columns match values
  int sweeps = 0;
};

/// Eigen-decomposition by cyclic Jacobi rotations. Stops once the
/// off-diagonal Frobenius norm is at most tol * ||A||_F.
template <typename Derived>
HermitianEigen<typename Derived::Scalar> jacobi_eigen(const Eigen::MatrixBase<Derived>& matrix,
                                                      bool compute_vectors = true, double tol = 1e-15,
                                                      int max_sweeps = 100) {
  using Scalar = typename Derived::Scalar;
  using RealScalar = typename Eigen::NumTraits<Scalar>::Real;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Eigen::numext::conj;

  if (matrix.rows() != matrix.cols()) {
    throw PreconditionError("jacobi_eigen needs a square matrix");
  }
  Matrix a = matrix;
  const Eigen::Index n = a.rows();
  const RealScalar frob = a.norm();
  if ((a - a.adjoint()).norm() > RealScalar(1e-12) * std::max(frob, RealScalar(1))) {
    throw PreconditionError("jacobi_eigen needs a Hermitian matrix");
  }
  a = (a + a.adjoint()) / RealScalar(2);

  HermitianEigen<Scalar> out;
  Matrix v;
  if (compute_vectors) v = Matrix::Identity(n, n);

  const auto off_norm = [&]() {
    RealScalar sum = 0;
    for (Eigen::Index q = 0; q < n; ++q)
      for (Eigen::Index p = 0; p < n; ++p)
        if (p != q) sum += Eigen::numext::abs2(a(p, q));
    return std::sqrt(sum);
  };

  int sweep = 0;
  for (; sweep < max_sweeps && off_norm() > RealScalar(tol) * frob; ++sweep) {
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const Scalar apq = a(p, q);
        const RealScalar mag = std::abs(apq);
        if (mag == RealScalar(0)) continue;
        const Scalar phase = apq / mag;
        const RealScalar app = Eigen::numext::real(a(p, p));
        const RealScalar aqq = Eigen::numext::real(a(q, q));
        const RealScalar theta = (aqq - app) / (RealScalar(2) * mag);
        const RealScalar t = (theta >= 0 ? RealScalar(1) : RealScalar(-1)) /
                             (std::abs(theta) + std::sqrt(theta * theta + RealScalar(1)));
        const RealScalar c = RealScalar(1) / std::sqrt(t * t + RealScalar(1));
        const RealScalar s = t * c;
        const Scalar cphase = conj(phase);

        // A <- A J with J = [[c, s], [-s conj(phase), c conj(phase)]] on (p, q).
        for (Eigen::Index r = 0; r < n; ++r) {
          const Scalar xp = a(r, p);
          const Scalar xq = a(r, q);
          a(r, p) = c * xp - s * cphase * xq;
          a(r, q) = s * xp + c * cphase * xq;
        }
        // A <- J^* A
        for (Eigen::Index r = 0; r < n; ++r) {
          const Scalar xp = a(p, r);
          const Scalar xq = a(q, r);
          a(p, r) = c * xp - s * phase * xq;
          a(q, r) = s * xp + c * phase * xq;
        }
        a(p, q) = Scalar(0);
        a(q, p) = Scalar(0);
        a(p, p) = Scalar(Eigen::numext::real(a(p, p)));
        a(q, q) = Scalar(Eigen::numext::real(a(q, q)));
        if (compute_vectors) {
          for (Eigen::Index r = 0; r < n; ++r) {
            const Scalar xp = v(r, p);
            const Scalar xq = v(r, q);
            v(r, p) = c * xp - s * cphase * xq;
            v(r, q) = s * xp + c * cphase * xq;
          }
        }
      }
    }
  }
  out.sweeps = sweep;

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index(0));
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    return Eigen::numext::real(a(i, i)) < Eigen::numext::real(a(j, j));
  });
  out.values.resize(n);
  if (compute_vectors) out.vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = Eigen::numext::real(a(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]));
    if (compute_vectors) out.vectors.col(i) = v.col(order[static_cast<std::size_t>(i)]);
  }
  return out;
}

template <typename Derived>
Eigen::Matrix<typename Eigen::NumTraits<typename Derived::Scalar>::Real, Eigen::Dynamic, 1> jacobi_eigenvalues(
    const Eigen::MatrixBase<Derived>& matrix) {
  return jacobi_eigen(matrix, false).values;
}

/// Spectral norm of a Hermitian matrix: the largest |eigenvalue|.
template <typename Derived>
double hermitian_norm(const Eigen::MatrixBase<Derived>& matrix) {
  if (matrix.rows() == 0) return 0.0;
  const auto values = jacobi_eigenvalues(matrix);
  return std::max(std::abs(static_cast<double>(values(0))), std::abs(static_cast<double>(values(values.size() - 1))));
}

/// Moore-Penrose inverse of a Hermitian matrix; eigenvalues at or below
/// rel_tol * (largest |eigenvalue|) are treated as zero.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> hermitian_pinv(
    const Eigen::MatrixBase<Derived>& matrix, double rel_tol) {
  using Scalar = typename Derived::Scalar;
  const auto eig = jacobi_eigen(matrix, true);
  const Eigen::Index n = matrix.rows();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
  if (n == 0) return out;
  const double top = std::max(std::abs(static_cast<double>(eig.values(0))),
                              std::abs(static_cast<double>(eig.values(n - 1))));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double ev = static_cast<double>(eig.values(i));
    if (std::abs(ev) > rel_tol * top) {
      out += (eig.vectors.col(i) / ev) * eig.vectors.col(i).adjoint();
    }
  }
  return out;
}

}  // namespace suborbit
