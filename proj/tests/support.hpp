#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "suborbit/core_types.hpp"
#include "suborbit/verify_suite.hpp"

namespace suborbit::testing {

// Seeded draws; every generator below is a pure function of the engine state.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit_uniform(engine_()); }
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  Complex complex_unit_box() { return {uniform(-1, 1), uniform(-1, 1)}; }

  // Sparse vector supported in 1..dim with at least one nonzero entry.
  CoordinateVector sparse(Index dim, std::size_t max_nnz) {
    CoordinateVector::Entries e;
    const auto cap = std::min<std::int64_t>(static_cast<std::int64_t>(max_nnz), dim);
    const auto nnz = static_cast<std::size_t>(integer(1, cap));
    while (e.size() < nnz) e[integer(1, dim)] = complex_unit_box();
    return CoordinateVector(std::move(e));
  }

  // K vectors in C^D with every entry drawn; full rank almost surely.
  std::vector<Vector> dense_family(std::size_t K, Index D) {
    std::vector<Vector> out;
    for (std::size_t k = 0; k < K; ++k) {
      CoordinateVector::Entries e;
      for (Index j = 1; j <= D; ++j) e[j] = complex_unit_box();
      out.emplace_back(CoordinateVector(std::move(e)));
    }
    return out;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// Dense copy of a coordinate vector in C^dim, coordinates 1..dim.
inline Eigen::VectorXcd dense(const CoordinateVector& v, Index dim) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim);
  for (const auto& [j, x] : v.entries()) out(j - 1) = x;
  return out;
}

inline Index max_support(const std::vector<Vector>& vs) {
  Index m = 1;
  for (const auto& v : vs) m = std::max(m, std::get<CoordinateVector>(v).max_index());
  return m;
}

// Columns are the family elements; the synthesis operator as a matrix.
inline Eigen::MatrixXcd synthesis_matrix(const std::vector<Vector>& vs, Index dim) {
  Eigen::MatrixXcd U(dim, static_cast<Eigen::Index>(vs.size()));
  for (std::size_t k = 0; k < vs.size(); ++k) U.col(static_cast<Eigen::Index>(k)) = dense(std::get<CoordinateVector>(vs[k]), dim);
  return U;
}

inline double relative_error(double measured, double expected) {
  if (expected == 0.0) return std::abs(measured);
  return std::abs(measured - expected) / std::abs(expected);
}

}  // namespace suborbit::testing
