#pragma once

#include <vector>

#include <Eigen/Core>

#include "isomush/universe.hpp"

namespace isomush {

// Block-diagonal stack diag(Phi_1, ..., Phi_k), kept as its blocks.
struct StackedBasis {
  std::vector<Eigen::MatrixXd> blocks;  // m_i x b

  int num_shapes() const { return static_cast<int>(blocks.size()); }
  int basis_size() const { return blocks.empty() ? 0 : static_cast<int>(blocks.front().cols()); }
  int total_rows() const;
  std::vector<int> block_sizes() const;
};

// Throws usage_error unless U, Q and Phi describe the same k shapes with
// matching block sizes and basis width.
void check_dimensions(const StackedBasis& phi, const UniverseMatching& U, const UniverseMaps& Q);

// Products used by the alternating updates. Every kernel exists twice: an
// OpenMP version used by the solver and a plain serial loop version kept as
// the reference for tests and benchmarks. U enters only through
// gather/scatter of universe indices.
namespace kernels {

// S = U^T Phi Q = sum_i P_i^T Phi_i C_i  (d x b').
Eigen::MatrixXd universe_sum(const StackedBasis& phi, const UniverseMatching& U, const UniverseMaps& Q);

// Z U with Z = Phi Q Q^T Phi^T, evaluated as A (A^T U) with A = Phi Q (m x d).
Eigen::MatrixXd u_step_scores(const StackedBasis& phi, const UniverseMatching& U, const UniverseMaps& Q);

// Zbar Q with Zbar = Phi^T U U^T Phi, evaluated as C^T (C Q) with C = U^T Phi
// (kb x b').
Eigen::MatrixXd q_step_scores(const StackedBasis& phi, const UniverseMatching& U, const UniverseMaps& Q);

namespace reference {

Eigen::MatrixXd universe_sum(const StackedBasis& phi, const UniverseMatching& U, const UniverseMaps& Q);
Eigen::MatrixXd u_step_scores(const StackedBasis& phi, const UniverseMatching& U, const UniverseMaps& Q);
Eigen::MatrixXd q_step_scores(const StackedBasis& phi, const UniverseMatching& U, const UniverseMaps& Q);

}  // namespace reference
}  // namespace kernels
}  // namespace isomush
