#pragma once

#include <Eigen/Core>

#include "isomush/universe.hpp"

namespace isomush {

struct OrthoBlock {
  Eigen::MatrixXd values;  // b x b', values * values^T = I_b
  // Set when the input's smallest singular value is below 1e-12 of the
  // largest; the projection is then not unique.
  bool gauge_ambiguous = false;
};

// Nearest semi-orthogonal matrix: U V^T from the thin SVD of A (rows <= cols).
// Reflections are allowed; the determinant is not constrained.
OrthoBlock project_orthogonal(const Eigen::Ref<const Eigen::MatrixXd>& A);

// Projects each of the k stacked b x b' blocks of `score`.
UniverseMaps project_blockwise_Q(const Eigen::Ref<const Eigen::MatrixXd>& score, int k);

}  // namespace isomush
