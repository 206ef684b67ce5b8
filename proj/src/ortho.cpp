#include "isomush/ortho.hpp"

#include <Eigen/SVD>

#include "isomush/error.hpp"

namespace isomush {

OrthoBlock project_orthogonal(const Eigen::Ref<const Eigen::MatrixXd>& A) {
  if (A.rows() > A.cols()) throw usage_error("orthogonal projection needs rows <= cols");
  if (!A.allFinite()) throw numerical_error("orthogonal projection input is not finite");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  OrthoBlock out;
  out.values = svd.matrixU() * svd.matrixV().transpose();
  const auto& sigma = svd.singularValues();
  out.gauge_ambiguous = sigma.size() > 0 && sigma[sigma.size() - 1] < 1e-12 * sigma[0];
  return out;
}

UniverseMaps project_blockwise_Q(const Eigen::Ref<const Eigen::MatrixXd>& score, int k) {
  if (k <= 0 || score.rows() % k != 0) throw usage_error("score rows are not a multiple of the shape count");
  const Eigen::Index b = score.rows() / k;
  if (!score.allFinite()) throw numerical_error("orthogonal projection input is not finite");
  if (b > score.cols()) throw usage_error("orthogonal projection needs rows <= cols");
  UniverseMaps out;
  out.blocks.resize(k);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < k; ++i) out.blocks[i] = project_orthogonal(score.middleRows(i * b, b)).values;
  return out;
}

}  // namespace isomush
