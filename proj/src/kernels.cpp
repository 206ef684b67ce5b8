#include "isomush/kernels.hpp"

#include <sstream>

#include "isomush/error.hpp"

namespace isomush {

int StackedBasis::total_rows() const {
  int total = 0;
  for (const auto& block : blocks) total += static_cast<int>(block.rows());
  return total;
}

std::vector<int> StackedBasis::block_sizes() const {
  std::vector<int> sizes;
  sizes.reserve(blocks.size());
  for (const auto& block : blocks) sizes.push_back(static_cast<int>(block.rows()));
  return sizes;
}

void check_dimensions(const StackedBasis& phi, const UniverseMatching& U, const UniverseMaps& Q) {
  const int k = phi.num_shapes();
  std::ostringstream msg;
  if (U.num_shapes() != k || Q.num_shapes() != k) {
    msg << "shape count mismatch: basis " << k << ", matching " << U.num_shapes() << ", maps " << Q.num_shapes();
    throw usage_error(msg.str());
  }
  for (int i = 0; i < k; ++i) {
    if (static_cast<int>(U.assignment[i].size()) != phi.blocks[i].rows()) {
      msg << "shape " << i << ": matching has " << U.assignment[i].size() << " rows, basis has "
          << phi.blocks[i].rows();
      throw usage_error(msg.str());
    }
    if (phi.blocks[i].cols() != phi.basis_size() || Q.blocks[i].rows() != phi.basis_size() ||
        Q.blocks[i].cols() != Q.cols()) {
      msg << "shape " << i << ": basis width " << phi.blocks[i].cols() << " incompatible with map block "
          << Q.blocks[i].rows() << "x" << Q.blocks[i].cols();
      throw usage_error(msg.str());
    }
  }
}

namespace kernels {

namespace {

std::vector<Eigen::MatrixXd> aligned_blocks(const StackedBasis& phi, const UniverseMaps& Q) {
  std::vector<Eigen::MatrixXd> A(phi.num_shapes());
#pragma omp parallel for schedule(static)
  for (int i = 0; i < phi.num_shapes(); ++i) A[i] = phi.blocks[i] * Q.blocks[i];
  return A;
}

// Scatter in fixed shape order so the sum does not depend on the thread count.
Eigen::MatrixXd scatter(const std::vector<Eigen::MatrixXd>& A, const UniverseMatching& U, int cols) {
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(U.universe_size, cols);
  for (int i = 0; i < U.num_shapes(); ++i) {
    const auto& idx = U.assignment[i];
    for (std::size_t u = 0; u < idx.size(); ++u) S.row(idx[u]) += A[i].row(static_cast<Eigen::Index>(u));
  }
  return S;
}

}  // namespace

Eigen::MatrixXd universe_sum(const StackedBasis& phi, const UniverseMatching& U, const UniverseMaps& Q) {
  return scatter(aligned_blocks(phi, Q), U, Q.cols());
}

Eigen::MatrixXd u_step_scores(const StackedBasis& phi, const UniverseMatching& U, const UniverseMaps& Q) {
  const auto A = aligned_blocks(phi, Q);
  const Eigen::MatrixXd St = scatter(A, U, Q.cols()).transpose();  // B = A^T U
  const auto offsets = U.block_offsets();
  Eigen::MatrixXd score(offsets.back(), U.universe_size);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < phi.num_shapes(); ++i) score.middleRows(offsets[i], A[i].rows()).noalias() = A[i] * St;
  return score;
}

Eigen::MatrixXd q_step_scores(const StackedBasis& phi, const UniverseMatching& U, const UniverseMaps& Q) {
  const Eigen::MatrixXd D = universe_sum(phi, U, Q);  // D = C Q
  const int b = phi.basis_size();
  Eigen::MatrixXd score(phi.num_shapes() * b, Q.cols());
#pragma omp parallel for schedule(static)
  for (int i = 0; i < phi.num_shapes(); ++i) {
    const auto& idx = U.assignment[i];
    Eigen::MatrixXd gathered(static_cast<Eigen::Index>(idx.size()), Q.cols());  // P_i D
    for (std::size_t u = 0; u < idx.size(); ++u) gathered.row(static_cast<Eigen::Index>(u)) = D.row(idx[u]);
    score.middleRows(i * b, b).noalias() = phi.blocks[i].transpose() * gathered;
  }
  return score;
}

namespace reference {

Eigen::MatrixXd universe_sum(const StackedBasis& phi, const UniverseMatching& U, const UniverseMaps& Q) {
  const int cols = Q.cols();
  const int b = phi.basis_size();
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(U.universe_size, cols);
  for (int i = 0; i < phi.num_shapes(); ++i) {
    const auto& P = phi.blocks[i];
    const auto& C = Q.blocks[i];
    for (Eigen::Index u = 0; u < P.rows(); ++u) {
      const int row = U.assignment[i][u];
      for (int c = 0; c < cols; ++c) {
        double acc = 0.0;
        for (int l = 0; l < b; ++l) acc += P(u, l) * C(l, c);
        S(row, c) += acc;
      }
    }
  }
  return S;
}

Eigen::MatrixXd u_step_scores(const StackedBasis& phi, const UniverseMatching& U, const UniverseMaps& Q) {
  const Eigen::MatrixXd S = universe_sum(phi, U, Q);
  const int cols = Q.cols();
  const int b = phi.basis_size();
  const int d = U.universe_size;
  Eigen::MatrixXd score(phi.total_rows(), d);
  Eigen::Index row = 0;
  std::vector<double> a(cols);
  for (int i = 0; i < phi.num_shapes(); ++i) {
    const auto& P = phi.blocks[i];
    const auto& C = Q.blocks[i];
    for (Eigen::Index u = 0; u < P.rows(); ++u, ++row) {
      for (int c = 0; c < cols; ++c) {
        a[c] = 0.0;
        for (int l = 0; l < b; ++l) a[c] += P(u, l) * C(l, c);
      }
      for (int x = 0; x < d; ++x) {
        double acc = 0.0;
        for (int c = 0; c < cols; ++c) acc += a[c] * S(x, c);
        score(row, x) = acc;
      }
    }
  }
  return score;
}

Eigen::MatrixXd q_step_scores(const StackedBasis& phi, const UniverseMatching& U, const UniverseMaps& Q) {
  const Eigen::MatrixXd D = universe_sum(phi, U, Q);
  const int cols = Q.cols();
  const int b = phi.basis_size();
  Eigen::MatrixXd score = Eigen::MatrixXd::Zero(phi.num_shapes() * b, cols);
  for (int i = 0; i < phi.num_shapes(); ++i) {
    const auto& P = phi.blocks[i];
    for (Eigen::Index u = 0; u < P.rows(); ++u) {
      const int x = U.assignment[i][u];
      for (int l = 0; l < b; ++l) {
        for (int c = 0; c < cols; ++c) score(i * b + l, c) += P(u, l) * D(x, c);
      }
    }
  }
  return score;
}

}  // namespace reference
}  // namespace kernels
}  // namespace isomush
