#include "isomush/sync.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "isomush/assignment.hpp"
#include "isomush/error.hpp"
#include "isomush/ortho.hpp"

namespace isomush {

Eigen::MatrixXd band_filter(const Eigen::Ref<const Eigen::MatrixXd>& C, int radius) {
  if (radius < 0) throw usage_error("band radius must be non-negative");
  Eigen::MatrixXd out = C;
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
      if (std::abs(r - c) > radius) out(r, c) = 0.0;
    }
  }
  return out;
}

OrthoSyncResult ortho_sync(std::span<const PairwiseFmap> pairwise, int k, int b, int cols) {
  if (k < 1 || b < 1) throw usage_error("synchronisation needs k >= 1 and b >= 1");
  if (cols == 0) cols = b;
  if (cols < b) throw usage_error("universe map width must be at least b");

  const int n = k * b;
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < k; ++i) W.block(i * b, i * b, b, b).setIdentity();
  for (const auto& p : pairwise) {
    if (p.source == p.target || p.source < 0 || p.target < 0 || p.source >= k || p.target >= k) {
      throw usage_error("pairwise map indices out of range");
    }
    if (p.C.rows() != b || p.C.cols() != b) throw usage_error("pairwise map has the wrong size for synchronisation");
    W.block(p.source * b, p.target * b, b, b) = p.C;
    W.block(p.target * b, p.source * b, b, b) = p.C.transpose();
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(W);
  if (solver.info() != Eigen::Success) throw numerical_error("synchronisation eigensolver failed");

  OrthoSyncResult result;
  const auto& values = solver.eigenvalues();
  result.eigen_gap = n > b ? values[n - b] - values[n - b - 1] : std::numeric_limits<double>::infinity();
  result.ambiguous = result.eigen_gap < 1e-10;

  // Top-b eigenvectors span [C_1; ...; C_k] up to a common gauge and a 1/sqrt(k) scale.
  const Eigen::MatrixXd top = solver.eigenvectors().rightCols(b) * std::sqrt(static_cast<double>(k));
  result.maps.blocks.resize(k);
  for (int i = 0; i < k; ++i) {
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(b, cols);
    block.leftCols(b) = top.middleRows(i * b, b);
    result.maps.blocks[i] = project_orthogonal(block).values;
  }
  return result;
}

Eigen::MatrixXd build_universe_embedding(std::span<const SpectralBasis> bases, const UniverseMaps& maps) {
  if (static_cast<int>(bases.size()) != maps.num_shapes()) throw usage_error("basis count does not match map count");
  int total = 0;
  for (std::size_t i = 0; i < bases.size(); ++i) {
    if (bases[i].size() < maps.rows()) throw usage_error("basis of shape " + std::to_string(i) + " is smaller than b");
    total += bases[i].num_vertices();
  }
  Eigen::MatrixXd psi(total, maps.cols());
  int offset = 0;
  for (std::size_t i = 0; i < bases.size(); ++i) {
    const int mi = bases[i].num_vertices();
    psi.middleRows(offset, mi) = bases[i].phi.leftCols(maps.rows()) * maps.blocks[i];
    offset += mi;
  }
  return psi;
}

UniverseMatching perm_sync(const Eigen::Ref<const Eigen::MatrixXd>& psi, std::span<const int> block_sizes,
                           int universe_size) {
  const int k = static_cast<int>(block_sizes.size());
  int total = 0;
  for (int i = 0; i < k; ++i) {
    if (block_sizes[i] > universe_size) {
      std::ostringstream msg;
      msg << "universe size " << universe_size << " is smaller than shape " << i << " with " << block_sizes[i]
          << " vertices";
      throw numerical_error(msg.str());
    }
    total += block_sizes[i];
  }
  if (total != psi.rows()) throw usage_error("block sizes do not sum to the embedding row count");

  UniverseMatching U;
  U.universe_size = universe_size;
  U.assignment.resize(k);
  if (k == 0) return U;

  Eigen::MatrixXd centroids = Eigen::MatrixXd::Zero(universe_size, psi.cols());
  std::vector<int> counts(universe_size, 0);
  auto& seed = U.assignment[0];
  seed.resize(block_sizes[0]);
  for (int v = 0; v < block_sizes[0]; ++v) {
    seed[v] = v;
    centroids.row(v) = psi.row(v);
    counts[v] = 1;
  }

  int offset = block_sizes[0];
  for (int i = 1; i < k; ++i) {
    const auto rows = psi.middleRows(offset, block_sizes[i]);
    const Eigen::MatrixXd similarity = rows * centroids.transpose();
    U.assignment[i] = solve_lap_max(similarity).assign;
    for (int u = 0; u < block_sizes[i]; ++u) {
      const int c = U.assignment[i][u];
      ++counts[c];
      centroids.row(c) += (rows.row(u) - centroids.row(c)) / counts[c];
    }
    offset += block_sizes[i];
  }
  return U;
}

}  // namespace isomush
