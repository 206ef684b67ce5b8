#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "isomush/fmap.hpp"
#include "isomush/spectral.hpp"
#include "isomush/universe.hpp"

namespace isomush {

inline constexpr int kDefaultBandRadius = 6;

// Zeroes every entry with |row - col| > radius.
Eigen::MatrixXd band_filter(const Eigen::Ref<const Eigen::MatrixXd>& C, int radius);

struct OrthoSyncResult {
  UniverseMaps maps;
  // Difference between the b-th and (b+1)-th largest eigenvalue of the block
  // matrix; infinite when k = 1.
  double eigen_gap = 0.0;
  bool ambiguous = false;  // eigen_gap below 1e-10
};

// Spectral synchronisation of pairwise maps C_ij ~ C_i C_j^T. `pairwise`
// holds each unordered pair once, in either direction; missing pairs enter as
// zero blocks. The recovered blocks are padded with zero columns up to
// `cols` (>= b) and projected onto the semi-orthogonal set.
OrthoSyncResult ortho_sync(std::span<const PairwiseFmap> pairwise, int k, int b, int cols = 0);

// Psi: vertical stack of Phi_i C_i (m x b').
Eigen::MatrixXd build_universe_embedding(std::span<const SpectralBasis> bases, const UniverseMaps& maps);

// Greedy-reference clustering of Psi rows into d universe points: shape 0
// seeds points 0..m_0-1, every later shape is assigned by a linear assignment
// against the current centroids (inner-product similarity), after which the
// centroids of the assigned points are updated as running means.
UniverseMatching perm_sync(const Eigen::Ref<const Eigen::MatrixXd>& psi, std::span<const int> block_sizes,
                           int universe_size);

// Text bundle holding U (per-shape universe indices) and Q (per-shape blocks).
void save_bundle(const std::string& path, const UniverseMatching& U, const UniverseMaps& Q);
void load_bundle(const std::string& path, UniverseMatching& U, UniverseMaps& Q);

}  // namespace isomush
