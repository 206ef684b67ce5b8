#pragma once

#include <filesystem>
#include <vector>

#include <Eigen/Core>

#include "isomush/descriptors.hpp"
#include "isomush/spectral.hpp"

namespace isomush {

// Functional maps act on row vectors of spectral coefficients: a point u of
// shape i with embedding Phi_i(u,:) is carried to Phi_i(u,:) * C on shape j.
// This is the convention under which C_ij = C_i C_j^T composes through the
// universe.
struct PairwiseFmap {
  int source = 0;
  int target = 0;
  Eigen::MatrixXd C;  // b_cur x b_cur

  int size() const { return static_cast<int>(C.rows()); }
};

inline constexpr int kUnmatched = -1;

// match[u] is the vertex of `target` paired with vertex u of `source`, or
// kUnmatched.
struct PairwiseMap {
  int source = 0;
  int target = 0;
  std::vector<int> match;
  // Every source vertex landed on the same target vertex.
  bool degenerate = false;

  int num_matched() const;
  bool is_permutation(int target_size) const;
};

// Mass-weighted spectral coefficients of descriptor columns, laid out with one
// descriptor per row (q x b): (Phi^T M D)^T.
Eigen::MatrixXd descriptor_coefficients(const SpectralBasis& basis, const Eigen::MatrixXd& descriptors);

// Least-squares C minimising ||F C - G||_F for q x b coefficient matrices.
// Throws when F is rank deficient.
PairwiseFmap solve_fmap(const Eigen::Ref<const Eigen::MatrixXd>& F, const Eigen::Ref<const Eigen::MatrixXd>& G,
                        int source = 0, int target = 1);

// Nearest neighbour of Phi_i(u,:) C among the rows of Phi_j, brute force;
// ties go to the lowest target index. Both bases are truncated to C's size.
PairwiseMap extract_pointwise(const SpectralBasis& basis_i, const SpectralBasis& basis_j, const PairwiseFmap& fmap);

struct UpsampleResult {
  PairwiseFmap fmap;
  PairwiseMap map;  // pointwise map extracted from `fmap`
};

// Alternates pointwise extraction and refitting C = Phi_i^T M_i Pi Phi_j at a
// spectral size grown by `step` until `target_size` is reached.
UpsampleResult spectral_upsample(const SpectralBasis& basis_i, const SpectralBasis& basis_j, const PairwiseFmap& initial,
                                 int target_size, int step);

// Two-column "source target" text, 0-based, one line per matched vertex.
void write_pairwise_map(const std::filesystem::path& path, const PairwiseMap& map);
PairwiseMap read_pairwise_map(const std::filesystem::path& path, int source_size, int source = 0, int target = 1);

}  // namespace isomush
