#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

namespace isomush {

// Shape-to-universe matchings P_i stored as per-vertex universe indices:
// assignment[i][u] is the universe point of vertex u of shape i. Each block is
// injective and total, so the stack is a member of the blockwise partial
// permutation set.
struct UniverseMatching {
  int universe_size = 0;
  std::vector<std::vector<int>> assignment;

  int num_shapes() const { return static_cast<int>(assignment.size()); }
  int total_rows() const;
  std::vector<int> block_sizes() const;
  // First stacked row of each block, plus the total as the last entry.
  std::vector<int> block_offsets() const;

  // Throws numerical_error when an index is out of range or a block repeats a
  // universe point.
  void validate() const;
  bool is_valid() const;
};

// Shape-to-universe functional maps C_i, each b x b' with C C^T = I_b.
struct UniverseMaps {
  std::vector<Eigen::MatrixXd> blocks;

  int num_shapes() const { return static_cast<int>(blocks.size()); }
  int rows() const { return blocks.empty() ? 0 : static_cast<int>(blocks.front().rows()); }
  int cols() const { return blocks.empty() ? 0 : static_cast<int>(blocks.front().cols()); }

  // Max over blocks of max |C C^T - I|.
  double max_orthogonality_error() const;
  // Tall kb x b' stack.
  Eigen::MatrixXd stacked() const;
};

}  // namespace isomush
