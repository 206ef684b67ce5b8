#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "isomush/universe.hpp"

namespace isomush {

// Row-total partial permutation: every row is assigned to a distinct column.
struct PartialPermutation {
  int n_rows = 0;
  int n_cols = 0;
  std::vector<int> assign;

  bool is_valid() const;
  double objective(const Eigen::Ref<const Eigen::MatrixXd>& profit) const;
};

struct AuctionOptions {
  // Profits are mapped onto an integer grid of this relative resolution
  // before the auction runs. Integral profit matrices whose range fits the
  // grid are used unchanged.
  double resolution = 1e-9;
  // Phase-to-phase reduction of the bid increment.
  double eps_factor = 5.0;
};

// Maximises <profit, P> over row-total partial permutations (rows <= cols)
// with an epsilon-scaling forward/reverse auction. Exactly optimal for the
// integer-gridded profits; ties resolve to the lowest column index.
PartialPermutation solve_lap_max(const Eigen::Ref<const Eigen::MatrixXd>& profit,
                                 const AuctionOptions& options = {});

// O(n^3) shortest-augmenting-path Hungarian method on the zero-padded square
// problem. Used as the reference for the auction solver.
PartialPermutation hungarian_oracle(const Eigen::Ref<const Eigen::MatrixXd>& profit);

// Solves one LAP per row block of `score` (m x d) and stacks the results.
UniverseMatching project_blockwise_P(const Eigen::Ref<const Eigen::MatrixXd>& score,
                                     std::span<const int> block_sizes, const AuctionOptions& options = {});

}  // namespace isomush
