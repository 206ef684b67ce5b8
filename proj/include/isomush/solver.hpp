#pragma once

#include <filesystem>
#include <limits>
#include <vector>

#include "isomush/assignment.hpp"
#include "isomush/fmap.hpp"
#include "isomush/kernels.hpp"
#include "isomush/universe.hpp"

namespace isomush {

// f(U, Q) = ||U^T Phi Q||_F^2.
double objective(const UniverseMatching& U, const UniverseMaps& Q, const StackedBasis& phi);

// Blockwise linear-assignment projection of Z U_t. A block keeps its current
// assignment unless the new one scores strictly higher on the same profits,
// so the linearised objective never decreases.
UniverseMatching u_update(const UniverseMatching& U, const UniverseMaps& Q, const StackedBasis& phi,
                          const AuctionOptions& auction = {});

// Blockwise semi-orthogonal projection of Zbar Q_t.
UniverseMaps q_update(const UniverseMatching& U, const UniverseMaps& Q, const StackedBasis& phi);

struct SolverOptions {
  double epsilon = std::numeric_limits<double>::epsilon();  // relative improvement threshold
  int max_iters = 200;
  AuctionOptions auction;
};

enum class SolverStatus { kConverged, kMaxIterations, kDegenerate };

const char* to_string(SolverStatus status);

struct TraceEntry {
  int iteration = 0;
  double objective = 0.0;       // f(U_t, Q_t)
  double after_u_step = 0.0;    // f(U_t, Q_{t-1}); equals `objective` at t = 0
  double seconds = 0.0;         // wall time since the run started
};

struct SolverState {
  UniverseMatching U;
  UniverseMaps Q;
  int iterations = 0;
  std::vector<TraceEntry> trace;
  SolverStatus status = SolverStatus::kConverged;
};

// Alternates u_update and q_update until f_t / f_{t+1} >= 1 - epsilon or
// max_iters iterations have run. A zero objective stops with kDegenerate.
SolverState run(UniverseMatching U0, UniverseMaps Q0, const StackedBasis& phi, const SolverOptions& options = {});

// P_ij = P_i P_j^T: vertices of i and j sharing a universe point are matched.
PairwiseMap pairwise_from_universe(const UniverseMatching& U, int i, int j);

void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceEntry>& trace);

}  // namespace isomush
