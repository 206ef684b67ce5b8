#include "isomush/solver.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>

#include "isomush/error.hpp"
#include "isomush/ortho.hpp"

namespace isomush {

double objective(const UniverseMatching& U, const UniverseMaps& Q, const StackedBasis& phi) {
  check_dimensions(phi, U, Q);
  return kernels::universe_sum(phi, U, Q).squaredNorm();
}

UniverseMatching u_update(const UniverseMatching& U, const UniverseMaps& Q, const StackedBasis& phi,
                          const AuctionOptions& auction) {
  check_dimensions(phi, U, Q);
  const Eigen::MatrixXd score = kernels::u_step_scores(phi, U, Q);
  const auto sizes = U.block_sizes();
  UniverseMatching next = project_blockwise_P(score, sizes, auction);

  // The auction is exact on the gridded profits only; never trade the
  // incumbent for an assignment that is not strictly better on the real ones.
  const auto offsets = U.block_offsets();
  for (int i = 0; i < U.num_shapes(); ++i) {
    double incumbent = 0.0, candidate = 0.0;
    for (int u = 0; u < sizes[i]; ++u) {
      incumbent += score(offsets[i] + u, U.assignment[i][u]);
      candidate += score(offsets[i] + u, next.assignment[i][u]);
    }
    if (!(candidate > incumbent)) next.assignment[i] = U.assignment[i];
  }
  return next;
}

UniverseMaps q_update(const UniverseMatching& U, const UniverseMaps& Q, const StackedBasis& phi) {
  check_dimensions(phi, U, Q);
  return project_blockwise_Q(kernels::q_step_scores(phi, U, Q), phi.num_shapes());
}

const char* to_string(SolverStatus status) {
  switch (status) {
    case SolverStatus::kConverged:
      return "converged";
    case SolverStatus::kMaxIterations:
      return "max_iterations";
    case SolverStatus::kDegenerate:
      return "degenerate";
  }
  return "unknown";
}

SolverState run(UniverseMatching U0, UniverseMaps Q0, const StackedBasis& phi, const SolverOptions& options) {
  if (options.max_iters < 1) throw usage_error("max_iters must be at least 1");
  if (!(options.epsilon >= 0.0)) throw usage_error("epsilon must be non-negative");
  check_dimensions(phi, U0, Q0);
  U0.validate();

  const auto start = std::chrono::steady_clock::now();
  const auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };

  SolverState state;
  state.U = std::move(U0);
  state.Q = std::move(Q0);
  double f = objective(state.U, state.Q, phi);
  state.trace.push_back({0, f, f, elapsed()});
  state.status = SolverStatus::kMaxIterations;

  while (state.iterations < options.max_iters) {
    UniverseMatching U_next = u_update(state.U, state.Q, phi, options.auction);
    const double f_half = objective(U_next, state.Q, phi);
    UniverseMaps Q_next = q_update(U_next, state.Q, phi);
    const double f_next = objective(U_next, Q_next, phi);

    state.U = std::move(U_next);
    state.Q = std::move(Q_next);
    ++state.iterations;
    state.trace.push_back({state.iterations, f_next, f_half, elapsed()});

    if (f_next == 0.0) {
      state.status = SolverStatus::kDegenerate;
      break;
    }
    // Ratios above one from floating-point noise also count as converged.
    if (f / f_next >= 1.0 - options.epsilon) {
      state.status = SolverStatus::kConverged;
      break;
    }
    f = f_next;
  }
  return state;
}

PairwiseMap pairwise_from_universe(const UniverseMatching& U, int i, int j) {
  if (i < 0 || j < 0 || i >= U.num_shapes() || j >= U.num_shapes()) throw usage_error("shape index out of range");
  std::vector<int> owner(U.universe_size, kUnmatched);
  for (std::size_t v = 0; v < U.assignment[j].size(); ++v) owner[U.assignment[j][v]] = static_cast<int>(v);
  PairwiseMap map;
  map.source = i;
  map.target = j;
  map.match.resize(U.assignment[i].size());
  for (std::size_t u = 0; u < U.assignment[i].size(); ++u) map.match[u] = owner[U.assignment[i][u]];
  return map;
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceEntry>& trace) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write " + path.string());
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "iteration,objective,objective_after_u_step,wall_seconds\n";
  for (const auto& e : trace) out << e.iteration << ',' << e.objective << ',' << e.after_u_step << ',' << e.seconds << '\n';
}

}  // namespace isomush
