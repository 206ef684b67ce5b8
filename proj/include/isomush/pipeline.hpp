#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "isomush/fmap.hpp"
#include "isomush/mesh.hpp"
#include "isomush/solver.hpp"
#include "isomush/spectral.hpp"
#include "isomush/sync.hpp"

namespace isomush {

struct RunConfig {
  std::vector<std::string> shapes;
  int basis = 30;               // b
  int universe = 0;             // d; 0 selects max m_i
  int map_cols = 0;             // b'; 0 selects b, larger values give rectangular maps
  double epsilon = 2.220446049250313e-16;
  int max_iters = 200;
  int band_radius = kDefaultBandRadius;
  int hks_samples = 16;
  int wks_samples = 32;
  double wks_variance = 7.0;
  int init_basis = 10;          // spectral size of the descriptor-based map
  int upsample_step = 5;
  int threads = 0;              // 0 lets OpenMP decide
  std::uint64_t seed = 0;
  std::string out_dir = "isomush_out";
  std::string cache_dir;
  int diameter_sources = 20;
  double tau_max = 0.25;
  int pck_samples = 100;

  // Throws usage_error for values outside their documented ranges.
  void validate() const;
  int resolved_map_cols() const { return map_cols > 0 ? map_cols : basis; }
};

void to_json(nlohmann::json& j, const RunConfig& c);
// Missing keys keep their current values; unknown keys are rejected.
void from_json(const nlohmann::json& j, RunConfig& c);

// Applies the configured OpenMP thread count.
void apply_threads(const RunConfig& config);

using StageTimings = std::map<std::string, double>;

std::vector<Shape> load_shapes(const std::vector<std::string>& paths);
std::vector<SpectralBasis> compute_bases(const std::vector<Shape>& shapes, const RunConfig& config);

// Normalised HKS and WKS columns for one shape (m x q).
Eigen::MatrixXd shape_descriptors(const SpectralBasis& basis, const RunConfig& config);

// Descriptor functional map at init_basis, refined up to `basis` by spectral
// upsampling, for every pair i < j.
std::vector<UpsampleResult> pairwise_init(const std::vector<SpectralBasis>& bases, const RunConfig& config);

struct SyncOutput {
  UniverseMatching U;
  UniverseMaps Q;
  std::vector<std::string> warnings;
};

// Band filter, orthogonal projection, orthogonal synchronisation, universe
// embedding and permutation synchronisation.
SyncOutput synchronise(const std::vector<SpectralBasis>& bases, const std::vector<UpsampleResult>& pairwise,
                       const RunConfig& config);

int resolve_universe_size(const std::vector<Shape>& shapes, const RunConfig& config);

StackedBasis stack_bases(const std::vector<SpectralBasis>& bases, int b);

struct MatchOutput {
  std::vector<UpsampleResult> pairwise;
  SyncOutput init;
  SolverState state;
  StageTimings timings;
};

// End-to-end: bases, pairwise initialisation, synchronisation, optimisation.
MatchOutput match_shapes(const std::vector<Shape>& shapes, const RunConfig& config);

}  // namespace isomush
