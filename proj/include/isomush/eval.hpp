#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "isomush/fmap.hpp"
#include "isomush/mesh.hpp"

namespace isomush {

// Normalised geodesic error per source vertex: dist(pred(u), gt(u)) / diam.
// Vertices without ground truth are skipped; unmatched predictions score 1.
std::vector<double> geodesic_error(const PairwiseMap& pred, const PairwiseMap& gt, const Shape& target,
                                   double target_diameter);

struct PckCurve {
  std::vector<double> thresholds;
  std::vector<double> fraction;  // share of errors <= threshold
  double auc = 0.0;              // integral over [0, tau_max] / tau_max
};

// Uniform thresholds 0, tau_max/(n-1), ..., tau_max.
std::vector<double> uniform_thresholds(double tau_max = 0.25, int count = 100);

// The AUC integrates the empirical step curve exactly, so it does not depend
// on the sampling of `thresholds` (whose last entry is tau_max).
PckCurve pck_auc(std::span<const double> errors, std::span<const double> thresholds);

// All pairwise maps of a k-shape collection; maps[i][j] is P_ij (the diagonal
// is unused).
using PairwiseMapGrid = std::vector<std::vector<PairwiseMap>>;

struct CycleErrorOptions {
  std::int64_t max_exhaustive_shapes = 10;
  std::int64_t max_exhaustive_vertices = 2000;
  std::int64_t samples = 100000;
  std::uint64_t seed = 0;
};

struct CycleErrorResult {
  double error = 0.0;
  std::int64_t violations = 0;
  std::int64_t cycles = 0;
  bool exhaustive = true;
};

// Fraction of tested cycles i -> j -> l that disagree with i -> l over
// distinct ordered triples. A cycle is tested when u has a partner in j.
// It is a violation when the second hop is undefined but the direct map is
// defined, or when both routes are defined and land on different vertices, or
// when the path is defined and the direct map is not.
CycleErrorResult cycle_error(const PairwiseMapGrid& maps, const CycleErrorOptions& options = {});

struct MatchReport {
  std::vector<std::vector<double>> pair_errors;  // one list per evaluated pair
  std::vector<std::pair<int, int>> pairs;
  PckCurve pck;
  double mean_error = 0.0;
  CycleErrorResult cycle;
  double runtime_seconds = 0.0;
  std::vector<std::string> notes;
};

void write_report_json(const std::filesystem::path& path, const MatchReport& report);
void write_pck_csv(const std::filesystem::path& path, const PckCurve& pck);

}  // namespace isomush
