#include "isomush/eval.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "isomush/error.hpp"

namespace isomush {

std::vector<double> geodesic_error(const PairwiseMap& pred, const PairwiseMap& gt, const Shape& target,
                                   double target_diameter) {
  if (!(target_diameter > 0.0)) throw usage_error("target diameter must be positive");
  if (pred.match.size() != gt.match.size()) throw usage_error("prediction and ground truth cover different shapes");
  if (gt.num_matched() == 0) throw usage_error("ground truth is empty");

  const int n = target.num_vertices();
  std::vector<int> sources;
  for (std::size_t u = 0; u < gt.match.size(); ++u) {
    const int want = gt.match[u];
    const int got = pred.match[u];
    if (want == kUnmatched) continue;
    if (want < 0 || want >= n || got >= n) throw usage_error("correspondence index outside the target mesh");
    if (got != kUnmatched && got != want) sources.push_back(want);
  }
  std::sort(sources.begin(), sources.end());
  sources.erase(std::unique(sources.begin(), sources.end()), sources.end());

  std::vector<Eigen::VectorXd> fields(sources.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::size_t s = 0; s < sources.size(); ++s) fields[s] = geodesic_distances(target, sources[s]).dist;

  std::vector<double> errors;
  errors.reserve(gt.match.size());
  for (std::size_t u = 0; u < gt.match.size(); ++u) {
    const int want = gt.match[u];
    const int got = pred.match[u];
    if (want == kUnmatched) continue;
    if (got == kUnmatched) {
      errors.push_back(1.0);
    } else if (got == want) {
      errors.push_back(0.0);
    } else {
      const auto s = std::lower_bound(sources.begin(), sources.end(), want) - sources.begin();
      errors.push_back(fields[s][got] / target_diameter);
    }
  }
  return errors;
}

std::vector<double> uniform_thresholds(double tau_max, int count) {
  if (count < 2 || !(tau_max > 0.0)) throw usage_error("need at least two thresholds and a positive tau_max");
  std::vector<double> t(count);
  for (int i = 0; i < count; ++i) t[i] = tau_max * i / (count - 1);
  return t;
}

PckCurve pck_auc(std::span<const double> errors, std::span<const double> thresholds) {
  if (errors.empty()) throw usage_error("no errors to evaluate");
  if (thresholds.empty()) throw usage_error("no thresholds");
  if (!std::is_sorted(thresholds.begin(), thresholds.end())) throw usage_error("thresholds must be ascending");
  const double tau_max = thresholds.back();
  if (!(tau_max > 0.0)) throw usage_error("largest threshold must be positive");

  std::vector<double> sorted(errors.begin(), errors.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());

  PckCurve curve;
  curve.thresholds.assign(thresholds.begin(), thresholds.end());
  for (double t : thresholds) {
    curve.fraction.push_back(static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), t) - sorted.begin()) / n);
  }
  // Integral of the step curve: each error e contributes (tau_max - e)^+.
  double area = 0.0;
  for (double e : sorted) area += std::max(0.0, tau_max - std::max(e, 0.0));
  curve.auc = area / (n * tau_max);
  return curve;
}

CycleErrorResult cycle_error(const PairwiseMapGrid& maps, const CycleErrorOptions& options) {
  const int k = static_cast<int>(maps.size());
  CycleErrorResult result;
  if (k < 3) return result;

  std::int64_t largest = 0;
  for (int i = 0; i < k; ++i) {
    if (static_cast<int>(maps[i].size()) != k) throw usage_error("pairwise map grid is not k x k");
    for (int j = 0; j < k; ++j) {
      if (i != j) largest = std::max<std::int64_t>(largest, static_cast<std::int64_t>(maps[i][j].match.size()));
    }
  }

  const auto test = [&](int i, int j, int l, int u) {
    const int v = maps[i][j].match[u];
    if (v == kUnmatched) return;
    ++result.cycles;
    const int direct = maps[i][l].match[u];
    const int w = v < static_cast<int>(maps[j][l].match.size()) ? maps[j][l].match[v] : kUnmatched;
    if (w != direct) ++result.violations;
  };

  result.exhaustive = k <= options.max_exhaustive_shapes && largest <= options.max_exhaustive_vertices;
  if (result.exhaustive) {
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        for (int l = 0; l < k; ++l) {
          if (i == j || j == l || i == l) continue;
          const int m = static_cast<int>(maps[i][j].match.size());
          for (int u = 0; u < m; ++u) test(i, j, l, u);
        }
      }
    }
  } else {
    std::mt19937_64 rng(options.seed);
    std::uniform_int_distribution<int> shape(0, k - 1);
    for (std::int64_t s = 0; s < options.samples; ++s) {
      const int i = shape(rng);
      int j = shape(rng), l = shape(rng);
      while (j == i) j = shape(rng);
      while (l == i || l == j) l = shape(rng);
      const int m = static_cast<int>(maps[i][j].match.size());
      if (m == 0) continue;
      test(i, j, l, std::uniform_int_distribution<int>(0, m - 1)(rng));
    }
  }
  result.error = result.cycles > 0 ? static_cast<double>(result.violations) / static_cast<double>(result.cycles) : 0.0;
  return result;
}

void write_report_json(const std::filesystem::path& path, const MatchReport& report) {
  nlohmann::json j;
  j["auc"] = report.pck.auc;
  j["mean_error"] = report.mean_error;
  j["cycle_error"] = report.cycle.error;
  j["cycle_violations"] = report.cycle.violations;
  j["cycles_tested"] = report.cycle.cycles;
  j["cycle_sampling"] = report.cycle.exhaustive ? "exhaustive" : "sampled";
  j["runtime_seconds"] = report.runtime_seconds;
  j["tau_max"] = report.pck.thresholds.empty() ? 0.0 : report.pck.thresholds.back();
  j["notes"] = report.notes;
  auto& pairs = j["pairs"] = nlohmann::json::array();
  for (std::size_t p = 0; p < report.pairs.size(); ++p) {
    const auto& e = report.pair_errors[p];
    double mean = 0.0;
    for (double x : e) mean += x;
    pairs.push_back({{"source", report.pairs[p].first},
                     {"target", report.pairs[p].second},
                     {"vertices", e.size()},
                     {"mean_error", e.empty() ? 0.0 : mean / static_cast<double>(e.size())}});
  }
  std::ofstream out(path);
  if (!out) throw io_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void write_pck_csv(const std::filesystem::path& path, const PckCurve& pck) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write " + path.string());
  out << "threshold,fraction\n";
  for (std::size_t t = 0; t < pck.thresholds.size(); ++t) out << pck.thresholds[t] << ',' << pck.fraction[t] << '\n';
}

}  // namespace isomush
