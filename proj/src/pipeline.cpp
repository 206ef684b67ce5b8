#include "isomush/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>

#include <omp.h>

#include "isomush/descriptors.hpp"
#include "isomush/error.hpp"
#include "isomush/ortho.hpp"

namespace isomush {

namespace {

// OpenMP loop that forwards the first exception thrown by any iteration.
template <typename Fn>
void parallel_for(int n, Fn&& fn) {
  std::exception_ptr failure;
  std::mutex lock;
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
      std::lock_guard<std::mutex> guard(lock);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

template <typename Fn>
auto staged(const char* stage, StageTimings* timings, Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  try {
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      if (timings) (*timings)[stage] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    } else {
      auto out = fn();
      if (timings) (*timings)[stage] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      return out;
    }
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(stage) + ": " + e.what());
  } catch (const std::exception& e) {
    throw numerical_error(std::string(stage) + ": " + e.what());
  }
}

}  // namespace

void RunConfig::validate() const {
  std::ostringstream msg;
  if (basis < 2) msg << "basis must be at least 2; ";
  if (map_cols != 0 && map_cols < basis) msg << "map_cols must be 0 or at least basis; ";
  if (universe < 0) msg << "universe must be non-negative; ";
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) msg << "epsilon must lie in [0, 1]; ";
  if (max_iters < 1) msg << "max_iters must be at least 1; ";
  if (band_radius < 0) msg << "band_radius must be non-negative; ";
  if (hks_samples < 1 || wks_samples < 0) msg << "descriptor sample counts must be positive; ";
  if (!(wks_variance > 0.0)) msg << "wks_variance must be positive; ";
  if (init_basis < 1 || init_basis > basis) msg << "init_basis must lie in [1, basis]; ";
  if (hks_samples + wks_samples < init_basis) msg << "need at least init_basis descriptor samples; ";
  if (upsample_step < 1) msg << "upsample_step must be positive; ";
  if (threads < 0) msg << "threads must be non-negative; ";
  if (diameter_sources < 1) msg << "diameter_sources must be positive; ";
  if (!(tau_max > 0.0)) msg << "tau_max must be positive; ";
  if (pck_samples < 2) msg << "pck_samples must be at least 2; ";
  if (!msg.str().empty()) throw usage_error("invalid configuration: " + msg.str());
}

void to_json(nlohmann::json& j, const RunConfig& c) {
  j = nlohmann::json{{"shapes", c.shapes},
                     {"basis", c.basis},
                     {"universe", c.universe},
                     {"map_cols", c.map_cols},
                     {"epsilon", c.epsilon},
                     {"max_iters", c.max_iters},
                     {"band_radius", c.band_radius},
                     {"hks_samples", c.hks_samples},
                     {"wks_samples", c.wks_samples},
                     {"wks_variance", c.wks_variance},
                     {"init_basis", c.init_basis},
                     {"upsample_step", c.upsample_step},
                     {"threads", c.threads},
                     {"seed", c.seed},
                     {"out_dir", c.out_dir},
                     {"cache_dir", c.cache_dir},
                     {"diameter_sources", c.diameter_sources},
                     {"tau_max", c.tau_max},
                     {"pck_samples", c.pck_samples}};
}

void from_json(const nlohmann::json& j, RunConfig& c) {
  if (!j.is_object()) throw usage_error("configuration must be a JSON object");
  nlohmann::json known;
  to_json(known, c);
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!known.contains(key)) throw usage_error("unknown configuration key '" + key + "'");
  }
  try {
    const auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) j.at(key).get_to(field);
    };
    get("shapes", c.shapes);
    get("basis", c.basis);
    get("universe", c.universe);
    get("map_cols", c.map_cols);
    get("epsilon", c.epsilon);
    get("max_iters", c.max_iters);
    get("band_radius", c.band_radius);
    get("hks_samples", c.hks_samples);
    get("wks_samples", c.wks_samples);
    get("wks_variance", c.wks_variance);
    get("init_basis", c.init_basis);
    get("upsample_step", c.upsample_step);
    get("threads", c.threads);
    get("seed", c.seed);
    get("out_dir", c.out_dir);
    get("cache_dir", c.cache_dir);
    get("diameter_sources", c.diameter_sources);
    get("tau_max", c.tau_max);
    get("pck_samples", c.pck_samples);
  } catch (const nlohmann::json::exception& e) {
    throw usage_error(std::string("configuration has a value of the wrong type: ") + e.what());
  }
}

void apply_threads(const RunConfig& config) {
  if (config.threads > 0) omp_set_num_threads(config.threads);
}

std::vector<Shape> load_shapes(const std::vector<std::string>& paths) {
  std::vector<Shape> shapes;
  shapes.reserve(paths.size());
  for (const auto& p : paths) shapes.push_back(load_mesh(p));
  return shapes;
}

std::vector<SpectralBasis> compute_bases(const std::vector<Shape>& shapes, const RunConfig& config) {
  std::vector<SpectralBasis> bases(shapes.size());
  parallel_for(static_cast<int>(shapes.size()), [&](int i) {
    try {
      bases[i] = cached_eigenbasis(shapes[i], config.basis, config.cache_dir);
    } catch (const Error& e) {
      throw Error(e.kind(), "shape " + std::to_string(i) + ": " + e.what());
    }
  });
  return bases;
}

Eigen::MatrixXd shape_descriptors(const SpectralBasis& basis, const RunConfig& config) {
  const auto heat = hks(basis, default_hks_times(basis, config.hks_samples));
  if (config.wks_samples == 0) return heat.values;
  const auto samples = default_wks_samples(basis, config.wks_samples, config.wks_variance);
  const auto wave = wks(basis, samples.energies, samples.sigma);
  Eigen::MatrixXd out(basis.num_vertices(), heat.values.cols() + wave.values.cols());
  out << heat.values, wave.values;
  return out;
}

std::vector<UpsampleResult> pairwise_init(const std::vector<SpectralBasis>& bases, const RunConfig& config) {
  const int k = static_cast<int>(bases.size());
  std::vector<Eigen::MatrixXd> coefficients(k);
  parallel_for(k, [&](int i) {
    const auto small = bases[i].truncated(config.init_basis);
    coefficients[i] = descriptor_coefficients(small, shape_descriptors(bases[i], config));
  });

  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) pairs.emplace_back(i, j);
  }
  std::vector<UpsampleResult> out(pairs.size());
  parallel_for(static_cast<int>(pairs.size()), [&](int p) {
    const auto [i, j] = pairs[p];
    const auto initial = solve_fmap(coefficients[i], coefficients[j], i, j);
    out[p] = spectral_upsample(bases[i], bases[j], initial, config.basis, config.upsample_step);
  });
  return out;
}

int resolve_universe_size(const std::vector<Shape>& shapes, const RunConfig& config) {
  int largest = 0;
  for (const auto& s : shapes) largest = std::max(largest, s.num_vertices());
  if (config.universe == 0) return largest;
  if (config.universe < largest) {
    std::ostringstream msg;
    msg << "universe size " << config.universe << " is smaller than the largest shape (" << largest << " vertices)";
    throw usage_error(msg.str());
  }
  return config.universe;
}

SyncOutput synchronise(const std::vector<SpectralBasis>& bases, const std::vector<UpsampleResult>& pairwise,
                       const RunConfig& config) {
  const int k = static_cast<int>(bases.size());
  const int b = config.basis;
  std::vector<PairwiseFmap> filtered(pairwise.size());
  parallel_for(static_cast<int>(pairwise.size()), [&](int p) {
    filtered[p] = pairwise[p].fmap;
    filtered[p].C = project_orthogonal(band_filter(pairwise[p].fmap.C, config.band_radius)).values;
  });

  SyncOutput out;
  auto ortho = ortho_sync(filtered, k, b, config.resolved_map_cols());
  if (ortho.ambiguous) {
    std::ostringstream msg;
    msg << "orthogonal synchronisation is ambiguous (eigen-gap " << ortho.eigen_gap << ")";
    out.warnings.push_back(msg.str());
  }
  out.Q = std::move(ortho.maps);

  std::vector<int> sizes;
  int largest = 0;
  for (const auto& basis : bases) {
    sizes.push_back(basis.num_vertices());
    largest = std::max(largest, basis.num_vertices());
  }
  const int d = config.universe > 0 ? config.universe : largest;
  const Eigen::MatrixXd psi = build_universe_embedding(bases, out.Q);
  out.U = perm_sync(psi, sizes, d);
  return out;
}

StackedBasis stack_bases(const std::vector<SpectralBasis>& bases, int b) {
  StackedBasis phi;
  phi.blocks.reserve(bases.size());
  for (const auto& basis : bases) phi.blocks.push_back(basis.phi.leftCols(b));
  return phi;
}

MatchOutput match_shapes(const std::vector<Shape>& shapes, const RunConfig& config) {
  config.validate();
  if (shapes.size() < 2) throw usage_error("matching needs at least two shapes");
  apply_threads(config);
  MatchOutput out;
  resolve_universe_size(shapes, config);
  const auto bases = staged("spectral", &out.timings, [&] { return compute_bases(shapes, config); });
  out.pairwise = staged("init", &out.timings, [&] { return pairwise_init(bases, config); });
  out.init = staged("sync", &out.timings, [&] { return synchronise(bases, out.pairwise, config); });
  out.state = staged("optimise", &out.timings, [&] {
    SolverOptions options;
    options.epsilon = config.epsilon;
    options.max_iters = config.max_iters;
    return run(out.init.U, out.init.Q, stack_bases(bases, config.basis), options);
  });
  return out;
}

}  // namespace isomush
