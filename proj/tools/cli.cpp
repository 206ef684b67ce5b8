#include "cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <regex>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "isomush/error.hpp"
#include "isomush/eval.hpp"
#include "isomush/pipeline.hpp"
#include "isomush/version.hpp"

namespace fs = std::filesystem;

namespace isomush::cli {

namespace {

struct Flags {
  std::string config_path;
  std::vector<std::string> shapes;
  int basis = 0;
  int universe = 0;
  int map_cols = 0;
  double epsilon = 0.0;
  int max_iters = 0;
  int band_radius = 0;
  int threads = 0;
  std::uint64_t seed = 0;
  std::string out;
  std::string cache;
  std::map<std::string, CLI::Option*> options;
};

void add_run_flags(CLI::App& cmd, Flags& f) {
  f.options["config"] = cmd.add_option("--config", f.config_path, "JSON configuration file");
  f.options["basis"] = cmd.add_option("--basis", f.basis, "number of Laplace-Beltrami eigenfunctions b");
  f.options["universe"] = cmd.add_option("--universe", f.universe, "universe size d (0 = largest shape)");
  f.options["map-cols"] = cmd.add_option("--map-cols", f.map_cols, "universe map width b' (0 = b)");
  f.options["epsilon"] = cmd.add_option("--epsilon", f.epsilon, "relative objective improvement threshold");
  f.options["max-iters"] = cmd.add_option("--max-iters", f.max_iters, "iteration limit");
  f.options["band-radius"] = cmd.add_option("--band-radius", f.band_radius, "band radius for pairwise maps");
  f.options["threads"] = cmd.add_option("--threads", f.threads, "worker threads (0 = auto)");
  f.options["seed"] = cmd.add_option("--seed", f.seed, "seed for randomised choices");
  f.options["out"] = cmd.add_option("--out", f.out, "output directory");
  f.options["cache"] = cmd.add_option("--cache", f.cache, "eigenbasis cache directory");
  cmd.add_option("meshes", f.shapes, "input meshes (.off or .ply)");
}

bool given(const Flags& f, const char* name) {
  const auto it = f.options.find(name);
  return it != f.options.end() && it->second->count() > 0;
}

RunConfig resolve_config(const Flags& f) {
  RunConfig config;
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) throw io_error("cannot open configuration " + f.config_path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw usage_error("configuration " + f.config_path + " is not valid JSON: " + e.what());
    }
    from_json(j, config);
  }
  if (!f.shapes.empty()) config.shapes = f.shapes;
  if (given(f, "basis")) config.basis = f.basis;
  if (given(f, "universe")) config.universe = f.universe;
  if (given(f, "map-cols")) config.map_cols = f.map_cols;
  if (given(f, "epsilon")) config.epsilon = f.epsilon;
  if (given(f, "max-iters")) config.max_iters = f.max_iters;
  if (given(f, "band-radius")) config.band_radius = f.band_radius;
  if (given(f, "threads")) config.threads = f.threads;
  if (given(f, "seed")) config.seed = f.seed;
  if (given(f, "out")) config.out_dir = f.out;
  if (given(f, "cache")) config.cache_dir = f.cache;
  config.validate();
  return config;
}

fs::path prepare_out(const std::string& dir) {
  fs::path out(dir);
  std::error_code ec;
  fs::create_directories(out / "pairs", ec);
  if (ec) throw io_error("cannot create output directory " + out.string() + ": " + ec.message());
  return out;
}

std::string pair_name(int i, int j) { return std::to_string(i) + "_" + std::to_string(j) + ".txt"; }

void write_manifest(const fs::path& path, const std::string& command, const RunConfig& config,
                    const std::vector<Shape>& shapes, const StageTimings& timings, nlohmann::json extra) {
  nlohmann::json j = std::move(extra);
  j["command"] = command;
  j["version"] = kVersion;
  j["config"] = config;
  j["timings_seconds"] = timings;
  auto& list = j["shapes"] = nlohmann::json::array();
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    list.push_back({{"path", config.shapes[i]}, {"vertices", shapes[i].num_vertices()}, {"faces", shapes[i].num_faces()}});
  }
  std::ofstream out(path);
  if (!out) throw io_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::vector<Shape> load_inputs(const RunConfig& config) {
  if (config.shapes.size() < 2) throw usage_error("at least two meshes are required");
  std::vector<Shape> shapes;
  for (const auto& path : config.shapes) {
    if (!fs::exists(path)) throw io_error("mesh file not found: " + path);
    try {
      shapes.push_back(load_mesh(path));
    } catch (const Error& e) {
      throw Error(e.kind(), std::string("load: ") + e.what());
    }
  }
  return shapes;
}

void write_universe_pairs(const fs::path& out, const UniverseMatching& U) {
  for (int i = 0; i < U.num_shapes(); ++i) {
    for (int j = 0; j < U.num_shapes(); ++j) {
      if (i != j) write_pairwise_map(out / "pairs" / pair_name(i, j), pairwise_from_universe(U, i, j));
    }
  }
}

int cmd_match(const Flags& flags, const std::string& init_bundle, std::ostream& out) {
  const auto config = resolve_config(flags);
  const auto shapes = load_inputs(config);
  const auto dir = prepare_out(config.out_dir);
  apply_threads(config);

  SolverState state;
  StageTimings timings;
  std::vector<std::string> warnings;
  if (init_bundle.empty()) {
    auto result = match_shapes(shapes, config);
    state = std::move(result.state);
    timings = std::move(result.timings);
    warnings = std::move(result.init.warnings);
  } else {
    UniverseMatching U0;
    UniverseMaps Q0;
    load_bundle(init_bundle, U0, Q0);
    const auto bases = compute_bases(shapes, config);
    if (Q0.rows() < 1 || Q0.rows() > config.basis) throw usage_error("initial bundle needs maps of at most --basis rows");
    const auto phi = stack_bases(bases, Q0.rows());
    const auto start = std::chrono::steady_clock::now();
    SolverOptions options;
    options.epsilon = config.epsilon;
    options.max_iters = config.max_iters;
    state = run(std::move(U0), std::move(Q0), phi, options);
    timings["optimise"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }

  save_bundle((dir / "bundle.txt").string(), state.U, state.Q);
  write_universe_pairs(dir, state.U);
  write_trace_csv(dir / "trace.csv", state.trace);
  write_manifest(dir / "manifest.json", "match", config, shapes, timings,
                 {{"status", to_string(state.status)},
                  {"iterations", state.iterations},
                  {"objective", state.trace.back().objective},
                  {"warnings", warnings}});
  for (const auto& w : warnings) out << "warning: " << w << '\n';
  out << "match: " << to_string(state.status) << " after " << state.iterations << " iterations, f = "
      << state.trace.back().objective << '\n';
  return 0;
}

int cmd_init_only(const Flags& flags, std::ostream& out) {
  const auto config = resolve_config(flags);
  const auto shapes = load_inputs(config);
  const auto dir = prepare_out(config.out_dir);
  apply_threads(config);
  StageTimings timings;
  const auto start = std::chrono::steady_clock::now();
  const auto pairwise = pairwise_init(compute_bases(shapes, config), config);
  timings["init"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::ofstream fmaps(dir / "fmaps.txt");
  fmaps << std::setprecision(17);
  for (const auto& p : pairwise) {
    write_pairwise_map(dir / "pairs" / pair_name(p.map.source, p.map.target), p.map);
    fmaps << "fmap " << p.fmap.source << ' ' << p.fmap.target << ' ' << p.fmap.size() << '\n' << p.fmap.C << '\n';
  }
  write_manifest(dir / "manifest.json", "init-only", config, shapes, timings, nlohmann::json::object());
  out << "init-only: " << pairwise.size() << " pairwise maps written to " << dir.string() << '\n';
  return 0;
}

int cmd_sync_only(const Flags& flags, std::ostream& out) {
  const auto config = resolve_config(flags);
  const auto shapes = load_inputs(config);
  const auto dir = prepare_out(config.out_dir);
  apply_threads(config);
  resolve_universe_size(shapes, config);
  StageTimings timings;
  const auto start = std::chrono::steady_clock::now();
  const auto bases = compute_bases(shapes, config);
  const auto init = synchronise(bases, pairwise_init(bases, config), config);
  timings["init+sync"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  save_bundle((dir / "bundle.txt").string(), init.U, init.Q);
  write_universe_pairs(dir, init.U);
  write_manifest(dir / "manifest.json", "sync-only", config, shapes, timings, {{"warnings", init.warnings}});
  for (const auto& w : init.warnings) out << "warning: " << w << '\n';
  out << "sync-only: bundle written to " << (dir / "bundle.txt").string() << '\n';
  return 0;
}

int cmd_eval(const std::string& pred_dir, const std::string& gt_dir, const Flags& flags, std::ostream& out) {
  RunConfig config = resolve_config(flags);
  if (config.shapes.empty()) throw usage_error("eval needs the meshes the correspondences refer to");
  std::vector<Shape> shapes;
  for (const auto& p : config.shapes) {
    if (!fs::exists(p)) throw io_error("mesh file not found: " + p);
    shapes.push_back(load_mesh(p));
  }
  const int k = static_cast<int>(shapes.size());
  const auto start = std::chrono::steady_clock::now();

  const std::regex name_pattern(R"((\d+)_(\d+)\.txt)");
  if (!fs::is_directory(pred_dir)) throw io_error("prediction directory not found: " + pred_dir);
  if (!fs::is_directory(gt_dir)) throw io_error("ground-truth directory not found: " + gt_dir);
  const auto list = [&](const std::string& dir) {
    std::vector<std::pair<int, int>> pairs;
    for (const auto& entry : fs::directory_iterator(dir)) {
      std::smatch m;
      const std::string name = entry.path().filename().string();
      if (!std::regex_match(name, m, name_pattern)) continue;
      const int i = std::stoi(m[1]), j = std::stoi(m[2]);
      if (i >= k || j >= k || i == j) throw usage_error("correspondence file " + name + " does not fit " + std::to_string(k) + " meshes");
      pairs.emplace_back(i, j);
    }
    std::sort(pairs.begin(), pairs.end());
    return pairs;
  };
  const auto pred_pairs = list(pred_dir);
  const auto gt_pairs = list(gt_dir);
  if (pred_pairs.empty()) throw io_error("prediction directory " + pred_dir + " holds no correspondence files");
  if (gt_pairs.empty()) throw io_error("ground-truth directory " + gt_dir + " holds no correspondence files");
  for (const auto& p : gt_pairs) {
    if (!std::binary_search(pred_pairs.begin(), pred_pairs.end(), p)) {
      throw io_error("prediction for pair " + pair_name(p.first, p.second) + " is missing");
    }
  }

  std::vector<double> diameters(k, 0.0);
  for (int i = 0; i < k; ++i) diameters[i] = diameter(shapes[i], config.diameter_sources, config.seed);

  MatchReport report;
  std::vector<double> all;
  for (const auto& [i, j] : gt_pairs) {
    const auto pred = read_pairwise_map(fs::path(pred_dir) / pair_name(i, j), shapes[i].num_vertices(), i, j);
    const auto gt = read_pairwise_map(fs::path(gt_dir) / pair_name(i, j), shapes[i].num_vertices(), i, j);
    auto errors = geodesic_error(pred, gt, shapes[j], diameters[j]);
    all.insert(all.end(), errors.begin(), errors.end());
    report.pairs.emplace_back(i, j);
    report.pair_errors.push_back(std::move(errors));
  }
  report.pck = pck_auc(all, uniform_thresholds(config.tau_max, config.pck_samples));
  double total = 0.0;
  for (double e : all) total += e;
  report.mean_error = total / static_cast<double>(all.size());

  if (k < 3) {
    report.notes.push_back("cycle error is 0 by convention for fewer than three shapes");
  } else if (pred_pairs.size() < static_cast<std::size_t>(k * (k - 1))) {
    report.notes.push_back("cycle error not evaluated: predictions do not cover every ordered pair");
  } else {
    PairwiseMapGrid grid(k, std::vector<PairwiseMap>(k));
    for (const auto& [i, j] : pred_pairs) {
      grid[i][j] = read_pairwise_map(fs::path(pred_dir) / pair_name(i, j), shapes[i].num_vertices(), i, j);
    }
    CycleErrorOptions options;
    options.seed = config.seed;
    report.cycle = cycle_error(grid, options);
  }
  report.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const fs::path dir(config.out_dir);
  fs::create_directories(dir);
  write_report_json(dir / "report.json", report);
  write_pck_csv(dir / "pck.csv", report.pck);
  out << "eval: auc " << report.pck.auc << ", mean error " << report.mean_error << ", cycle error "
      << report.cycle.error << '\n';
  return 0;
}

Colors colors_for(const std::vector<int>& universe_index, const std::vector<char>* visible) {
  Colors colors(static_cast<Eigen::Index>(universe_index.size()), 3);
  for (std::size_t u = 0; u < universe_index.size(); ++u) {
    const std::uint32_t rgb = (visible && !(*visible)[u]) ? 0u : universe_color(universe_index[u]);
    colors.row(static_cast<Eigen::Index>(u)) << static_cast<std::uint8_t>((rgb >> 16) & 0xFF),
        static_cast<std::uint8_t>((rgb >> 8) & 0xFF), static_cast<std::uint8_t>(rgb & 0xFF);
  }
  return colors;
}

int cmd_export(const std::string& bundle, const std::string& style, const Flags& flags, std::ostream& out) {
  RunConfig config = resolve_config(flags);
  UniverseMatching U;
  UniverseMaps Q;
  load_bundle(bundle, U, Q);
  const auto shapes = load_inputs(config);
  if (static_cast<int>(shapes.size()) != U.num_shapes()) throw usage_error("bundle and mesh counts differ");
  for (int i = 0; i < U.num_shapes(); ++i) {
    if (static_cast<int>(U.assignment[i].size()) != shapes[i].num_vertices()) {
      throw usage_error("bundle shape " + std::to_string(i) + " does not match mesh " + config.shapes[i]);
    }
  }
  const fs::path dir(config.out_dir);
  fs::create_directories(dir);
  int written = 0;
  if (style == "colormap") {
    for (int i = 0; i < U.num_shapes(); ++i) {
      const auto colors = colors_for(U.assignment[i], nullptr);
      save_mesh(dir / ("shape_" + std::to_string(i) + ".ply"), shapes[i], MeshFormat::kPlyAscii, &colors);
      ++written;
    }
  } else {
    for (int i = 0; i < U.num_shapes(); ++i) {
      for (int j = 0; j < U.num_shapes(); ++j) {
        if (i == j) continue;
        const auto map = pairwise_from_universe(U, i, j);
        std::vector<char> visible(map.match.size());
        for (std::size_t u = 0; u < map.match.size(); ++u) visible[u] = map.match[u] != kUnmatched;
        const auto colors = colors_for(U.assignment[i], &visible);
        save_mesh(dir / ("pair_" + std::to_string(i) + "_" + std::to_string(j) + ".ply"), shapes[i],
                  MeshFormat::kPlyAscii, &colors);
        ++written;
      }
    }
  }
  out << "export: " << written << " meshes written to " << dir.string() << '\n';
  return 0;
}

}  // namespace

std::uint32_t universe_color(int index) {
  // splitmix64 finaliser
  std::uint64_t z = static_cast<std::uint64_t>(index) + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  const auto channel = [&](int shift) { return 40u + static_cast<std::uint32_t>((z >> shift) & 0xFF) % 216u; };
  return (channel(0) << 16) | (channel(8) << 8) | channel(16);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cycle-consistent isometric multi-shape matching"};
  app.require_subcommand(1);

  Flags match_flags, init_flags, sync_flags, eval_flags, export_flags;
  std::string init_bundle, pred_dir, gt_dir, bundle, style = "colormap";

  auto* match = app.add_subcommand("match", "full pipeline: initialisation, synchronisation and optimisation");
  add_run_flags(*match, match_flags);
  match->add_option("--init", init_bundle, "start from a saved U/Q bundle instead of computing the initialisation");

  auto* init = app.add_subcommand("init-only", "pairwise functional and pointwise maps only");
  add_run_flags(*init, init_flags);

  auto* sync = app.add_subcommand("sync-only", "pairwise initialisation followed by synchronisation into U0/Q0");
  add_run_flags(*sync, sync_flags);

  auto* eval = app.add_subcommand("eval", "geodesic error, PCK/AUC and cycle error of correspondence files");
  add_run_flags(*eval, eval_flags);
  eval->add_option("--pred", pred_dir, "directory of predicted i_j.txt files")->required();
  eval->add_option("--gt", gt_dir, "directory of ground-truth i_j.txt files")->required();

  auto* exp = app.add_subcommand("export", "coloured PLY meshes from a U bundle");
  add_run_flags(*exp, export_flags);
  exp->add_option("--bundle", bundle, "bundle written by match or sync-only")->required();
  exp->add_option("--style", style, "colormap or pairs")->check(CLI::IsMember({"colormap", "pairs"}));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = e.get_exit_code();
    (code == 0 ? out : err) << (code == 0 ? app.help() : std::string(e.what()) + "\n");
    return code == 0 ? 0 : static_cast<int>(ErrorKind::kUsage);
  }

  try {
    if (*match) return cmd_match(match_flags, init_bundle, out);
    if (*init) return cmd_init_only(init_flags, out);
    if (*sync) return cmd_sync_only(sync_flags, out);
    if (*eval) return cmd_eval(pred_dir, gt_dir, eval_flags, out);
    if (*exp) return cmd_export(bundle, style, export_flags, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ErrorKind::kNumerical);
  }
  return static_cast<int>(ErrorKind::kUsage);
}

}  // namespace isomush::cli
