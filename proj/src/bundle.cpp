#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "isomush/error.hpp"
#include "isomush/sync.hpp"

// Bundle layout (whitespace separated, '#' starts a comment line):
//
//   isomush-bundle 1
//   shapes <k> universe <d> rows <b> cols <b'>
//   matching <i> <m_i>
//   <m_i universe indices>
//   map <i>
//   <b rows of b' values>
//
// One matching and one map section per shape; map sections are absent when
// b = 0.

namespace isomush {

void save_bundle(const std::string& path, const UniverseMatching& U, const UniverseMaps& Q) {
  if (Q.num_shapes() != 0 && Q.num_shapes() != U.num_shapes()) {
    throw usage_error("bundle matching and map counts differ");
  }
  std::ofstream out(path);
  if (!out) throw io_error("cannot write bundle " + path);
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "isomush-bundle 1\n";
  out << "shapes " << U.num_shapes() << " universe " << U.universe_size << " rows " << Q.rows() << " cols "
      << Q.cols() << '\n';
  for (int i = 0; i < U.num_shapes(); ++i) {
    out << "matching " << i << ' ' << U.assignment[i].size() << '\n';
    for (std::size_t u = 0; u < U.assignment[i].size(); ++u) out << (u ? " " : "") << U.assignment[i][u];
    out << '\n';
  }
  for (int i = 0; i < Q.num_shapes(); ++i) {
    out << "map " << i << '\n';
    for (Eigen::Index r = 0; r < Q.blocks[i].rows(); ++r) {
      for (Eigen::Index c = 0; c < Q.blocks[i].cols(); ++c) out << (c ? " " : "") << Q.blocks[i](r, c);
      out << '\n';
    }
  }
  if (!out) throw io_error("failed while writing bundle " + path);
}

void load_bundle(const std::string& path, UniverseMatching& U, UniverseMaps& Q) {
  std::ifstream file(path);
  if (!file) throw io_error("cannot open bundle " + path);
  std::stringstream in;
  for (std::string line; std::getline(file, line);) {
    if (!line.empty() && line[0] == '#') continue;
    in << line << '\n';
  }
  const auto fail = [&](const std::string& what) { throw io_error("bundle " + path + ": " + what); };
  const auto expect = [&](const char* word) {
    std::string token;
    if (!(in >> token) || token != word) fail(std::string("expected '") + word + "'");
  };

  expect("isomush-bundle");
  int version = 0;
  if (!(in >> version) || version != 1) fail("unsupported version");
  int k = 0, d = 0, rows = 0, cols = 0;
  expect("shapes");
  in >> k;
  expect("universe");
  in >> d;
  expect("rows");
  in >> rows;
  expect("cols");
  in >> cols;
  if (!in || k < 0 || d < 0 || rows < 0 || cols < rows) fail("malformed header");

  UniverseMatching matching;
  matching.universe_size = d;
  matching.assignment.resize(k);
  for (int i = 0; i < k; ++i) {
    expect("matching");
    int index = -1, size = -1;
    if (!(in >> index >> size) || index != i || size < 0) fail("malformed matching header for shape " + std::to_string(i));
    matching.assignment[i].resize(size);
    for (auto& c : matching.assignment[i]) {
      if (!(in >> c)) fail("truncated matching for shape " + std::to_string(i));
    }
  }
  try {
    matching.validate();
  } catch (const Error& e) {
    fail(e.what());
  }

  UniverseMaps maps;
  if (rows > 0) {
    maps.blocks.resize(k);
    for (int i = 0; i < k; ++i) {
      expect("map");
      int index = -1;
      if (!(in >> index) || index != i) fail("malformed map header for shape " + std::to_string(i));
      maps.blocks[i].resize(rows, cols);
      for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
          if (!(in >> maps.blocks[i](r, c))) fail("truncated map for shape " + std::to_string(i));
        }
      }
    }
  }
  U = std::move(matching);
  Q = std::move(maps);
}

}  // namespace isomush
