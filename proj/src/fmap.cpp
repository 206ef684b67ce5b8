#include "isomush/fmap.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

#include <Eigen/QR>

#include "isomush/error.hpp"

namespace isomush {

int PairwiseMap::num_matched() const {
  return static_cast<int>(std::count_if(match.begin(), match.end(), [](int v) { return v != kUnmatched; }));
}

bool PairwiseMap::is_permutation(int target_size) const {
  if (static_cast<int>(match.size()) != target_size) return false;
  std::vector<char> hit(target_size, 0);
  for (int v : match) {
    if (v < 0 || v >= target_size || hit[v]) return false;
    hit[v] = 1;
  }
  return true;
}

Eigen::MatrixXd descriptor_coefficients(const SpectralBasis& basis, const Eigen::MatrixXd& descriptors) {
  if (descriptors.rows() != basis.num_vertices()) throw usage_error("descriptor rows do not match basis vertices");
  return (basis.phi.transpose() * basis.mass.asDiagonal() * descriptors).transpose();
}

PairwiseFmap solve_fmap(const Eigen::Ref<const Eigen::MatrixXd>& F, const Eigen::Ref<const Eigen::MatrixXd>& G,
                        int source, int target) {
  if (F.rows() != G.rows() || F.cols() != G.cols()) throw usage_error("descriptor coefficient shapes differ");
  if (F.rows() < F.cols()) {
    std::ostringstream msg;
    msg << "only " << F.rows() << " descriptor constraints for a basis of size " << F.cols()
        << "; use more descriptor samples";
    throw numerical_error(msg.str());
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(F);
  if (qr.rank() < F.cols()) {
    std::ostringstream msg;
    msg << "descriptor coefficients have rank " << qr.rank() << " < " << F.cols() << "; use more descriptor samples";
    throw numerical_error(msg.str());
  }
  return {source, target, qr.solve(G)};
}

PairwiseMap extract_pointwise(const SpectralBasis& basis_i, const SpectralBasis& basis_j, const PairwiseFmap& fmap) {
  const int b = fmap.size();
  if (fmap.C.cols() != b || b > basis_i.size() || b > basis_j.size()) {
    throw usage_error("functional map size does not fit the bases");
  }
  const Eigen::MatrixXd mapped = basis_i.phi.leftCols(b) * fmap.C;
  // Row-major copy of the target embedding for contiguous scans.
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> target = basis_j.phi.leftCols(b);
  const int mi = basis_i.num_vertices();
  const int mj = basis_j.num_vertices();

  PairwiseMap out;
  out.source = fmap.source;
  out.target = fmap.target;
  out.match.assign(mi, kUnmatched);
#pragma omp parallel for schedule(static)
  for (int u = 0; u < mi; ++u) {
    const Eigen::RowVectorXd x = mapped.row(u);
    double best = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (int v = 0; v < mj; ++v) {
      double d2 = 0.0;
      const double* y = target.data() + static_cast<std::size_t>(v) * b;
      for (int c = 0; c < b; ++c) {
        const double diff = x[c] - y[c];
        d2 += diff * diff;
      }
      if (d2 < best) {
        best = d2;
        arg = v;
      }
    }
    out.match[u] = arg;
  }
  out.degenerate =
      mi > 1 && std::all_of(out.match.begin(), out.match.end(), [&](int v) { return v == out.match.front(); });
  return out;
}

UpsampleResult spectral_upsample(const SpectralBasis& basis_i, const SpectralBasis& basis_j, const PairwiseFmap& initial,
                                 int target_size, int step) {
  if (step < 1) throw usage_error("upsampling step must be positive");
  if (initial.size() > target_size || target_size > std::min(basis_i.size(), basis_j.size())) {
    throw usage_error("upsampling target size must lie between the initial map size and the basis size");
  }
  UpsampleResult result{initial, extract_pointwise(basis_i, basis_j, initial)};
  while (result.fmap.size() < target_size) {
    const int next = std::min(result.fmap.size() + step, target_size);
    Eigen::MatrixXd pulled(basis_i.num_vertices(), next);
    for (int u = 0; u < basis_i.num_vertices(); ++u) pulled.row(u) = basis_j.phi.row(result.map.match[u]).head(next);
    result.fmap.C = basis_i.phi.leftCols(next).transpose() * basis_i.mass.asDiagonal() * pulled;
    result.map = extract_pointwise(basis_i, basis_j, result.fmap);
  }
  return result;
}

void write_pairwise_map(const std::filesystem::path& path, const PairwiseMap& map) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write " + path.string());
  for (std::size_t u = 0; u < map.match.size(); ++u) {
    if (map.match[u] != kUnmatched) out << u << ' ' << map.match[u] << '\n';
  }
  if (!out) throw io_error("failed while writing " + path.string());
}

PairwiseMap read_pairwise_map(const std::filesystem::path& path, int source_size, int source, int target) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path.string());
  PairwiseMap map;
  map.source = source;
  map.target = target;
  map.match.assign(source_size, kUnmatched);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    long u = -1, v = -1;
    if (!(ls >> u >> v) || u < 0 || u >= source_size || v < 0) {
      throw io_error(path.string() + ":" + std::to_string(line_no) + ": malformed correspondence '" + line + "'");
    }
    map.match[u] = static_cast<int>(v);
  }
  return map;
}

}  // namespace isomush
