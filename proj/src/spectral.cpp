#include "isomush/spectral.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>

#include "isomush/error.hpp"

namespace isomush {

namespace {

constexpr double kResidualLimit = 1e-7;
constexpr std::uint32_t kCacheMagic = 0x5342554d;  // "MUBS"

}  // namespace

SpectralBasis SpectralBasis::truncated(int b) const {
  if (b < 1 || b > size()) throw usage_error("cannot truncate basis of size " + std::to_string(size()) + " to " + std::to_string(b));
  return {eigenvalues.head(b), phi.leftCols(b), mass};
}

Laplacian cotangent_laplacian(const Shape& shape) {
  const int n = shape.num_vertices();
  const auto& V = shape.vertices();
  const auto& F = shape.faces();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(F.rows()) * 12);

  for (int f = 0; f < F.rows(); ++f) {
    const Eigen::Vector3d p[3] = {V.row(F(f, 0)), V.row(F(f, 1)), V.row(F(f, 2))};
    const double double_area = (p[1] - p[0]).cross(p[2] - p[0]).norm();
    if (!(double_area > 0.0)) {
      std::ostringstream msg;
      msg << "face " << f << " (" << F(f, 0) << ", " << F(f, 1) << ", " << F(f, 2) << ") has zero area";
      throw numerical_error(msg.str());
    }
    // The corner c is opposite edge (c+1, c+2).
    for (int c = 0; c < 3; ++c) {
      const Eigen::Vector3d e1 = p[(c + 1) % 3] - p[c];
      const Eigen::Vector3d e2 = p[(c + 2) % 3] - p[c];
      const double half_cot = 0.5 * e1.dot(e2) / double_area;
      const int u = F(f, (c + 1) % 3);
      const int v = F(f, (c + 2) % 3);
      triplets.emplace_back(u, v, -half_cot);
      triplets.emplace_back(v, u, -half_cot);
      triplets.emplace_back(u, u, half_cot);
      triplets.emplace_back(v, v, half_cot);
    }
  }
  Laplacian lap;
  lap.stiffness.resize(n, n);
  lap.stiffness.setFromTriplets(triplets.begin(), triplets.end());
  lap.mass = shape.vertex_areas();
  return lap;
}

SpectralBasis eigenbasis(const Eigen::SparseMatrix<double>& stiffness, const Eigen::VectorXd& mass, int b) {
  const int n = static_cast<int>(stiffness.rows());
  if (b < 1 || b > n) {
    throw usage_error("basis size " + std::to_string(b) + " must lie in [1, " + std::to_string(n) + "]");
  }
  if ((mass.array() <= 0.0).any()) throw numerical_error("mass matrix has non-positive entries");

  // Symmetric reduction K = M^-1/2 W M^-1/2, phi = M^-1/2 y.
  const Eigen::VectorXd inv_sqrt = mass.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd K = inv_sqrt.asDiagonal() * Eigen::MatrixXd(stiffness) * inv_sqrt.asDiagonal();
  K = 0.5 * (K + K.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(K);
  if (solver.info() != Eigen::Success) throw numerical_error("dense eigensolver failed to converge");

  SpectralBasis basis;
  basis.mass = mass;
  basis.eigenvalues = solver.eigenvalues().head(b);
  basis.phi = inv_sqrt.asDiagonal() * solver.eigenvectors().leftCols(b);
  for (int j = 0; j < b; ++j) {
    Eigen::Index arg = 0;
    basis.phi.col(j).cwiseAbs().maxCoeff(&arg);
    if (basis.phi(arg, j) < 0.0) basis.phi.col(j) *= -1.0;
  }

  const double residual = max_rayleigh_residual(stiffness, basis);
  if (!(residual < kResidualLimit)) {
    std::ostringstream msg;
    msg << "eigensolver residual " << residual << " exceeds " << kResidualLimit;
    throw numerical_error(msg.str());
  }
  return basis;
}

double max_rayleigh_residual(const Eigen::SparseMatrix<double>& stiffness, const SpectralBasis& basis) {
  double worst = 0.0;
  for (int j = 0; j < basis.size(); ++j) {
    const Eigen::VectorXd r =
        stiffness * basis.phi.col(j) - basis.eigenvalues[j] * basis.mass.cwiseProduct(basis.phi.col(j));
    worst = std::max(worst, r.norm() / basis.phi.col(j).norm());
  }
  return worst;
}

std::filesystem::path basis_cache_path(const std::filesystem::path& dir, const Shape& shape, int b) {
  std::ostringstream name;
  name << std::hex << shape.content_hash() << std::dec << "_b" << b << ".basis";
  return dir / name.str();
}

void save_basis(const std::filesystem::path& path, const SpectralBasis& basis) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write basis cache " + path.string());
  const std::int64_t dims[2] = {basis.num_vertices(), basis.size()};
  out.write(reinterpret_cast<const char*>(&kCacheMagic), sizeof(kCacheMagic));
  out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  out.write(reinterpret_cast<const char*>(basis.eigenvalues.data()), sizeof(double) * dims[1]);
  out.write(reinterpret_cast<const char*>(basis.mass.data()), sizeof(double) * dims[0]);
  out.write(reinterpret_cast<const char*>(basis.phi.data()), sizeof(double) * dims[0] * dims[1]);
  if (!out) throw io_error("failed while writing basis cache " + path.string());
}

std::optional<SpectralBasis> load_basis(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::uint32_t magic = 0;
  std::int64_t dims[2] = {0, 0};
  in.read(reinterpret_cast<char*>(&magic), sizeof(magic));
  in.read(reinterpret_cast<char*>(dims), sizeof(dims));
  if (!in || magic != kCacheMagic || dims[0] <= 0 || dims[1] <= 0 || dims[1] > dims[0]) return std::nullopt;
  SpectralBasis basis;
  basis.eigenvalues.resize(dims[1]);
  basis.mass.resize(dims[0]);
  basis.phi.resize(dims[0], dims[1]);
  in.read(reinterpret_cast<char*>(basis.eigenvalues.data()), sizeof(double) * dims[1]);
  in.read(reinterpret_cast<char*>(basis.mass.data()), sizeof(double) * dims[0]);
  in.read(reinterpret_cast<char*>(basis.phi.data()), sizeof(double) * dims[0] * dims[1]);
  if (!in) return std::nullopt;
  return basis;
}

SpectralBasis cached_eigenbasis(const Shape& shape, int b, const std::filesystem::path& cache_dir) {
  if (cache_dir.empty()) return eigenbasis(shape, b);
  const auto path = basis_cache_path(cache_dir, shape, b);
  if (auto cached = load_basis(path); cached && cached->num_vertices() == shape.num_vertices()) return *cached;
  auto basis = eigenbasis(shape, b);
  std::filesystem::create_directories(cache_dir);
  save_basis(path, basis);
  return basis;
}

}  // namespace isomush
