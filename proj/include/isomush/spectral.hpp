#pragma once

#include <filesystem>
#include <optional>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "isomush/mesh.hpp"

namespace isomush {

// Cotangent discretisation: stiffness is symmetric positive semidefinite with
// off-diagonals -(cot a + cot b)/2 and zero row sums; mass is the lumped
// barycentric vertex area.
struct Laplacian {
  Eigen::SparseMatrix<double> stiffness;
  Eigen::VectorXd mass;
};

// Truncated Laplace-Beltrami eigenbasis, mass-orthonormal (phi^T M phi = I).
struct SpectralBasis {
  Eigen::VectorXd eigenvalues;  // ascending
  Eigen::MatrixXd phi;          // m x b
  Eigen::VectorXd mass;         // lumped mass diagonal

  int size() const { return static_cast<int>(phi.cols()); }
  int num_vertices() const { return static_cast<int>(phi.rows()); }

  // Leading `b` columns/eigenvalues.
  SpectralBasis truncated(int b) const;
};

Laplacian cotangent_laplacian(const Shape& shape);

// b smallest eigenpairs of W phi = lambda M phi. Each eigenvector is
// sign-normalised so its largest-magnitude entry is positive.
SpectralBasis eigenbasis(const Eigen::SparseMatrix<double>& stiffness, const Eigen::VectorXd& mass, int b);

inline SpectralBasis eigenbasis(const Shape& shape, int b) {
  const auto lap = cotangent_laplacian(shape);
  return eigenbasis(lap.stiffness, lap.mass, b);
}

// Max over columns of ||W phi_j - lambda_j M phi_j|| / ||phi_j||.
double max_rayleigh_residual(const Eigen::SparseMatrix<double>& stiffness, const SpectralBasis& basis);

// Binary basis cache keyed by mesh content hash and b.
std::filesystem::path basis_cache_path(const std::filesystem::path& dir, const Shape& shape, int b);
void save_basis(const std::filesystem::path& path, const SpectralBasis& basis);
std::optional<SpectralBasis> load_basis(const std::filesystem::path& path);

// Computes the basis, reusing the cache in `cache_dir` when it is non-empty.
SpectralBasis cached_eigenbasis(const Shape& shape, int b, const std::filesystem::path& cache_dir);

}  // namespace isomush
