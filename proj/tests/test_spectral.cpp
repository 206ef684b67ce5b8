#include <doctest.h>

#include <cmath>
#include <filesystem>

#include <Eigen/Eigenvalues>

#include "isomush/error.hpp"
#include "isomush/spectral.hpp"
#include "support/synthetic.hpp"

using namespace isomush;
namespace ts = testing_support;

TEST_CASE("stiffness rows sum to zero and the matrix is bit-symmetric") {
  for (const auto& s : {ts::unit_square(), ts::icosahedron(), ts::bumpy_sphere(8, 10, 2)}) {
    const auto lap = cotangent_laplacian(s);
    const Eigen::MatrixXd W(lap.stiffness);
    CHECK(W.rowwise().sum().cwiseAbs().maxCoeff() < 1e-10);
    CHECK(W == W.transpose());
    CHECK(lap.mass == s.vertex_areas());
  }
}

TEST_CASE("equilateral triangle carries half-cotangent weights") {
  const auto lap = cotangent_laplacian(ts::equilateral_triangle());
  const double w = 0.5 / std::tan(std::acos(-1.0) / 3.0);
  CHECK(w == doctest::Approx(0.288675).epsilon(1e-6));
  for (int u = 0; u < 3; ++u) {
    for (int v = 0; v < 3; ++v) {
      if (u != v) CHECK(-lap.stiffness.coeff(u, v) == doctest::Approx(w).epsilon(1e-14));
    }
  }
}

TEST_CASE("eigenbasis contract on a generic mesh") {
  const Shape s = ts::bumpy_sphere(10, 13, 4);
  const auto lap = cotangent_laplacian(s);
  const auto basis = eigenbasis(lap.stiffness, lap.mass, 20);
  REQUIRE(basis.size() == 20);

  const Eigen::MatrixXd gram = basis.phi.transpose() * basis.mass.asDiagonal() * basis.phi;
  CHECK((gram - Eigen::MatrixXd::Identity(20, 20)).cwiseAbs().maxCoeff() < 1e-8);

  CHECK(basis.eigenvalues[0] >= -1e-10);
  CHECK(basis.eigenvalues[0] <= 1e-8);
  for (int j = 1; j < 20; ++j) CHECK(basis.eigenvalues[j] >= basis.eigenvalues[j - 1]);

  const Eigen::VectorXd first = basis.phi.col(0);
  CHECK(first.maxCoeff() - first.minCoeff() < 1e-6);
  CHECK(max_rayleigh_residual(lap.stiffness, basis) < 1e-7);

  for (int j = 0; j < 20; ++j) {
    Eigen::Index arg = 0;
    basis.phi.col(j).cwiseAbs().maxCoeff(&arg);
    CHECK(basis.phi(arg, j) > 0.0);
  }
}

TEST_CASE("icosahedron has a threefold second eigenvalue") {
  const Shape s = ts::icosahedron();
  const auto lap = cotangent_laplacian(s);
  const auto basis = eigenbasis(lap.stiffness, lap.mass, 4);
  CHECK(std::abs(basis.eigenvalues[1] - basis.eigenvalues[2]) < 1e-6);
  CHECK(std::abs(basis.eigenvalues[2] - basis.eigenvalues[3]) < 1e-6);

  // Independent generalised solve on the dense 12 x 12 system.
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> oracle(Eigen::MatrixXd(lap.stiffness),
                                                                     Eigen::MatrixXd(lap.mass.asDiagonal()));
  for (int j = 0; j < 4; ++j) CHECK(basis.eigenvalues[j] == doctest::Approx(oracle.eigenvalues()[j]).epsilon(1e-10));
  CHECK(basis.eigenvalues[1] > 1e-3);
}

TEST_CASE("eigenvalues are invariant under rigid motion and relabelling") {
  const Shape s = ts::bumpy_sphere(9, 12, 6);
  ts::Rng rng(3);
  const auto moved = ts::permuted_rigid_copy(s, rng);
  const auto a = eigenbasis(s, 15);
  const auto b = eigenbasis(moved.shape, 15);
  for (int j = 1; j < 15; ++j) CHECK(ts::relative_gap(a.eigenvalues[j], b.eigenvalues[j]) < 1e-8);
}

TEST_CASE("basis size must fit the mesh") {
  const Shape s = ts::regular_tetrahedron();
  CHECK_THROWS_AS(eigenbasis(s, 5), Error);
  CHECK_THROWS_AS(eigenbasis(s, 0), Error);
  CHECK(eigenbasis(s, 4).size() == 4);
}

TEST_CASE("basis cache round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "isomush_test_spectral_cache";
  std::filesystem::remove_all(dir);
  const Shape s = ts::bumpy_sphere(6, 7, 8);
  const auto computed = cached_eigenbasis(s, 6, dir);
  CHECK(std::filesystem::exists(basis_cache_path(dir, s, 6)));
  const auto cached = cached_eigenbasis(s, 6, dir);
  CHECK(cached.phi == computed.phi);
  CHECK(cached.eigenvalues == computed.eigenvalues);
  CHECK(cached.mass == computed.mass);
  CHECK_FALSE(load_basis(dir / "missing.basis").has_value());
}

TEST_CASE("truncation keeps the leading columns") {
  const auto basis = eigenbasis(ts::bumpy_sphere(6, 7, 8), 8);
  const auto small = basis.truncated(3);
  CHECK(small.phi == basis.phi.leftCols(3));
  CHECK(small.eigenvalues == basis.eigenvalues.head(3));
  CHECK_THROWS_AS(basis.truncated(9), Error);
}
