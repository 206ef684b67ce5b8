#include <doctest.h>

#include <cmath>

#include "isomush/descriptors.hpp"
#include "isomush/error.hpp"
#include "support/synthetic.hpp"

using namespace isomush;
namespace ts = testing_support;

namespace {

const SpectralBasis& sphere_basis() {
  static const SpectralBasis basis = eigenbasis(ts::bumpy_sphere(9, 12, 17), 20);
  return basis;
}

}  // namespace

TEST_CASE("HKS near zero time is the sum of squared eigenfunctions") {
  // The operation rejects t = 0, so the limit is checked at a tiny positive time.
  const auto& basis = sphere_basis();
  const auto field = hks_raw(basis, {1e-14});
  const Eigen::VectorXd expected = basis.phi.array().square().rowwise().sum();
  CHECK((field.values.col(0) - expected).cwiseAbs().maxCoeff() < 1e-10 * expected.maxCoeff());
  CHECK_THROWS_AS(hks_raw(basis, {0.0}), Error);
  CHECK_THROWS_AS(hks_raw(basis, {-1.0}), Error);
}

TEST_CASE("HKS is positive and nonincreasing in time") {
  const auto& basis = sphere_basis();
  const auto times = default_hks_times(basis, 16);
  REQUIRE(times.size() == 16);
  CHECK(times.front() == doctest::Approx(4.0 * std::log(10.0) / basis.eigenvalues[19]));
  CHECK(times.back() == doctest::Approx(4.0 * std::log(10.0) / basis.eigenvalues[1]));
  const auto field = hks_raw(basis, times);
  CHECK((field.values.array() > 0.0).all());
  for (int c = 1; c < 16; ++c) CHECK((field.values.col(c).array() <= field.values.col(c - 1).array()).all());
}

TEST_CASE("HKS at long times approaches the constant eigenfunction") {
  const auto& basis = sphere_basis();
  const auto field = hks_raw(basis, {1e3 / basis.eigenvalues[1]});
  const Eigen::VectorXd expected = basis.phi.col(0).array().square();
  CHECK((field.values.col(0) - expected).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(field.values.col(0).maxCoeff() - field.values.col(0).minCoeff() < 1e-6);
}

TEST_CASE("WKS is a convex combination of squared eigenfunctions") {
  const auto& basis = sphere_basis();
  const auto samples = default_wks_samples(basis, 32, 7.0);
  REQUIRE(samples.energies.size() == 32);
  CHECK(samples.sigma == doctest::Approx(7.0 * (samples.energies[1] - samples.energies[0])));
  const auto field = wks_raw(basis, samples.energies, samples.sigma);
  const Eigen::ArrayXd lo = basis.phi.rightCols(19).array().square().rowwise().minCoeff();
  const Eigen::ArrayXd hi = basis.phi.rightCols(19).array().square().rowwise().maxCoeff();
  for (int c = 0; c < 32; ++c) {
    CHECK((field.values.col(c).array() >= lo - 1e-15).all());
    CHECK((field.values.col(c).array() <= hi + 1e-15).all());
  }
}

TEST_CASE("WKS with a single retained eigenpair reproduces it") {
  const auto& basis = sphere_basis();
  const auto two = basis.truncated(2);  // the constant pair is skipped
  const auto field = wks_raw(two, {0.3, -2.0}, 0.5);
  const Eigen::VectorXd expected = two.phi.col(1).array().square();
  CHECK((field.values.col(0) - expected).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((field.values.col(1) - expected).cwiseAbs().maxCoeff() < 1e-15);
  CHECK_THROWS_AS(wks_raw(basis.truncated(1), {0.0}, 1.0), Error);
}

TEST_CASE("WKS is invariant under rotation of a degenerate eigenspace") {
  const auto basis = eigenbasis(ts::icosahedron(), 4);
  ts::Rng rng(9);
  SpectralBasis rotated = basis;
  rotated.phi.rightCols(3) = basis.phi.rightCols(3) * ts::random_orthogonal(3, rng);
  const std::vector<double> energies = {std::log(basis.eigenvalues[1]) - 0.5, std::log(basis.eigenvalues[1]) + 0.2};
  const auto a = wks_raw(basis, energies, 0.4);
  const auto b = wks_raw(rotated, energies, 0.4);
  CHECK((a.values - b.values).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("normalisation examples") {
  const auto& basis = sphere_basis();
  const auto field = hks(basis, default_hks_times(basis, 4));
  for (int c = 0; c < 4; ++c) {
    CHECK(basis.mass.dot(field.values.col(c).cwiseAbs2()) == doctest::Approx(1.0).epsilon(1e-12));
  }
  // Idempotent on normalised columns.
  const auto again = normalize_descriptors(field, basis.mass);
  CHECK((again.values - field.values).cwiseAbs().maxCoeff() < 1e-12);

  // Scale invariant.
  DescriptorField scaled = hks_raw(basis, default_hks_times(basis, 4));
  const auto unscaled = normalize_descriptors(scaled, basis.mass);
  scaled.values *= 7.0;
  CHECK((normalize_descriptors(scaled, basis.mass).values - unscaled.values).cwiseAbs().maxCoeff() < 1e-14);

  // A constant column on total area A becomes 1/sqrt(A).
  DescriptorField constant;
  constant.values = Eigen::MatrixXd::Constant(basis.num_vertices(), 1, 3.5);
  const double area = basis.mass.sum();
  const auto unit = normalize_descriptors(constant, basis.mass);
  CHECK((unit.values.array() - 1.0 / std::sqrt(area)).abs().maxCoeff() < 1e-14);

  constant.values.setZero();
  CHECK_THROWS_AS(normalize_descriptors(constant, basis.mass), Error);
}

TEST_CASE("descriptors are intrinsic and deterministic") {
  const Shape s = ts::bumpy_sphere(8, 11, 23);
  ts::Rng rng(1);
  const auto moved = ts::permuted_rigid_copy(s, rng);
  const auto a = eigenbasis(s, 12);
  const auto b = eigenbasis(moved.shape, 12);
  const auto fa = hks(a, default_hks_times(a, 8));
  const auto fb = hks(b, default_hks_times(b, 8));
  for (int u = 0; u < s.num_vertices(); ++u) {
    CHECK((fa.values.row(u) - fb.values.row(moved.map[u])).cwiseAbs().maxCoeff() < 1e-8);
  }
  CHECK(hks(a, default_hks_times(a, 8)).values == fa.values);
}
