#include "isomush/descriptors.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

#include "isomush/error.hpp"

namespace isomush {

namespace {

constexpr double kEigenvalueFloor = 1e-8;

// First eigenvalue index usable for log-spectrum sampling.
int first_positive(const SpectralBasis& basis) {
  for (int j = 0; j < basis.size(); ++j) {
    if (basis.eigenvalues[j] >= kEigenvalueFloor) return j;
  }
  throw numerical_error("all eigenvalues are below 1e-8; descriptors are undefined");
}

}  // namespace

DescriptorField hks_raw(const SpectralBasis& basis, const std::vector<double>& times) {
  if (times.empty()) throw usage_error("HKS needs at least one time sample");
  const Eigen::MatrixXd phi_sq = basis.phi.array().square();
  DescriptorField field;
  field.kind = DescriptorKind::kHks;
  field.samples = times;
  field.values.resize(basis.num_vertices(), static_cast<Eigen::Index>(times.size()));
  for (std::size_t c = 0; c < times.size(); ++c) {
    if (!(times[c] > 0.0)) throw usage_error("HKS time samples must be positive");
    if (c > 0 && times[c] < times[c - 1]) throw usage_error("HKS time samples must be ascending");
    // Eigenvalues may sit a hair below zero; clamp so the kernel stays bounded.
    const Eigen::VectorXd weights = (-basis.eigenvalues.cwiseMax(0.0) * times[c]).array().exp();
    field.values.col(static_cast<Eigen::Index>(c)) = phi_sq * weights;
  }
  return field;
}

DescriptorField wks_raw(const SpectralBasis& basis, const std::vector<double>& energies, double sigma) {
  if (energies.empty()) throw usage_error("WKS needs at least one energy sample");
  if (!(sigma > 0.0)) throw usage_error("WKS bandwidth must be positive");
  const int first = first_positive(basis);
  const int kept = basis.size() - first;
  const Eigen::VectorXd log_lambda = basis.eigenvalues.tail(kept).array().log();
  const Eigen::MatrixXd phi_sq = basis.phi.rightCols(kept).array().square();

  DescriptorField field;
  field.kind = DescriptorKind::kWks;
  field.samples = energies;
  field.values.resize(basis.num_vertices(), static_cast<Eigen::Index>(energies.size()));
  for (std::size_t c = 0; c < energies.size(); ++c) {
    const Eigen::VectorXd weights =
        (-(energies[c] - log_lambda.array()).square() / (2.0 * sigma * sigma)).exp();
    const double total = weights.sum();
    if (!(total > 0.0)) throw numerical_error("WKS weights underflow at energy " + std::to_string(energies[c]));
    field.values.col(static_cast<Eigen::Index>(c)) = phi_sq * (weights / total);
  }
  return field;
}

DescriptorField normalize_descriptors(DescriptorField field, const Eigen::VectorXd& mass) {
  if (mass.size() != field.values.rows()) throw usage_error("mass size does not match descriptor rows");
  if (!field.values.allFinite()) throw numerical_error("descriptor field has non-finite entries");
  for (Eigen::Index c = 0; c < field.values.cols(); ++c) {
    const double norm = std::sqrt(mass.dot(field.values.col(c).cwiseAbs2()));
    if (!(norm > 0.0)) throw numerical_error("descriptor column " + std::to_string(c) + " is zero");
    field.values.col(c) /= norm;
  }
  return field;
}

std::vector<double> default_hks_times(const SpectralBasis& basis, int count) {
  const int first = first_positive(basis);
  const double lo = 4.0 * std::log(10.0) / basis.eigenvalues[basis.size() - 1];
  const double hi = 4.0 * std::log(10.0) / basis.eigenvalues[first];
  std::vector<double> times(count);
  for (int i = 0; i < count; ++i) {
    const double s = count == 1 ? 0.0 : double(i) / (count - 1);
    times[i] = std::exp(std::log(lo) + s * (std::log(hi) - std::log(lo)));
  }
  return times;
}

WksSamples default_wks_samples(const SpectralBasis& basis, int count, double variance) {
  const int first = first_positive(basis);
  const double lo = std::log(basis.eigenvalues[first]);
  const double hi = std::log(basis.eigenvalues[basis.size() - 1]);
  WksSamples samples;
  samples.energies.resize(count);
  const double step = count == 1 ? 0.0 : (hi - lo) / (count - 1);
  for (int i = 0; i < count; ++i) samples.energies[i] = lo + i * step;
  samples.sigma = variance * (step > 0.0 ? step : 1.0);
  return samples;
}

void write_descriptor_csv(const std::filesystem::path& path, const DescriptorField& field) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write " + path.string());
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "vertex";
  for (double s : field.samples) out << ',' << (field.kind == DescriptorKind::kHks ? "t=" : "e=") << s;
  out << '\n';
  for (Eigen::Index v = 0; v < field.values.rows(); ++v) {
    out << v;
    for (Eigen::Index c = 0; c < field.values.cols(); ++c) out << ',' << field.values(v, c);
    out << '\n';
  }
}

}  // namespace isomush
