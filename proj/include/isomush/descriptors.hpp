#pragma once

#include <filesystem>
#include <vector>

#include <Eigen/Core>

#include "isomush/spectral.hpp"

namespace isomush {

enum class DescriptorKind { kHks, kWks };

struct DescriptorField {
  Eigen::MatrixXd values;       // m x q
  DescriptorKind kind = DescriptorKind::kHks;
  std::vector<double> samples;  // HKS times or WKS log-energies, one per column
};

// Heat kernel signature sum_j exp(-lambda_j t) phi_j(x)^2, without normalisation.
DescriptorField hks_raw(const SpectralBasis& basis, const std::vector<double>& times);

// Wave kernel signature at log-energies e with Gaussian bandwidth sigma.
// Eigenvalues below 1e-8 are skipped.
DescriptorField wks_raw(const SpectralBasis& basis, const std::vector<double>& energies, double sigma);

// Scales each column to unit mass-weighted norm: sum_x mass(x) v(x)^2 = 1.
DescriptorField normalize_descriptors(DescriptorField field, const Eigen::VectorXd& mass);

inline DescriptorField hks(const SpectralBasis& basis, const std::vector<double>& times) {
  return normalize_descriptors(hks_raw(basis, times), basis.mass);
}
inline DescriptorField wks(const SpectralBasis& basis, const std::vector<double>& energies, double sigma) {
  return normalize_descriptors(wks_raw(basis, energies, sigma), basis.mass);
}

// `count` log-spaced times in [4 ln 10 / lambda_b, 4 ln 10 / lambda_2].
std::vector<double> default_hks_times(const SpectralBasis& basis, int count = 16);

struct WksSamples {
  std::vector<double> energies;
  double sigma = 0.0;
};
// `count` log-energies evenly spread over [log lambda_2, log lambda_b]; sigma
// is `variance` times the energy step.
WksSamples default_wks_samples(const SpectralBasis& basis, int count = 32, double variance = 7.0);

void write_descriptor_csv(const std::filesystem::path& path, const DescriptorField& field);

}  // namespace isomush
