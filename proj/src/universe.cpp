#include "isomush/universe.hpp"

#include <sstream>

#include "isomush/error.hpp"

namespace isomush {

int UniverseMatching::total_rows() const {
  int total = 0;
  for (const auto& block : assignment) total += static_cast<int>(block.size());
  return total;
}

std::vector<int> UniverseMatching::block_sizes() const {
  std::vector<int> sizes;
  sizes.reserve(assignment.size());
  for (const auto& block : assignment) sizes.push_back(static_cast<int>(block.size()));
  return sizes;
}

std::vector<int> UniverseMatching::block_offsets() const {
  std::vector<int> offsets(assignment.size() + 1, 0);
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    offsets[i + 1] = offsets[i] + static_cast<int>(assignment[i].size());
  }
  return offsets;
}

void UniverseMatching::validate() const {
  std::vector<int> seen(universe_size > 0 ? universe_size : 0, -1);
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    for (std::size_t u = 0; u < assignment[i].size(); ++u) {
      const int c = assignment[i][u];
      std::ostringstream msg;
      if (c < 0 || c >= universe_size) {
        msg << "shape " << i << " vertex " << u << " has universe index " << c << " outside [0, " << universe_size
            << ")";
        throw numerical_error(msg.str());
      }
      if (seen[c] == static_cast<int>(i)) {
        msg << "shape " << i << " assigns universe point " << c << " twice";
        throw numerical_error(msg.str());
      }
      seen[c] = static_cast<int>(i);
    }
  }
}

bool UniverseMatching::is_valid() const {
  try {
    validate();
    return true;
  } catch (const Error&) {
    return false;
  }
}

double UniverseMaps::max_orthogonality_error() const {
  double worst = 0.0;
  for (const auto& C : blocks) {
    const Eigen::MatrixXd gram = C * C.transpose();
    worst = std::max(worst, (gram - Eigen::MatrixXd::Identity(C.rows(), C.rows())).cwiseAbs().maxCoeff());
  }
  return worst;
}

Eigen::MatrixXd UniverseMaps::stacked() const {
  Eigen::MatrixXd Q(rows() * num_shapes(), cols());
  for (int i = 0; i < num_shapes(); ++i) Q.middleRows(i * rows(), rows()) = blocks[i];
  return Q;
}

}  // namespace isomush
