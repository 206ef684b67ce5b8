#include "isomush/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

#include "isomush/error.hpp"

namespace isomush {

namespace {

void check_shape(const Eigen::Ref<const Eigen::MatrixXd>& profit) {
  if (profit.rows() > profit.cols()) {
    std::ostringstream msg;
    msg << "universe too small: " << profit.rows() << " rows cannot be assigned to " << profit.cols()
        << " columns";
    throw numerical_error(msg.str());
  }
  if (!profit.allFinite()) throw numerical_error("assignment profits contain non-finite values");
}

bool is_integral(const Eigen::Ref<const Eigen::MatrixXd>& profit) {
  return (profit.array() == profit.array().round()).all();
}

// Non-negative integer-valued profits, row-major and column-major copies.
struct ScaledProblem {
  int m = 0;
  int n = 0;
  std::vector<double> benefit;
  std::vector<double> by_col;
  double range = 0.0;

  double at(int i, int j) const { return benefit[static_cast<std::size_t>(i) * n + j]; }
};

ScaledProblem integerize(const Eigen::Ref<const Eigen::MatrixXd>& profit, const AuctionOptions& options) {
  ScaledProblem p;
  p.m = static_cast<int>(profit.rows());
  p.n = static_cast<int>(profit.cols());
  if (p.m == 0) return p;
  p.benefit.resize(static_cast<std::size_t>(p.m) * p.n);
  p.by_col.resize(p.benefit.size());

  const double lo = profit.minCoeff();
  const double hi = profit.maxCoeff();
  const double grid = 1.0 / options.resolution;
  double scale = 1.0;
  if (!(is_integral(profit) && hi - lo <= grid)) scale = hi > lo ? grid / (hi - lo) : 0.0;
  for (int i = 0; i < p.m; ++i) {
    for (int j = 0; j < p.n; ++j) {
      const double v = std::round((profit(i, j) - lo) * scale);
      p.benefit[static_cast<std::size_t>(i) * p.n + j] = v;
      p.by_col[static_cast<std::size_t>(j) * p.m + i] = v;
    }
  }
  p.range = std::round((hi - lo) * scale);
  return p;
}

// Forward/reverse auction with epsilon scaling for m <= n. Rows bid for
// columns (Gauss-Seidel, FIFO); when m < n a reverse pass then pulls every
// unassigned column down to lambda, the lowest assigned price, so that
// epsilon-complementary slackness also covers the unused columns. No padding
// rows: identical dummies get into long price wars over the cheap columns.
std::vector<int> auction(const ScaledProblem& p, const AuctionOptions& options) {
  const int m = p.m;
  const int n = p.n;
  std::vector<int> row_to_col(m, -1);
  if (m == 0) return row_to_col;
  if (n == 1) {
    row_to_col[0] = 0;
    return row_to_col;
  }

  const double eps_final = 1.0 / (m + 1);
  double eps = std::max(p.range / 4.0, 0.5 * eps_final);
  std::vector<double> price(n, 0.0);
  std::vector<int> col_to_row(n, -1);
  std::vector<double> profit_of(m);
  std::deque<int> queue;

  for (;;) {
    std::fill(row_to_col.begin(), row_to_col.end(), -1);
    std::fill(col_to_row.begin(), col_to_row.end(), -1);
    queue.clear();
    for (int i = 0; i < m; ++i) queue.push_back(i);

    while (!queue.empty()) {
      const int i = queue.front();
      queue.pop_front();
      const double* row = &p.benefit[static_cast<std::size_t>(i) * n];
      int best = 0;
      double best_value = row[0] - price[0];
      double second_value = -std::numeric_limits<double>::infinity();
      for (int j = 1; j < n; ++j) {
        const double value = row[j] - price[j];
        if (value > best_value) {
          second_value = best_value;
          best_value = value;
          best = j;
        } else if (value > second_value) {
          second_value = value;
        }
      }
      price[best] += best_value - second_value + eps;
      if (const int previous = col_to_row[best]; previous >= 0) {
        row_to_col[previous] = -1;
        queue.push_back(previous);
      }
      col_to_row[best] = i;
      row_to_col[i] = best;
    }

    if (m < n) {
      double lambda = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m; ++i) {
        lambda = std::min(lambda, price[row_to_col[i]]);
        profit_of[i] = p.at(i, row_to_col[i]) - price[row_to_col[i]];
      }
      for (int j = 0; j < n; ++j) {
        if (col_to_row[j] < 0 && price[j] > lambda) queue.push_back(j);
      }
      while (!queue.empty()) {
        const int j = queue.front();
        queue.pop_front();
        const double* col = &p.by_col[static_cast<std::size_t>(j) * m];
        int best = 0;
        double best_value = col[0] - profit_of[0];
        double second_value = -std::numeric_limits<double>::infinity();
        for (int i = 1; i < m; ++i) {
          const double value = col[i] - profit_of[i];
          if (value > best_value) {
            second_value = best_value;
            best_value = value;
            best = i;
          } else if (value > second_value) {
            second_value = value;
          }
        }
        if (lambda >= best_value - eps) {
          price[j] = lambda;
          continue;
        }
        price[j] = std::max(lambda, second_value - eps);
        const int released = row_to_col[best];
        col_to_row[released] = -1;
        row_to_col[best] = j;
        col_to_row[j] = best;
        profit_of[best] = col[best] - price[j];
        if (price[released] > lambda) queue.push_back(released);
      }
    }

    if (eps < eps_final) break;
    eps /= options.eps_factor;
  }
  return row_to_col;
}

}  // namespace

bool PartialPermutation::is_valid() const {
  if (n_rows > n_cols || static_cast<int>(assign.size()) != n_rows) return false;
  std::vector<char> used(n_cols, 0);
  for (int c : assign) {
    if (c < 0 || c >= n_cols || used[c]) return false;
    used[c] = 1;
  }
  return true;
}

double PartialPermutation::objective(const Eigen::Ref<const Eigen::MatrixXd>& profit) const {
  double total = 0.0;
  for (int i = 0; i < n_rows; ++i) total += profit(i, assign[i]);
  return total;
}

PartialPermutation solve_lap_max(const Eigen::Ref<const Eigen::MatrixXd>& profit, const AuctionOptions& options) {
  check_shape(profit);
  const auto problem = integerize(profit, options);
  const auto row_to_col = auction(problem, options);
  PartialPermutation result;
  result.n_rows = static_cast<int>(profit.rows());
  result.n_cols = static_cast<int>(profit.cols());
  result.assign = row_to_col;
  return result;
}

PartialPermutation hungarian_oracle(const Eigen::Ref<const Eigen::MatrixXd>& profit) {
  check_shape(profit);
  const int rows = static_cast<int>(profit.rows());
  const int n = static_cast<int>(profit.cols());
  PartialPermutation result;
  result.n_rows = rows;
  result.n_cols = n;
  if (n == 0) return result;

  // Minimise cost = -profit; padded rows cost zero. 1-based potentials.
  const auto cost = [&](int i, int j) { return i < rows ? -profit(i, j) : 0.0; };
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  result.assign.assign(rows, -1);
  for (int j = 1; j <= n; ++j) {
    if (p[j] - 1 < rows) result.assign[p[j] - 1] = j - 1;
  }
  return result;
}

UniverseMatching project_blockwise_P(const Eigen::Ref<const Eigen::MatrixXd>& score, std::span<const int> block_sizes,
                                     const AuctionOptions& options) {
  const int k = static_cast<int>(block_sizes.size());
  std::vector<int> offsets(k + 1, 0);
  for (int i = 0; i < k; ++i) {
    if (block_sizes[i] < 0) throw usage_error("negative block size");
    if (block_sizes[i] > score.cols()) {
      std::ostringstream msg;
      msg << "universe too small: block " << i << " has " << block_sizes[i] << " rows but the universe has "
          << score.cols() << " points";
      throw numerical_error(msg.str());
    }
    offsets[i + 1] = offsets[i] + block_sizes[i];
  }
  if (offsets[k] != score.rows()) throw usage_error("block sizes do not sum to the score row count");
  if (!score.allFinite()) throw numerical_error("assignment profits contain non-finite values");

  UniverseMatching out;
  out.universe_size = static_cast<int>(score.cols());
  out.assignment.resize(k);
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < k; ++i) {
    out.assignment[i] = solve_lap_max(score.middleRows(offsets[i], block_sizes[i]), options).assign;
  }
  return out;
}

}  // namespace isomush
