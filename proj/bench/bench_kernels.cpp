// Times the OpenMP kernels against the serial reference loops.
//   bench_kernels [shapes=8] [vertices=1000] [basis=30] [reps=5]

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>

#include <omp.h>

#include "isomush/kernels.hpp"
#include "support/synthetic.hpp"

using namespace isomush;
namespace ts = testing_support;

namespace {

double best_of(int reps, const std::function<void()>& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  const int k = argc > 1 ? std::atoi(argv[1]) : 8;
  const int m = argc > 2 ? std::atoi(argv[2]) : 1000;
  const int b = argc > 3 ? std::atoi(argv[3]) : 30;
  const int reps = argc > 4 ? std::atoi(argv[4]) : 5;
  if (k < 1 || m < b || b < 1 || reps < 1) {
    std::cerr << "usage: bench_kernels [shapes] [vertices >= basis] [basis] [reps]\n";
    return 1;
  }

  ts::Rng rng(1);
  const std::vector<int> sizes(k, m);
  const auto phi = ts::random_stacked_basis(sizes, b, rng);
  const auto U = ts::random_universe(sizes, m, rng);
  const auto Q = ts::random_maps(k, b, b, rng);

  std::cout << "k=" << k << " m_i=" << m << " b=" << b << " threads=" << omp_get_max_threads() << "\n";
  std::cout << std::left << std::setw(16) << "kernel" << std::setw(14) << "parallel_s" << std::setw(14)
            << "reference_s" << "speedup\n";
  const auto row = [&](const char* name, const std::function<Eigen::MatrixXd()>& par,
                       const std::function<Eigen::MatrixXd()>& ref) {
    Eigen::MatrixXd a, r;
    const double tp = best_of(reps, [&] { a = par(); });
    const double tr = best_of(reps, [&] { r = ref(); });
    const double diff = (a - r).cwiseAbs().maxCoeff();
    std::cout << std::left << std::setw(16) << name << std::setw(14) << tp << std::setw(14) << tr << tr / tp
              << "  (max diff " << diff << ")\n";
  };
  row("universe_sum", [&] { return kernels::universe_sum(phi, U, Q); },
      [&] { return kernels::reference::universe_sum(phi, U, Q); });
  row("u_step_scores", [&] { return kernels::u_step_scores(phi, U, Q); },
      [&] { return kernels::reference::u_step_scores(phi, U, Q); });
  row("q_step_scores", [&] { return kernels::q_step_scores(phi, U, Q); },
      [&] { return kernels::reference::q_step_scores(phi, U, Q); });
  return 0;
}
