#include "mbqcqp/kernels.hpp"

#include <exception>
#include <limits>

#include <omp.h>

namespace mbqcqp::kernels {

void parallel_for(int n, Execution exec, int workers, const std::function<void(int)>& body) {
  if (n <= 0) return;
  if (exec == Execution::Serial || workers == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr first;
  int first_index = std::numeric_limits<int>::max();
  const int threads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (int i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(mbqcqp_parallel_for_error)
      if (i < first_index) {
        first_index = i;
        first = std::current_exception();
      }
    }
  }
  if (first) std::rethrow_exception(first);
}

Eigen::MatrixXd quadratic_forms(const std::vector<HermitianMatrix>& H, const CMatrix& samples, Execution exec,
                                int workers) {
  const int M = static_cast<int>(H.size());
  const int T = static_cast<int>(samples.cols());
  Eigen::MatrixXd q(M, T);
  parallel_for(T, exec, workers, [&](int t) {
    const auto s = samples.col(t);
    for (int i = 0; i < M; ++i) q(i, t) = H[static_cast<std::size_t>(i)].quad_form(s);
  });
  return q;
}

}  // namespace mbqcqp::kernels
