#pragma once

#include <functional>
#include <vector>

#include "mbqcqp/instance.hpp"

namespace mbqcqp {

enum class Execution { Serial, Parallel };

namespace kernels {

// body(i) for i in [0, n). Parallel runs an OpenMP loop with `workers`
// threads (0 = runtime default). If any body throws, the exception from the
// lowest index is rethrown after the loop, so failures do not depend on the
// schedule.
void parallel_for(int n, Execution exec, int workers, const std::function<void(int)>& body);

// q(i, t) = s_t^H H_i s_t for each column s_t of samples.
Eigen::MatrixXd quadratic_forms(const std::vector<HermitianMatrix>& H, const CMatrix& samples, Execution exec,
                                int workers = 0);

}  // namespace kernels
}  // namespace mbqcqp
