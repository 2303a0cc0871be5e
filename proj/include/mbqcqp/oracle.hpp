#pragma once

#include <stdexcept>
#include <string_view>
#include <vector>

#include "mbqcqp/instance.hpp"
#include "mbqcqp/kernels.hpp"

namespace mbqcqp {

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OracleStatus { ExactIsh, Infeasible, Unbounded };
std::string_view to_string(OracleStatus s);

constexpr long long kMaxSupports = 1000000;
constexpr int kDefaultRealGrid = 8192;
constexpr int kDefaultComplexGrid = 256;

// All Q-subsets of {0..M-1} in lexicographic order. Throws OracleError when
// C(M, Q) exceeds kMaxSupports.
std::vector<std::vector<int>> enumerate_supports(int M, int Q);
long long binomial(int n, int k);

// Direction grid for N = 2. Real: theta_k = k pi / n, k < n, u = (cos, sin).
// Complex: u = (cos a, sin a e^{i phi}), a_j = j (pi/2) / n for j <= n and
// phi_k = k pi / n for k < 2n. Doubling n refines the grid (old points kept).
struct ContinuousResult {
  OracleStatus status = OracleStatus::ExactIsh;
  double value = 0.0;
  CVector w;
  double error_bound = 0.0;
};

// min ||w||^2 s.t. w^H H_i w >= target_i
ContinuousResult exact_continuous_min(const std::vector<HermitianMatrix>& H, const Eigen::VectorXd& targets,
                                      Field field, int grid, Execution exec = Execution::Parallel);
// max ||w||^2 s.t. w^H H_i w <= cap_i
ContinuousResult exact_continuous_max(const std::vector<HermitianMatrix>& H, const Eigen::VectorXd& caps,
                                      Field field, int grid, Execution exec = Execution::Parallel);

struct OracleResult {
  OracleStatus status = OracleStatus::ExactIsh;
  double value = 0.0;
  std::vector<int> support;
  Eigen::VectorXi x1;
  CVector w;
  int grid = 0;
  double error_bound = 0.0;
};

OracleResult oracle_value(const Instance& inst, int grid, Execution exec = Execution::Parallel);
int default_grid(Field field);

}  // namespace mbqcqp
