#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mbqcqp/instance.hpp"
#include "mbqcqp/kernels.hpp"
#include "mbqcqp/random.hpp"
#include "mbqcqp/relaxation.hpp"

namespace mbqcqp {

class RoundingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Indices are 0-based throughout the library; reports print them 1-based.
using SupportSet = std::vector<int>;

// The Q largest entries, ties to the lowest index; returned sorted.
SupportSet select_support(const Eigen::VectorXd& beta_bar, int Q);

// L with L L^H = X (eigenvalue based, so rank-deficient X is fine). Throws
// RoundingError if X has an eigenvalue below -1e-8 * (1 + lambda_max).
CMatrix psd_factor(const HermitianMatrix& X);

// xi = L g (Real) or L (g1 + i g2) / sqrt(2) (Complex), g standard normal.
CVector sample_gaussian(const CMatrix& L, Field field, rng::Engine& eng);
CVector sample_gaussian(const HermitianMatrix& X, Field field, rng::Engine& eng);

struct RoundingTrial {
  CVector xi;
  double t = 0.0;
  CVector x2;
  double objective = 0.0;
  bool feasible = false;
  int resamples = 0;
};

struct RoundingOutcome {
  SupportSet support;
  Eigen::VectorXi x1;
  RoundingTrial best;
  int best_index = -1;
  std::vector<double> objectives;  // one per trial
  double v_ubqp = 0.0;
  int trials_attempted = 0;
  int trials_resampled = 0;  // total number of redraws
  bool unbounded = false;    // max model: some direction needs no scaling cap
  int rank_before = 0;       // numerical rank of the covariance before/after reduction
  int rank_after = 0;
  std::vector<RoundingTrial> all_trials;  // filled when RoundingOptions::keep_trials
};

struct RoundingOptions {
  int trials = 1000;
  std::uint64_t seed = 0;
  std::uint64_t realization = 0;  // part of the per-trial stream key
  bool rank_reduce = true;
  Execution exec = Execution::Parallel;
  int workers = 0;
  bool keep_trials = false;
};

RoundingOutcome round_min(const Instance& inst, const RelaxationSolution& relax, const RoundingOptions& opt);
RoundingOutcome round_max(const Instance& inst, const RelaxationSolution& relax, const RoundingOptions& opt);
RoundingOutcome round_solution(const Instance& inst, const RelaxationSolution& relax, const RoundingOptions& opt);

// Scale factor for one sample. Min model: t = max(sqrt(max_{i in I} 1/q_i),
// sqrt(max_{i not in I} eps/q_i)). Max model: t = min(sqrt(min_{i in I} eps/q_i),
// sqrt(min_{i not in I} 1/q_i)) with c/0 = +inf. in_support has length M.
double scale_min(const Eigen::VectorXd& q, const std::vector<bool>& in_support, double epsilon);
double scale_max(const Eigen::VectorXd& q, const std::vector<bool>& in_support, double epsilon,
                 const Eigen::VectorXd& vanish_threshold);

struct FeasibilityReport {
  std::vector<double> slack;  // signed; >= 0 is satisfied
  bool cardinality_ok = false;
  bool binary_ok = false;
  double worst_slack = 0.0;
  bool feasible = false;
};

FeasibilityReport check_feasibility(const Instance& inst, const Eigen::VectorXi& x1, const CVector& x2,
                                    double tol = 1e-8);

struct RankReduction {
  CMatrix X;
  int rank_before = 0;
  int rank_after = 0;
  int steps = 0;
  bool stalled = false;
};

int numerical_rank(const HermitianMatrix& X, double rel_tol = 1e-9);

// Lowers the rank of PSD X while keeping Tr(A_k X) for every k, until
// r(r+1)/2 <= m (Real) or r^2 <= m (Complex), m = A.size().
RankReduction rank_reduce(const std::vector<HermitianMatrix>& A, const HermitianMatrix& X, Field field,
                          double rel_tol = 1e-9);

}  // namespace mbqcqp
