#pragma once

#include <iosfwd>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace mbqcqp::conic {

// Dense primal-dual interior-point solver for cone programs over a product of
// real PSD blocks and one nonnegative orthant block.

enum class Relation { Equal, GreaterEqual, LessEqual };
enum class Sense { Minimize, Maximize };
enum class Status { Optimal, Infeasible, Unbounded, MaxIterations, NumericalFailure };

std::string_view to_string(Status s);

struct BlockStructure {
  std::vector<int> psd_dims;
  int lp_dim = 0;
};

// <F, (X, x)> = sum_b Tr(F.psd[b] X_b) + F.lp . x. A block left empty
// (zero-size matrix or vector) is the zero functional on that block.
struct LinearFunctional {
  std::vector<Eigen::MatrixXd> psd;
  Eigen::VectorXd lp;
};

struct Constraint {
  LinearFunctional a;
  Relation relation = Relation::Equal;
  double rhs = 0.0;
};

struct ConicProblem {
  Sense sense = Sense::Minimize;
  BlockStructure blocks;
  LinearFunctional objective;
  std::vector<Constraint> constraints;

  // Functional of the right shape with every block zero.
  LinearFunctional zero_functional() const;
  // Throws std::invalid_argument when shapes or symmetry do not match.
  void check() const;
};

struct IterationRecord {
  int iteration = 0;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double primal_infeasibility = 0.0;  // ||b - A(X)|| / (1 + ||b||)
  double dual_infeasibility = 0.0;    // ||C - Z - A^T y|| / (1 + ||C||)
  double complementarity = 0.0;       // <X, Z>, always >= 0 on the interior path
  double relative_gap = 0.0;
  double step_primal = 0.0;
  double step_dual = 0.0;
};

struct ConicSolution {
  Status status = Status::NumericalFailure;
  std::vector<Eigen::MatrixXd> psd;  // primal block values
  Eigen::VectorXd lp;
  // One multiplier per constraint, sign convention of the Lagrangian
  // <C,X> - sum_k y_k (a_k(X) - b_k); feasible duals satisfy C - A^T y >= 0
  // (minimize) or <= 0 (maximize).
  Eigen::VectorXd y;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double relative_gap = 0.0;
  int iterations = 0;
  // Residual of the improving ray (Unbounded) or Farkas multiplier (Infeasible).
  double certificate_residual = 0.0;
  std::vector<IterationRecord> trace;
};

struct Settings {
  double tolerance = 1e-9;           // target for gap and infeasibilities
  double accept_tolerance = 1e-7;    // still reported Optimal on stall
  int max_iterations = 100;
  double step_fraction = 0.98;
  double regularization = 1e-10;
  double certificate_tolerance = 1e-6;
  std::ostream* trace_csv = nullptr;  // per-iteration CSV lines when set
};

ConicSolution solve(const ConicProblem& problem, const Settings& settings = {});

struct ResidualReport {
  std::vector<double> primal_violation;      // per constraint, absolute
  std::vector<double> primal_violation_rel;  // divided by 1 + |b_k|
  double primal_infeasibility = 0.0;         // max absolute violation
  double primal_infeasibility_rel = 0.0;
  double dual_infeasibility = 0.0;           // worst cone / sign violation of the dual slack
  double dual_infeasibility_rel = 0.0;
  double complementarity = 0.0;
  double complementarity_rel = 0.0;
  double gap = 0.0;  // |primal - dual objective|
  double gap_rel = 0.0;
  double primal_objective = 0.0;
  double dual_objective = 0.0;

  double worst_relative() const;
};

ResidualReport residuals(const ConicProblem& problem, const ConicSolution& solution);

double evaluate(const LinearFunctional& f, const std::vector<Eigen::MatrixXd>& psd,
                const Eigen::VectorXd& lp);

}  // namespace mbqcqp::conic
