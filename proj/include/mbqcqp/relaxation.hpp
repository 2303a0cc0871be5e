#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "mbqcqp/conic.hpp"
#include "mbqcqp/instance.hpp"

namespace mbqcqp {

enum class RelaxationKind { SDP1, SDP2, SDP3 };
std::string_view to_string(RelaxationKind k);

// Raised when the cone solver does not return an optimal point; carries the
// solver status so callers can tell infeasible/unbounded from breakdowns.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, conic::Status status) : std::runtime_error(what), status_(status) {}
  conic::Status status() const { return status_; }

 private:
  conic::Status status_;
};

struct RelaxationSolution {
  Eigen::VectorXd beta_bar;  // in [0,1], sums to Q
  HermitianMatrix X2;        // N x N, in the instance field
  // Relaxation value from the dual objective: a lower bound on the SDP
  // optimum for min and an upper bound for max, so the sandwich with rounded
  // points holds without interior-point slack. Agrees with trace_value up to
  // the solver gap.
  double value = 0.0;
  double trace_value = 0.0;  // Tr X2 of the returned iterate
  RelaxationKind which = RelaxationKind::SDP2;
  int iterations = 0;
  conic::ResidualReport residuals;
};

struct Sdp1Solution {
  Eigen::MatrixXd X1;  // (M+1) x (M+1), last row/column couples to the selection
  HermitianMatrix X2;
  double value = 0.0;        // dual objective, as for RelaxationSolution
  double trace_value = 0.0;  // Tr X2
  int iterations = 0;
};

// Real symmetric image [[Re H, -Im H], [Im H, Re H]] of a Hermitian matrix.
Eigen::MatrixXd embed_hermitian(const HermitianMatrix& H);
// Projection of a 2N x 2N real symmetric matrix back to N x N Hermitian.
HermitianMatrix recover_hermitian(const Eigen::MatrixXd& Y);

// Block layouts.
//   SDP2 / SDP3: psd {X2 (N, or 2N embedded)}, lp {beta_1..beta_M, u_1..u_M}
//     with beta_i + u_i = 1.
//   SDP1: psd {X1 (M+1), X2}, no lp block.
conic::ConicProblem build_sdp2_min(const Instance& inst);
conic::ConicProblem build_sdp1_min(const Instance& inst);
conic::ConicProblem build_sdp3_max(const Instance& inst);

// which must be SDP2 or SDP3; throws SolverError unless raw is Optimal.
RelaxationSolution extract_solution(const Instance& inst, const conic::ConicSolution& raw, RelaxationKind which);
Sdp1Solution extract_sdp1(const Instance& inst, const conic::ConicSolution& raw);

// beta_i = 1/2 + X1[i, M+1] / 2
Eigen::VectorXd map_sdp1_beta(const Sdp1Solution& s);

// SDP2 for Minimize instances, SDP3 for Maximize.
RelaxationSolution solve_relaxation(const Instance& inst, const conic::Settings& settings = {});
Sdp1Solution solve_sdp1(const Instance& inst, const conic::Settings& settings = {});

}  // namespace mbqcqp
