#include "mbqcqp/relaxation.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace mbqcqp {

using conic::ConicProblem;
using conic::Constraint;
using conic::Relation;
using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string_view to_string(RelaxationKind k) {
  switch (k) {
    case RelaxationKind::SDP1: return "SDP1";
    case RelaxationKind::SDP2: return "SDP2";
    case RelaxationKind::SDP3: return "SDP3";
  }
  return "?";
}

MatrixXd embed_hermitian(const HermitianMatrix& H) {
  if (H.hermitian_defect() > kHermitianTol) throw std::invalid_argument("embed_hermitian: matrix is not Hermitian");
  const int n = H.dim();
  const MatrixXd re = H.matrix().real();
  const MatrixXd im = H.matrix().imag();
  MatrixXd E(2 * n, 2 * n);
  E.topLeftCorner(n, n) = re;
  E.topRightCorner(n, n) = -im;
  E.bottomLeftCorner(n, n) = im;
  E.bottomRightCorner(n, n) = re;
  return 0.5 * (E + E.transpose());
}

HermitianMatrix recover_hermitian(const MatrixXd& Y) {
  if (Y.rows() != Y.cols() || Y.rows() % 2 != 0)
    throw std::invalid_argument("recover_hermitian: expected a 2N x 2N matrix");
  const Eigen::Index n = Y.rows() / 2;
  const MatrixXd re = 0.5 * (Y.topLeftCorner(n, n) + Y.bottomRightCorner(n, n));
  const MatrixXd im = 0.5 * (Y.bottomLeftCorner(n, n) - Y.topRightCorner(n, n));
  CMatrix H(n, n);
  H.real() = 0.5 * (re + re.transpose());
  H.imag() = 0.5 * (im - im.transpose());
  return HermitianMatrix(std::move(H));
}

namespace {

// Coefficient of H in the real block so that Tr(coef * Xblock) = Tr(H X).
MatrixXd block_coefficient(const HermitianMatrix& H, Field field) {
  if (field == Field::Real) return H.real();
  return 0.5 * embed_hermitian(H);
}

int block_dim(const Instance& inst) { return inst.field == Field::Real ? inst.N() : 2 * inst.N(); }

MatrixXd trace_coefficient(const Instance& inst) {
  const int n = block_dim(inst);
  return (inst.field == Field::Real ? 1.0 : 0.5) * MatrixXd::Identity(n, n);
}

void require_valid(const Instance& inst, ModelSense sense, const char* who) {
  if (auto rep = validate(inst); !rep.empty()) throw InstanceError(std::string(who) + ": " + describe(rep));
  if (inst.sense != sense)
    throw std::invalid_argument(fmt::format("{}: instance model is {}", who, to_string(inst.sense)));
}

// SDP2 and SDP3 share the layout; only the coverage direction and sense differ.
ConicProblem build_beta_relaxation(const Instance& inst, bool minimize) {
  const int M = inst.M();
  const double eps = inst.epsilon;
  ConicProblem p;
  p.sense = minimize ? conic::Sense::Minimize : conic::Sense::Maximize;
  p.blocks.psd_dims = {block_dim(inst)};
  p.blocks.lp_dim = 2 * M;
  p.objective.psd = {trace_coefficient(inst)};

  for (int i = 0; i < M; ++i) {
    Constraint c;
    c.a.psd = {block_coefficient(inst.matrices[static_cast<std::size_t>(i)], inst.field)};
    c.a.lp = VectorXd::Zero(2 * M);
    if (minimize) {
      // Tr(H_i X) >= beta_i + (1 - beta_i) eps
      c.a.lp(i) = -(1.0 - eps);
      c.relation = Relation::GreaterEqual;
      c.rhs = eps;
    } else {
      // Tr(H_i X) <= beta_i eps + (1 - beta_i)
      c.a.lp(i) = 1.0 - eps;
      c.relation = Relation::LessEqual;
      c.rhs = 1.0;
    }
    p.constraints.push_back(std::move(c));
  }
  Constraint sum;
  sum.a.lp = VectorXd::Zero(2 * M);
  sum.a.lp.head(M).setOnes();
  sum.rhs = inst.Q;
  p.constraints.push_back(std::move(sum));
  for (int i = 0; i < M; ++i) {
    Constraint box;
    box.a.lp = VectorXd::Zero(2 * M);
    box.a.lp(i) = 1.0;
    box.a.lp(M + i) = 1.0;
    box.rhs = 1.0;
    p.constraints.push_back(std::move(box));
  }
  return p;
}

HermitianMatrix block_to_hermitian(const MatrixXd& Y, Field field) {
  if (field == Field::Real) return HermitianMatrix::from_real(0.5 * (Y + Y.transpose()));
  return recover_hermitian(Y);
}

void require_optimal(const conic::ConicSolution& raw, std::string_view which) {
  if (raw.status != conic::Status::Optimal)
    throw SolverError(fmt::format("{} solve ended with status {}", which, conic::to_string(raw.status)), raw.status);
}

}  // namespace

ConicProblem build_sdp2_min(const Instance& inst) {
  require_valid(inst, ModelSense::Minimize, "build_sdp2_min");
  return build_beta_relaxation(inst, true);
}

ConicProblem build_sdp3_max(const Instance& inst) {
  require_valid(inst, ModelSense::Maximize, "build_sdp3_max");
  return build_beta_relaxation(inst, false);
}

ConicProblem build_sdp1_min(const Instance& inst) {
  require_valid(inst, ModelSense::Minimize, "build_sdp1_min");
  const int M = inst.M();
  const int last = M;  // 0-based index of the coupling row/column
  const double eps = inst.epsilon;
  ConicProblem p;
  p.sense = conic::Sense::Minimize;
  p.blocks.psd_dims = {M + 1, block_dim(inst)};
  p.objective.psd = {MatrixXd(), trace_coefficient(inst)};

  for (int i = 0; i <= M; ++i) {
    Constraint c;
    MatrixXd E = MatrixXd::Zero(M + 1, M + 1);
    E(i, i) = 1.0;
    c.a.psd = {E};
    c.rhs = 1.0;
    p.constraints.push_back(std::move(c));
  }
  {
    Constraint c;
    MatrixXd E = MatrixXd::Zero(M + 1, M + 1);
    for (int i = 0; i < M; ++i) E(i, last) = E(last, i) = 0.5;
    c.a.psd = {E};
    c.rhs = 2.0 * inst.Q - M;
    p.constraints.push_back(std::move(c));
  }
  for (int i = 0; i < M; ++i) {
    // Tr(H_i X2) - (1 - eps)/2 X1[i, last] >= (1 + eps)/2
    Constraint c;
    MatrixXd E = MatrixXd::Zero(M + 1, M + 1);
    E(i, last) = E(last, i) = -0.25 * (1.0 - eps);
    c.a.psd = {E, block_coefficient(inst.matrices[static_cast<std::size_t>(i)], inst.field)};
    c.relation = Relation::GreaterEqual;
    c.rhs = 0.5 * (1.0 + eps);
    p.constraints.push_back(std::move(c));
  }
  return p;
}

RelaxationSolution extract_solution(const Instance& inst, const conic::ConicSolution& raw, RelaxationKind which) {
  if (which == RelaxationKind::SDP1) throw std::invalid_argument("extract_solution: use extract_sdp1 for SDP1");
  require_optimal(raw, to_string(which));
  const int M = inst.M();
  if (raw.psd.size() != 1 || raw.lp.size() != 2 * M)
    throw std::invalid_argument("extract_solution: solution layout does not match the relaxation");

  RelaxationSolution out;
  out.which = which;
  out.iterations = raw.iterations;
  out.beta_bar = raw.lp.head(M);
  for (int i = 0; i < M; ++i) {
    double& b = out.beta_bar(i);
    if (b < -1e-6 || b > 1.0 + 1e-6)  // matches the solver accept tolerance
      throw SolverError(fmt::format("relaxed selection beta[{}] = {} outside [0,1]", i + 1, b),
                        conic::Status::NumericalFailure);
    b = std::clamp(b, 0.0, 1.0);
  }
  out.X2 = block_to_hermitian(raw.psd[0], inst.field);
  out.trace_value = out.X2.matrix().trace().real();
  out.value = raw.dual_objective;
  return out;
}

Sdp1Solution extract_sdp1(const Instance& inst, const conic::ConicSolution& raw) {
  require_optimal(raw, "SDP1");
  if (raw.psd.size() != 2 || raw.psd[0].rows() != inst.M() + 1)
    throw std::invalid_argument("extract_sdp1: solution layout does not match the relaxation");
  Sdp1Solution out;
  out.X1 = 0.5 * (raw.psd[0] + raw.psd[0].transpose());
  out.X2 = block_to_hermitian(raw.psd[1], inst.field);
  out.trace_value = out.X2.matrix().trace().real();
  out.value = raw.dual_objective;
  out.iterations = raw.iterations;
  return out;
}

VectorXd map_sdp1_beta(const Sdp1Solution& s) {
  const Eigen::Index M = s.X1.rows() - 1;
  return (0.5 + 0.5 * s.X1.col(M).head(M).array()).matrix();
}

RelaxationSolution solve_relaxation(const Instance& inst, const conic::Settings& settings) {
  const bool minimize = inst.sense == ModelSense::Minimize;
  const ConicProblem p = minimize ? build_sdp2_min(inst) : build_sdp3_max(inst);
  const conic::ConicSolution raw = conic::solve(p, settings);
  RelaxationSolution out = extract_solution(inst, raw, minimize ? RelaxationKind::SDP2 : RelaxationKind::SDP3);
  out.residuals = conic::residuals(p, raw);
  return out;
}

Sdp1Solution solve_sdp1(const Instance& inst, const conic::Settings& settings) {
  return extract_sdp1(inst, conic::solve(build_sdp1_min(inst), settings));
}

}  // namespace mbqcqp
