#pragma once

#include <cmath>
#include <random>

#include "mbqcqp/conic.hpp"
#include "mbqcqp/instance.hpp"

namespace fixtures {

using namespace mbqcqp;

inline HermitianMatrix diag2(double a, double b) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return HermitianMatrix::from_real(m);
}

inline Instance make_instance(std::vector<HermitianMatrix> H, Field f, ModelSense s, int Q, double eps) {
  Instance inst;
  inst.field = f;
  inst.sense = s;
  inst.matrices = std::move(H);
  inst.Q = Q;
  inst.epsilon = eps;
  return inst;
}

// Max model, M = 2, H_1 = H_2 = I, epsilon = 0, Q = 1.
inline Instance zero_ratio_example() {
  return make_instance({diag2(1, 1), diag2(1, 1)}, Field::Real, ModelSense::Maximize, 1, 0.0);
}

inline const char* zero_ratio_example_text() {
  return R"({"field": "real", "model": "max", "epsilon": 0, "Q": 1,
             "matrices": [[[1, 0], [0, 1]], [[1, 0], [0, 1]]]})";
}

inline Instance diag_pair(ModelSense s, int Q, double eps) {
  return make_instance({diag2(1, 0), diag2(0, 1)}, Field::Real, s, Q, eps);
}

inline CMatrix random_hermitian(int n, bool complex, std::mt19937_64& eng) {
  std::normal_distribution<double> g;
  CMatrix A(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) A(r, c) = Complex(g(eng), complex ? g(eng) : 0.0);
  return 0.5 * (A + A.adjoint());
}

// G G^H with G n x rank.
inline CMatrix random_psd(int n, int rank, bool complex, std::mt19937_64& eng) {
  std::normal_distribution<double> g;
  CMatrix G(n, rank);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < rank; ++c) G(r, c) = Complex(g(eng), complex ? g(eng) : 0.0);
  return G * G.adjoint();
}

// Two-variable general model with a coordinate-binary constraint:
//   min ||x||^2 s.t. x^T D_i x >= 1 (i = 1, 2), x[1]^2 = 1.
struct GeneralExample {
  Eigen::Matrix2d D1, D2;
};

inline GeneralExample general_example(double e) {
  GeneralExample g;
  const double a = std::sqrt(e * (1 - e));
  const double b = std::sqrt(e / 2);
  g.D1 << 1 - e, a, a, e;
  g.D2 << 1, -b, -b, e;
  return g;
}

inline double general_closed_form(double e) {
  const double x2 = std::min(std::sqrt(2.0 / e), (std::sqrt(1.0 - e) + 1.0) / std::sqrt(e));
  return 1.0 + x2 * x2;
}

// Independent check: fix x[1] = 1 (x -> -x is a symmetry), scan x[2] and
// refine each feasibility boundary by bisection.
inline double general_line_search(double e, double range = 100.0, int steps = 400000) {
  const GeneralExample g = general_example(e);
  auto feasible = [&](double t) {
    Eigen::Vector2d x(1.0, t);
    return x.dot(g.D1 * x) >= 1.0 - 1e-12 && x.dot(g.D2 * x) >= 1.0 - 1e-12;
  };
  double best = std::numeric_limits<double>::infinity();
  const double h = 2.0 * range / steps;
  for (int k = 0; k <= steps; ++k) {
    const double t = -range + k * h;
    if (!feasible(t) || 1.0 + t * t >= best) continue;
    double in = t, out = t - std::copysign(h, t);
    if (t == 0.0 || feasible(out)) {
      best = 1.0 + t * t;
      continue;
    }
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (in + out);
      (feasible(mid) ? in : out) = mid;
    }
    best = std::min(best, 1.0 + in * in);
  }
  return best;
}

inline conic::ConicProblem general_sdp(double e) {
  const GeneralExample g = general_example(e);
  conic::ConicProblem p;
  p.blocks.psd_dims = {2};
  p.objective.psd = {Eigen::MatrixXd::Identity(2, 2)};
  for (const Eigen::Matrix2d& D : {g.D1, g.D2}) {
    conic::Constraint c;
    c.a.psd = {Eigen::MatrixXd(D)};
    c.relation = conic::Relation::GreaterEqual;
    c.rhs = 1.0;
    p.constraints.push_back(c);
  }
  conic::Constraint unit;
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(2, 2);
  E(0, 0) = 1.0;
  unit.a.psd = {E};
  unit.rhs = 1.0;
  p.constraints.push_back(unit);
  return p;
}

}  // namespace fixtures
