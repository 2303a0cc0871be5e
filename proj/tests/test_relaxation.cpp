#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "mbqcqp/relaxation.hpp"

using namespace mbqcqp;
using fixtures::diag2;
using Eigen::MatrixXd;

namespace {

// Plain continuous relaxation: min (or max) Tr X s.t. Tr(H_i X) >= 1 (or <= 1).
double continuous_value(const Instance& inst) {
  conic::ConicProblem p;
  const bool minimize = inst.sense == ModelSense::Minimize;
  p.sense = minimize ? conic::Sense::Minimize : conic::Sense::Maximize;
  const int n = inst.field == Field::Real ? inst.N() : 2 * inst.N();
  const double s = inst.field == Field::Real ? 1.0 : 0.5;
  p.blocks.psd_dims = {n};
  p.objective.psd = {s * MatrixXd::Identity(n, n)};
  for (const auto& H : inst.matrices) {
    conic::Constraint c;
    c.a.psd = {inst.field == Field::Real ? H.real() : MatrixXd(0.5 * embed_hermitian(H))};
    c.relation = minimize ? conic::Relation::GreaterEqual : conic::Relation::LessEqual;
    c.rhs = 1.0;
    p.constraints.push_back(c);
  }
  const auto sol = conic::solve(p);
  REQUIRE(sol.status == conic::Status::Optimal);
  return sol.primal_objective;
}

void check_invariants(const Instance& inst, const RelaxationSolution& s) {
  CHECK(std::abs(s.beta_bar.sum() - inst.Q) <= 1e-6);
  CHECK(s.beta_bar.minCoeff() >= 0.0);
  CHECK(s.beta_bar.maxCoeff() <= 1.0 + 1e-8);
  const Eigen::VectorXd ev = s.X2.eigenvalues();
  CHECK(ev.minCoeff() >= -1e-8 * (1.0 + ev.maxCoeff()));
  for (int i = 0; i < inst.M(); ++i) {
    const double tr = (inst.matrices[i].matrix() * s.X2.matrix()).trace().real();
    const double b = s.beta_bar(i);
    if (inst.sense == ModelSense::Minimize) CHECK(tr >= b + (1 - b) * inst.epsilon - 1e-7);
    else CHECK(tr <= b * inst.epsilon + (1 - b) + 1e-7);
  }
}

}  // namespace

TEST_SUITE("relaxation") {
  TEST_CASE("SDP2 constraint count for M = 2") {
    const auto p = build_sdp2_min(fixtures::diag_pair(ModelSense::Minimize, 1, 0.0));
    CHECK(p.constraints.size() == 5);
    CHECK(p.blocks.psd_dims == std::vector<int>{2});
    CHECK(p.blocks.lp_dim == 4);
  }

  TEST_CASE("builders reject the wrong model or invalid data") {
    CHECK_THROWS_AS(build_sdp2_min(fixtures::zero_ratio_example()), std::invalid_argument);
    CHECK_THROWS_AS(build_sdp3_max(fixtures::diag_pair(ModelSense::Minimize, 1, 0.0)), std::invalid_argument);
    auto bad = fixtures::diag_pair(ModelSense::Minimize, 3, 0.0);
    CHECK_THROWS_AS(build_sdp1_min(bad), InstanceError);
  }

  TEST_CASE("separable SDP2 example has value 2") {
    const auto inst = fixtures::diag_pair(ModelSense::Minimize, 2, 0.0);
    const auto s = solve_relaxation(inst);
    CHECK(s.which == RelaxationKind::SDP2);
    CHECK(s.value == doctest::Approx(2.0).epsilon(1e-7));
    CHECK((s.X2.real() - MatrixXd::Identity(2, 2)).norm() <= 1e-6);
    check_invariants(inst, s);
  }

  TEST_CASE("SDP2 at epsilon = 1 equals the continuous multicast relaxation") {
    for (Field f : {Field::Real, Field::Complex}) {
      const Instance inst = generate_gaussian_instance(5, 3, f, 11, ModelSense::Minimize, 2, 1.0);
      CHECK(solve_relaxation(inst).value == doctest::Approx(continuous_value(inst)).epsilon(1e-6));
    }
  }

  TEST_CASE("SDP1 has M + 1 unit-diagonal equalities") {
    const Instance inst = generate_gaussian_instance(4, 3, Field::Real, 5, ModelSense::Minimize, 2, 0.3);
    const auto p = build_sdp1_min(inst);
    int diag = 0;
    for (const auto& c : p.constraints) {
      if (c.relation != conic::Relation::Equal || c.a.psd.empty() || c.a.psd[0].size() == 0) continue;
      const MatrixXd& E = c.a.psd[0];
      if (E.cwiseAbs().sum() == 1.0 && E.diagonal().sum() == 1.0) ++diag;
    }
    CHECK(diag == inst.M() + 1);
    CHECK(p.blocks.psd_dims == std::vector<int>{5, 3});
  }

  TEST_CASE("SDP1 with Q = M pins the coupling column to 1") {
    const Instance inst = generate_gaussian_instance(4, 3, Field::Real, 8, ModelSense::Minimize, 4, 0.3);
    const auto s = solve_sdp1(inst);
    for (int i = 0; i < 4; ++i) CHECK(s.X1(i, 4) == doctest::Approx(1.0).epsilon(1e-6));
    for (int i = 0; i < 4; ++i)
      CHECK((inst.matrices[i].matrix() * s.X2.matrix()).trace().real() >= 1.0 - 1e-6);
  }

  TEST_CASE("SDP1 and SDP2 agree on the seeded example") {
    const Instance inst = generate_gaussian_instance(4, 3, Field::Real, 5, ModelSense::Minimize, 2, 0.3);
    const auto s1 = solve_sdp1(inst);
    const auto s2 = solve_relaxation(inst);
    CHECK(std::abs(s1.value - s2.value) <= 1e-5 * std::max(1.0, s2.value));
    const Eigen::VectorXd beta = map_sdp1_beta(s1);
    CHECK(std::abs(beta.sum() - inst.Q) <= 1e-6);
    for (int i = 0; i < inst.M(); ++i) {
      CHECK(beta(i) >= -1e-6);
      CHECK(beta(i) <= 1 + 1e-6);
      const double tr = (inst.matrices[i].matrix() * s1.X2.matrix()).trace().real();
      CHECK(tr >= beta(i) + (1 - beta(i)) * inst.epsilon - 1e-6);
    }
  }

  TEST_CASE("SDP1 invariants hold") {
    const Instance inst = generate_gaussian_instance(5, 3, Field::Complex, 21, ModelSense::Minimize, 2, 0.7);
    const auto s = solve_sdp1(inst);
    for (int i = 0; i <= inst.M(); ++i) CHECK(s.X1(i, i) == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(std::abs(s.X1.col(inst.M()).head(inst.M()).sum() - (2.0 * inst.Q - inst.M())) <= 1e-6);
    CHECK(Eigen::SelfAdjointEigenSolver<MatrixXd>(s.X1).eigenvalues()(0) >= -1e-8);
  }

  TEST_CASE("zero-ratio example: SDP3 value 1/2 at beta = (1/2, 1/2)") {
    const Instance inst = fixtures::zero_ratio_example();
    const auto s = solve_relaxation(inst);
    CHECK(s.which == RelaxationKind::SDP3);
    CHECK(s.value == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(std::abs(s.beta_bar(0) - 0.5) <= 1e-6);
    CHECK(std::abs(s.beta_bar(1) - 0.5) <= 1e-6);
    check_invariants(inst, s);
  }

  TEST_CASE("SDP3 at epsilon = 1 equals the continuous max relaxation") {
    for (int Q : {1, 3}) {
      Instance inst = generate_gaussian_instance(4, 3, Field::Real, 4, ModelSense::Maximize, Q, 1.0);
      for (auto& H : inst.matrices) H = HermitianMatrix(CMatrix(H.matrix() + 0.2 * CMatrix::Identity(3, 3)));
      CHECK(solve_relaxation(inst).value == doctest::Approx(continuous_value(inst)).epsilon(1e-6));
    }
  }

  TEST_CASE("SDP3 on the separable pair has value 1.5") {
    // Every beta on the simplex is optimal here; only the value is determined.
    const Instance inst = fixtures::diag_pair(ModelSense::Maximize, 1, 0.5);
    const auto s = solve_relaxation(inst);
    CHECK(s.value == doctest::Approx(1.5).epsilon(1e-6));
    check_invariants(inst, s);
  }

  TEST_CASE("embedding of real data is block diagonal") {
    std::mt19937_64 eng(1);
    const HermitianMatrix H(fixtures::random_hermitian(3, false, eng));
    const MatrixXd E = embed_hermitian(H);
    CHECK((E.topLeftCorner(3, 3) - H.real()).norm() == 0.0);
    CHECK((E.bottomRightCorner(3, 3) - H.real()).norm() == 0.0);
    CHECK(E.topRightCorner(3, 3).norm() == 0.0);
    const HermitianMatrix G(fixtures::random_hermitian(3, false, eng));
    const double lhs = (H.matrix() * G.matrix()).trace().real();
    CHECK(lhs == doctest::Approx(0.5 * (E * embed_hermitian(G)).trace()).epsilon(1e-14));
  }

  TEST_CASE("embedding doubles eigenvalue multiplicities") {
    CMatrix h(2, 2);
    h << 1, Complex(0, 1), Complex(0, -1), 1;
    const HermitianMatrix H(h);
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<MatrixXd>(embed_hermitian(H)).eigenvalues();
    CHECK(ev(0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::abs(ev(1)) <= 1e-12);
    CHECK(ev(2) == doctest::Approx(2.0));
    CHECK(ev(3) == doctest::Approx(2.0));
    const Eigen::VectorXd eo = H.eigenvalues();
    CHECK(std::abs(eo(0)) <= 1e-12);
    CHECK(eo(1) == doctest::Approx(2.0));
  }

  TEST_CASE("recover inverts embed and the trace identity holds") {
    std::mt19937_64 eng(2);
    for (int k = 0; k < 100; ++k) {
      const HermitianMatrix A(fixtures::random_hermitian(4, true, eng));
      const HermitianMatrix B(fixtures::random_hermitian(4, true, eng));
      CHECK((recover_hermitian(embed_hermitian(A)).matrix() - A.matrix()).cwiseAbs().maxCoeff() <= 1e-14);
      const double lhs = (A.matrix() * B.matrix()).trace().real();
      const double rhs = 0.5 * (embed_hermitian(A) * embed_hermitian(B)).trace();
      CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(lhs)));
    }
  }

  TEST_CASE("embed rejects non-Hermitian input") {
    CMatrix h(2, 2);
    h << 1, 2, 3, 1;
    CHECK_THROWS_AS(embed_hermitian(HermitianMatrix(h)), std::invalid_argument);
  }

  TEST_CASE("real instance: extracted X2 is the solver block") {
    const Instance inst = generate_gaussian_instance(4, 3, Field::Real, 6, ModelSense::Minimize, 2, 0.3);
    const auto p = build_sdp2_min(inst);
    const auto raw = conic::solve(p);
    const auto s = extract_solution(inst, raw, RelaxationKind::SDP2);
    CHECK((s.X2.real() - raw.psd[0]).norm() <= 1e-15 * (1.0 + raw.psd[0].norm()));
    CHECK(s.X2.is_real());
  }

  TEST_CASE("complex instance with real data yields a real X2") {
    Instance inst = generate_gaussian_instance(4, 3, Field::Real, 6, ModelSense::Minimize, 2, 0.3);
    inst.field = Field::Complex;
    const auto s = solve_relaxation(inst);
    CHECK(s.X2.matrix().imag().cwiseAbs().maxCoeff() <= 1e-8);
    Instance real = inst;
    real.field = Field::Real;
    CHECK(s.value == doctest::Approx(solve_relaxation(real).value).epsilon(1e-6));
  }

  TEST_CASE("extract propagates a non-optimal status") {
    const Instance inst = fixtures::diag_pair(ModelSense::Minimize, 1, 0.0);
    conic::ConicSolution raw;
    raw.status = conic::Status::Infeasible;
    try {
      extract_solution(inst, raw, RelaxationKind::SDP2);
      FAIL("expected SolverError");
    } catch (const SolverError& e) {
      CHECK(e.status() == conic::Status::Infeasible);
    }
  }

  TEST_CASE("unbounded SDP3 surfaces as SolverError") {
    const Instance inst = fixtures::make_instance({diag2(1, 0), diag2(1, 0)}, Field::Real, ModelSense::Maximize, 1, 0.5);
    try {
      solve_relaxation(inst);
      FAIL("expected SolverError");
    } catch (const SolverError& e) {
      CHECK(e.status() == conic::Status::Unbounded);
    }
  }

  TEST_CASE("map_sdp1_beta examples") {
    Sdp1Solution s;
    s.X1 = MatrixXd::Identity(4, 4);
    s.X1(0, 3) = s.X1(3, 0) = 1.0;
    s.X1(1, 3) = s.X1(3, 1) = -1.0;
    s.X1(2, 3) = s.X1(3, 2) = 0.0;
    const Eigen::VectorXd b = map_sdp1_beta(s);
    CHECK(b(0) == 1.0);
    CHECK(b(1) == 0.0);
    CHECK(b(2) == 0.5);
  }

  TEST_CASE("increasing epsilon never lowers the SDP2 value") {
    for (std::uint64_t seed : {31u, 32u, 33u}) {
      double prev = 0.0;
      for (double eps : {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}) {
        const Instance inst = generate_gaussian_instance(5, 3, Field::Real, seed, ModelSense::Minimize, 2, eps);
        const double v = solve_relaxation(inst).value;
        CHECK(v >= prev - 1e-7 * (1.0 + prev));
        prev = v;
      }
    }
  }

  TEST_CASE("random instances satisfy the relaxation invariants") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      const Field f = seed % 2 ? Field::Complex : Field::Real;
      const ModelSense s = seed % 3 ? ModelSense::Minimize : ModelSense::Maximize;
      const Instance inst = generate_gaussian_instance(6, 4, f, 100 + seed, s, 3, 0.4);
      check_invariants(inst, solve_relaxation(inst));
    }
  }

  TEST_CASE("reported value is the dual bound and matches Tr X2") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
      const Field f = seed % 2 ? Field::Complex : Field::Real;
      const ModelSense s = seed < 4 ? ModelSense::Minimize : ModelSense::Maximize;
      const Instance inst = generate_gaussian_instance(6, 4, f, 600 + seed, s, 3, 0.3);
      const auto r = solve_relaxation(inst);
      CHECK(std::abs(r.value - r.trace_value) <= 1e-7 * (1.0 + r.trace_value));
      CHECK(r.trace_value == doctest::Approx(r.X2.matrix().trace().real()));
      // The dual bound sits on the safe side of the primal iterate.
      if (s == ModelSense::Minimize) CHECK(r.value <= r.trace_value * (1.0 + 1e-12));
      else CHECK(r.value >= r.trace_value * (1.0 - 1e-12));
    }
  }
}
