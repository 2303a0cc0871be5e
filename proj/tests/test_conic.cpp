#include <doctest.h>

#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "mbqcqp/conic.hpp"

using namespace mbqcqp::conic;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

ConicProblem single(const MatrixXd& H, Sense sense) {
  ConicProblem p;
  p.sense = sense;
  p.blocks.psd_dims = {static_cast<int>(H.rows())};
  p.objective.psd = {MatrixXd::Identity(H.rows(), H.cols())};
  Constraint c;
  c.a.psd = {H};
  c.relation = sense == Sense::Minimize ? Relation::GreaterEqual : Relation::LessEqual;
  c.rhs = 1.0;
  p.constraints.push_back(c);
  return p;
}

MatrixXd diag(double a, double b) {
  MatrixXd m = MatrixXd::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

double min_eig(const MatrixXd& m) { return Eigen::SelfAdjointEigenSolver<MatrixXd>(m).eigenvalues()(0); }
double max_eig(const MatrixXd& m) { return Eigen::SelfAdjointEigenSolver<MatrixXd>(m).eigenvalues().maxCoeff(); }

}  // namespace

TEST_SUITE("conic") {
  TEST_CASE("min trace with one coverage constraint gives 1/lambda_max") {
    const auto sol = solve(single(diag(2, 1), Sense::Minimize));
    REQUIRE(sol.status == Status::Optimal);
    CHECK(sol.primal_objective == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(sol.dual_objective == doctest::Approx(0.5).epsilon(1e-8));
  }

  TEST_CASE("max trace with one cap gives 1/lambda_min") {
    const auto sol = solve(single(diag(2, 1), Sense::Maximize));
    REQUIRE(sol.status == Status::Optimal);
    CHECK(sol.primal_objective == doctest::Approx(1.0).epsilon(1e-8));
  }

  TEST_CASE("max trace along a null direction is unbounded") {
    const auto sol = solve(single(diag(1, 0), Sense::Maximize));
    CHECK(sol.status == Status::Unbounded);
    CHECK(sol.certificate_residual <= 1e-6);
  }

  TEST_CASE("an empty feasible set is reported infeasible") {
    ConicProblem p = single(diag(1, 1), Sense::Minimize);
    p.constraints[0].relation = Relation::LessEqual;
    p.constraints[0].rhs = -1.0;
    const auto sol = solve(p);
    CHECK(sol.status == Status::Infeasible);
    CHECK(sol.certificate_residual <= 1e-6);
  }

  TEST_CASE("random single-constraint problems match eigenvalue oracles") {
    std::mt19937_64 eng(123);
    for (int k = 0; k < 20; ++k) {
      const int n = 2 + k % 5;
      const MatrixXd H = fixtures::random_psd(n, n, false, eng).real() + 0.1 * MatrixXd::Identity(n, n);
      const auto lo = solve(single(H, Sense::Minimize));
      const auto hi = solve(single(H, Sense::Maximize));
      REQUIRE(lo.status == Status::Optimal);
      REQUIRE(hi.status == Status::Optimal);
      CHECK(lo.primal_objective == doctest::Approx(1.0 / max_eig(H)).epsilon(1e-6));
      CHECK(hi.primal_objective == doctest::Approx(1.0 / min_eig(H)).epsilon(1e-6));
    }
  }

  TEST_CASE("mixed blocks with equality and nonnegative variables") {
    // min Tr X + x1 + 2 x2 s.t. X11 + x1 = 1, X22 - x2 >= 2: optimum X = diag(0, 2), x = (1, 0) -> 3.
    ConicProblem p;
    p.blocks.psd_dims = {2};
    p.blocks.lp_dim = 2;
    p.objective.psd = {MatrixXd::Identity(2, 2)};
    p.objective.lp = VectorXd(2);
    p.objective.lp << 1.0, 2.0;
    Constraint a;
    a.a.psd = {diag(1, 0)};
    a.a.lp = VectorXd(2);
    a.a.lp << 1.0, 0.0;
    a.rhs = 1.0;
    Constraint b;
    b.a.psd = {diag(0, 1)};
    b.a.lp = VectorXd(2);
    b.a.lp << 0.0, -1.0;
    b.relation = Relation::GreaterEqual;
    b.rhs = 2.0;
    p.constraints = {a, b};
    const auto sol = solve(p);
    REQUIRE(sol.status == Status::Optimal);
    CHECK(sol.primal_objective == doctest::Approx(3.0).epsilon(1e-7));
    CHECK(residuals(p, sol).worst_relative() <= 1e-7);
  }

  TEST_CASE("optimal solutions satisfy the residual and PSD invariants") {
    std::mt19937_64 eng(5);
    for (int k = 0; k < 10; ++k) {
      ConicProblem p;
      p.sense = k % 2 ? Sense::Maximize : Sense::Minimize;
      p.blocks.psd_dims = {3, 2};
      p.objective.psd = {MatrixXd::Identity(3, 3), MatrixXd::Identity(2, 2)};
      for (int c = 0; c < 3; ++c) {
        Constraint con;
        con.a.psd = {fixtures::random_psd(3, 3, false, eng).real() + 0.1 * MatrixXd::Identity(3, 3),
                     fixtures::random_psd(2, 2, false, eng).real() + 0.1 * MatrixXd::Identity(2, 2)};
        con.relation = p.sense == Sense::Minimize ? Relation::GreaterEqual : Relation::LessEqual;
        con.rhs = 1.0 + c;
        p.constraints.push_back(con);
      }
      const auto sol = solve(p);
      REQUIRE(sol.status == Status::Optimal);
      const auto r = residuals(p, sol);
      CHECK(r.worst_relative() <= 1e-7);
      for (const auto& X : sol.psd) CHECK(min_eig(X) >= -1e-8 * (1.0 + max_eig(X)));
      CHECK(sol.relative_gap <= 1e-7);
    }
  }

  TEST_CASE("weak duality holds on every primal-dual feasible iterate") {
    // From an infeasible start the objectives are only comparable once the
    // residuals vanish: pobj - dobj = <X,Z> + <Rd,X> - y.Rp.
    const auto sol = solve(single(diag(3, 1), Sense::Minimize));
    int checked = 0;
    for (const auto& it : sol.trace) {
      if (it.primal_infeasibility > 1e-10 || it.dual_infeasibility > 1e-10) continue;
      ++checked;
      CHECK(it.primal_objective - it.dual_objective >=
            -1e-9 * (1.0 + std::abs(it.primal_objective) + std::abs(it.dual_objective)));
      CHECK(it.complementarity >= 0.0);
    }
    CHECK(checked > 3);
  }

  TEST_CASE("solver is deterministic and writes a CSV trace") {
    std::ostringstream a, b;
    Settings s;
    s.trace_csv = &a;
    const auto x = solve(single(diag(2, 1), Sense::Minimize), s);
    s.trace_csv = &b;
    const auto y = solve(single(diag(2, 1), Sense::Minimize), s);
    CHECK(a.str() == b.str());
    CHECK(a.str().rfind("iteration,primal_objective", 0) == 0);
    REQUIRE(x.trace.size() == y.trace.size());
    for (std::size_t i = 0; i < x.trace.size(); ++i) CHECK(x.trace[i].primal_objective == y.trace[i].primal_objective);
  }

  TEST_CASE("iteration cap yields MaxIterations") {
    Settings s;
    s.max_iterations = 2;
    CHECK(solve(single(diag(2, 1), Sense::Minimize), s).status == Status::MaxIterations);
  }

  TEST_CASE("check rejects malformed problems") {
    ConicProblem p = single(diag(2, 1), Sense::Minimize);
    p.constraints[0].a.psd = {MatrixXd::Identity(3, 3)};
    CHECK_THROWS_AS(p.check(), std::invalid_argument);
    p = single(diag(2, 1), Sense::Minimize);
    p.constraints[0].a.psd[0](0, 1) = 1.0;
    CHECK_THROWS_AS(solve(p), std::invalid_argument);
    ConicProblem empty;
    CHECK_THROWS_AS(empty.check(), std::invalid_argument);
  }

  TEST_CASE("residuals of the exact optimum vanish") {
    const ConicProblem p = single(diag(2, 1), Sense::Minimize);
    ConicSolution s;
    s.psd = {diag(0.5, 0.0)};
    s.lp = VectorXd(0);
    s.y = VectorXd::Constant(1, 0.5);
    const auto r = residuals(p, s);
    CHECK(r.primal_infeasibility <= 1e-12);
    CHECK(r.dual_infeasibility <= 1e-12);
    CHECK(r.complementarity <= 1e-12);
    CHECK(r.gap <= 1e-12);
    CHECK(r.primal_objective == 0.5);
  }

  TEST_CASE("residuals report the violation of X = 0") {
    const ConicProblem p = single(diag(2, 1), Sense::Minimize);
    ConicSolution s;
    s.psd = {MatrixXd::Zero(2, 2)};
    s.lp = VectorXd(0);
    s.y = VectorXd::Constant(1, 0.5);
    const auto r = residuals(p, s);
    CHECK(r.primal_violation[0] == doctest::Approx(1.0));
    CHECK(r.primal_violation_rel[0] == doctest::Approx(0.5));
  }

  TEST_CASE("a perturbed optimum shows a moderate gap") {
    const ConicProblem p = single(diag(2, 1), Sense::Minimize);
    std::mt19937_64 eng(8);
    for (int k = 0; k < 10; ++k) {
      MatrixXd E = fixtures::random_psd(2, 2, false, eng).real();
      E *= 1e-4 / E.norm();
      ConicSolution s;
      s.psd = {diag(0.5, 0.0) + E};
      s.lp = VectorXd(0);
      s.y = VectorXd::Constant(1, 0.5);
      const auto r = residuals(p, s);
      CHECK(r.gap >= 1e-6);
      CHECK(r.gap <= 1e-2);
    }
  }
}
