#include "mbqcqp/rounding.hpp"

#include <fmt/format.h>

namespace mbqcqp {

namespace {

bool bound_met(int r, int m, Field field) {
  return field == Field::Real ? r * (r + 1) / 2 <= m : r * r <= m;
}

// Columns of the returned factor V satisfy V V^H = X, restricted to
// eigenvalues above rel_tol * lambda_max.
CMatrix truncated_factor(const CMatrix& X, Field field, double rel_tol) {
  Eigen::VectorXd lam;
  CMatrix U;
  if (field == Field::Real) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (X.real() + X.real().transpose()));
    lam = es.eigenvalues();
    U = es.eigenvectors().cast<Complex>();
  } else {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (X + X.adjoint()));
    lam = es.eigenvalues();
    U = es.eigenvectors();
  }
  const double lmax = lam.size() ? lam.maxCoeff() : 0.0;
  std::vector<Eigen::Index> keep;
  if (lmax > 0.0)
    for (Eigen::Index j = 0; j < lam.size(); ++j)
      if (lam(j) > rel_tol * lmax) keep.push_back(j);
  CMatrix V(X.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c)
    V.col(static_cast<Eigen::Index>(c)) = U.col(keep[c]) * std::sqrt(lam(keep[c]));
  return V;
}

// Hermitian basis of r x r matrices: real symmetric units, plus imaginary
// antisymmetric units in the complex case.
struct BasisElement {
  int p, q;
  bool imaginary;
};

std::vector<BasisElement> hermitian_basis(int r, Field field) {
  std::vector<BasisElement> out;
  for (int p = 0; p < r; ++p)
    for (int q = p; q < r; ++q) {
      out.push_back({p, q, false});
      if (field == Field::Complex && q > p) out.push_back({p, q, true});
    }
  return out;
}

// Re Tr(B E) for the basis element E.
double basis_trace(const CMatrix& B, const BasisElement& e) {
  if (e.p == e.q) return B(e.p, e.p).real();
  return e.imaginary ? 2.0 * B(e.p, e.q).imag() : 2.0 * B(e.p, e.q).real();
}

CMatrix basis_matrix(const std::vector<BasisElement>& basis, const Eigen::VectorXd& c, int r) {
  CMatrix D = CMatrix::Zero(r, r);
  for (std::size_t j = 0; j < basis.size(); ++j) {
    const auto& e = basis[j];
    const double v = c(static_cast<Eigen::Index>(j));
    if (e.p == e.q) {
      D(e.p, e.p) += v;
    } else if (e.imaginary) {
      D(e.p, e.q) += Complex(0.0, v);
      D(e.q, e.p) += Complex(0.0, -v);
    } else {
      D(e.p, e.q) += v;
      D(e.q, e.p) += v;
    }
  }
  return D;
}

}  // namespace

int numerical_rank(const HermitianMatrix& X, double rel_tol) {
  const Eigen::VectorXd ev = X.eigenvalues();
  if (ev.size() == 0) return 0;
  const double lmax = ev.maxCoeff();
  if (lmax <= 0.0) return 0;
  return static_cast<int>((ev.array() > rel_tol * lmax).count());
}

RankReduction rank_reduce(const std::vector<HermitianMatrix>& A, const HermitianMatrix& X, Field field,
                          double rel_tol) {
  const int m = static_cast<int>(A.size());
  for (const auto& a : A)
    if (a.dim() != X.dim()) throw std::invalid_argument("rank_reduce: constraint dimension mismatch");

  RankReduction out;
  out.rank_before = numerical_rank(X, rel_tol);
  CMatrix V = truncated_factor(X.matrix(), field, rel_tol);

  while (!bound_met(static_cast<int>(V.cols()), m, field)) {
    const int r = static_cast<int>(V.cols());
    const auto basis = hermitian_basis(r, field);
    Eigen::MatrixXd G(m, static_cast<Eigen::Index>(basis.size()));
    for (int k = 0; k < m; ++k) {
      const CMatrix B = V.adjoint() * A[static_cast<std::size_t>(k)].matrix() * V;
      for (std::size_t j = 0; j < basis.size(); ++j) G(k, static_cast<Eigen::Index>(j)) = basis_trace(B, basis[j]);
    }
    // More basis elements than constraints, so the last right singular
    // vector lies in the null space of G.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(G, Eigen::ComputeFullV);
    const Eigen::VectorXd c = svd.matrixV().col(svd.matrixV().cols() - 1);
    CMatrix D = basis_matrix(basis, c, r);

    Eigen::SelfAdjointEigenSolver<CMatrix> es(D);
    double lmax = es.eigenvalues().maxCoeff();
    if (-es.eigenvalues().minCoeff() > lmax) {
      D = -D;
      lmax = -es.eigenvalues().minCoeff();
    }
    if (!(lmax > 0.0)) {
      out.stalled = true;
      break;
    }
    // P = I - D / lmax is PSD with at least one zero eigenvalue.
    CMatrix P = CMatrix::Identity(r, r) - D / lmax;
    P = 0.5 * (P + P.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> ps(P);
    const double pmax = ps.eigenvalues().maxCoeff();
    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < r; ++j)
      if (ps.eigenvalues()(j) > 1e-12 * pmax) keep.push_back(j);
    if (static_cast<int>(keep.size()) >= r) {
      out.stalled = true;
      break;
    }
    CMatrix Vn(V.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j)
      Vn.col(static_cast<Eigen::Index>(j)) = V * ps.eigenvectors().col(keep[j]) * std::sqrt(ps.eigenvalues()(keep[j]));
    V = std::move(Vn);
    ++out.steps;
  }

  out.X = V * V.adjoint();
  out.X = 0.5 * (out.X + out.X.adjoint());
  if (field == Field::Real) out.X = CMatrix(out.X.real().cast<Complex>());
  out.rank_after = numerical_rank(HermitianMatrix(out.X), rel_tol);
  return out;
}

}  // namespace mbqcqp
