#include "mbqcqp/conic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace mbqcqp::conic {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string_view to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::MaxIterations: return "max_iterations";
    case Status::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

LinearFunctional ConicProblem::zero_functional() const {
  LinearFunctional f;
  for (int n : blocks.psd_dims) f.psd.push_back(MatrixXd::Zero(n, n));
  f.lp = VectorXd::Zero(blocks.lp_dim);
  return f;
}

namespace {

void check_functional(const LinearFunctional& f, const BlockStructure& bs, const std::string& what) {
  if (f.psd.size() > bs.psd_dims.size())
    throw std::invalid_argument(what + ": more PSD terms than blocks");
  for (std::size_t b = 0; b < f.psd.size(); ++b) {
    const auto& m = f.psd[b];
    if (m.size() == 0) continue;
    if (m.rows() != bs.psd_dims[b] || m.cols() != bs.psd_dims[b])
      throw std::invalid_argument(fmt::format("{}: block {} has shape {}x{}, expected {}", what, b, m.rows(),
                                              m.cols(), bs.psd_dims[b]));
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + m.cwiseAbs().maxCoeff()))
      throw std::invalid_argument(fmt::format("{}: block {} is not symmetric", what, b));
  }
  if (f.lp.size() != 0 && f.lp.size() != bs.lp_dim)
    throw std::invalid_argument(what + ": nonnegative block length mismatch");
}

double inner(const MatrixXd& a, const MatrixXd& b) { return a.cwiseProduct(b).sum(); }

MatrixXd sym(const MatrixXd& a) { return 0.5 * (a + a.transpose()); }

double min_eig(const MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

// Standard form: min <C,X> s.t. A(X) = b, X in K, with inequality slacks
// appended to the nonnegative block.
struct StandardForm {
  std::vector<int> dims;
  int n_orig_lp = 0;
  int nlp = 0;
  int m = 0;
  double sign = 1.0;
  std::vector<MatrixXd> C;
  VectorXd c;
  std::vector<std::vector<MatrixXd>> A;  // A[k][b], zero-size when absent
  MatrixXd Alp;                          // m x nlp
  VectorXd b;
  double nu = 0.0;
};

StandardForm to_standard(const ConicProblem& p) {
  StandardForm s;
  s.dims = p.blocks.psd_dims;
  s.n_orig_lp = p.blocks.lp_dim;
  s.m = static_cast<int>(p.constraints.size());
  s.sign = p.sense == Sense::Minimize ? 1.0 : -1.0;
  int n_ineq = 0;
  for (const auto& c : p.constraints) n_ineq += c.relation != Relation::Equal;
  s.nlp = s.n_orig_lp + n_ineq;

  const std::size_t nb = s.dims.size();
  s.C.resize(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    if (b < p.objective.psd.size() && p.objective.psd[b].size() != 0)
      s.C[b] = s.sign * sym(p.objective.psd[b]);
    else
      s.C[b] = MatrixXd::Zero(s.dims[b], s.dims[b]);
  }
  s.c = VectorXd::Zero(s.nlp);
  if (p.objective.lp.size() != 0) s.c.head(s.n_orig_lp) = s.sign * p.objective.lp;

  s.A.resize(static_cast<std::size_t>(s.m));
  s.Alp = MatrixXd::Zero(s.m, s.nlp);
  s.b.resize(s.m);
  int slack = s.n_orig_lp;
  for (int k = 0; k < s.m; ++k) {
    const auto& con = p.constraints[static_cast<std::size_t>(k)];
    auto& Ak = s.A[static_cast<std::size_t>(k)];
    Ak.resize(nb);
    for (std::size_t b = 0; b < nb; ++b)
      if (b < con.a.psd.size() && con.a.psd[b].size() != 0) Ak[b] = sym(con.a.psd[b]);
    if (con.a.lp.size() != 0) s.Alp.row(k).head(s.n_orig_lp) = con.a.lp.transpose();
    if (con.relation == Relation::GreaterEqual) s.Alp(k, slack++) = -1.0;
    else if (con.relation == Relation::LessEqual) s.Alp(k, slack++) = 1.0;
    s.b(k) = con.rhs;
  }
  s.nu = s.nlp;
  for (int n : s.dims) s.nu += n;
  return s;
}

struct Point {
  std::vector<MatrixXd> X;
  VectorXd x;
};

VectorXd apply_A(const StandardForm& s, const std::vector<MatrixXd>& X, const VectorXd& x) {
  VectorXd out = s.Alp * x;
  for (int k = 0; k < s.m; ++k)
    for (std::size_t b = 0; b < s.dims.size(); ++b) {
      const auto& Akb = s.A[static_cast<std::size_t>(k)][b];
      if (Akb.size() != 0) out(k) += inner(Akb, X[b]);
    }
  return out;
}

Point apply_AT(const StandardForm& s, const VectorXd& y) {
  Point out;
  for (int n : s.dims) out.X.push_back(MatrixXd::Zero(n, n));
  out.x = s.Alp.transpose() * y;
  for (int k = 0; k < s.m; ++k)
    for (std::size_t b = 0; b < s.dims.size(); ++b) {
      const auto& Akb = s.A[static_cast<std::size_t>(k)][b];
      if (Akb.size() != 0) out.X[b] += y(k) * Akb;
    }
  return out;
}

double objective(const StandardForm& s, const Point& p) {
  double v = s.c.dot(p.x);
  for (std::size_t b = 0; b < s.dims.size(); ++b) v += inner(s.C[b], p.X[b]);
  return v;
}

double norm(const Point& p) {
  double v = p.x.squaredNorm();
  for (const auto& m : p.X) v += m.squaredNorm();
  return std::sqrt(v);
}

double complementarity(const Point& X, const Point& Z) {
  double v = X.x.dot(Z.x);
  for (std::size_t b = 0; b < X.X.size(); ++b) v += inner(X.X[b], Z.X[b]);
  return v;
}

// Nesterov-Todd scaling of one PSD block: W = G G^T with W Z W = X and
// G^-1 X G^-T = G^T Z G = diag(lambda).
struct BlockScaling {
  MatrixXd G, Ginv, W;
  VectorXd lambda;
};

bool nt_scaling(const MatrixXd& X, const MatrixXd& Z, BlockScaling& out) {
  Eigen::LLT<MatrixXd> lx(X), lz(Z);
  if (lx.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
  const MatrixXd L = lx.matrixL();
  const MatrixXd R = lz.matrixL();
  Eigen::JacobiSVD<MatrixXd> svd(R.transpose() * L, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const VectorXd sv = svd.singularValues();
  if (sv.minCoeff() <= 0.0 || !sv.allFinite()) return false;
  const VectorXd s_half = sv.cwiseSqrt();
  const MatrixXd Linv = lx.matrixL().solve(MatrixXd::Identity(X.rows(), X.cols()));
  out.G = L * svd.matrixV() * s_half.cwiseInverse().asDiagonal();
  out.Ginv = s_half.asDiagonal() * svd.matrixV().transpose() * Linv;
  out.W = out.G * out.G.transpose();
  out.lambda = sv;
  return true;
}

double max_step_psd(const VectorXd& lambda, const MatrixXd& d_scaled) {
  const VectorXd inv_sqrt = lambda.cwiseSqrt().cwiseInverse();
  const MatrixXd D = inv_sqrt.asDiagonal() * d_scaled * inv_sqrt.asDiagonal();
  const double lmin = min_eig(D);
  return lmin < 0.0 ? -1.0 / lmin : std::numeric_limits<double>::infinity();
}

double max_step_lp(const VectorXd& v, const VectorXd& dv) {
  double a = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (dv(i) < 0.0) a = std::min(a, -v(i) / dv(i));
  return a;
}

struct Scaling {
  std::vector<BlockScaling> blocks;
  VectorXd w;       // LP: sqrt(x / z)
  VectorXd lambda;  // LP: sqrt(x z)
};

struct Direction {
  Point dX, dZ;
  VectorXd dy;
  std::vector<MatrixXd> dXs, dZs;  // scaled PSD directions
  VectorXd dxs, dzs;               // scaled LP directions
};

class NewtonSystem {
 public:
  NewtonSystem(const StandardForm& s, const Scaling& sc, double reg) : s_(s), sc_(sc) {
    const int m = s.m;
    M_ = MatrixXd::Zero(m, m);
    const MatrixXd wsq = (sc.w.array().square()).matrix().asDiagonal();
    M_ += s.Alp * wsq * s.Alp.transpose();
    for (std::size_t b = 0; b < s.dims.size(); ++b) {
      const MatrixXd& W = sc.blocks[b].W;
      for (int i = 0; i < m; ++i) {
        const auto& Aib = s.A[static_cast<std::size_t>(i)][b];
        if (Aib.size() == 0) continue;
        const MatrixXd P = W * Aib * W;
        for (int j = i; j < m; ++j) {
          const auto& Ajb = s.A[static_cast<std::size_t>(j)][b];
          if (Ajb.size() == 0) continue;
          const double v = inner(Ajb, P);
          M_(i, j) += v;
          if (j != i) M_(j, i) += v;
        }
      }
    }
    // Factor as is; shift the diagonal only if the factorization breaks down.
    llt_.compute(M_);
    ok_ = llt_.info() == Eigen::Success;
    const double scale = std::max(1.0, M_.diagonal().cwiseAbs().maxCoeff());
    for (double shift = reg; !ok_ && shift <= 1e-4; shift *= 100.0) {
      MatrixXd Mreg = M_;
      Mreg.diagonal().array() += shift * scale;
      llt_.compute(Mreg);
      ok_ = llt_.info() == Eigen::Success;
    }
    if (!ok_) {
      ldlt_.compute(M_);
      ok_ = ldlt_.info() == Eigen::Success && ldlt_.isPositive();
      use_ldlt_ = true;
    }
  }

  bool ok() const { return ok_; }

  VectorXd solve(const VectorXd& rhs) const {
    auto base = [&](const VectorXd& r) -> VectorXd { return use_ldlt_ ? VectorXd(ldlt_.solve(r)) : VectorXd(llt_.solve(r)); };
    VectorXd x = base(rhs);
    VectorXd r = rhs - M_ * x;
    double rn = r.norm();
    for (int it = 0; it < 10 && rn > 1e-15 * (1.0 + rhs.norm()); ++it) {
      const VectorXd x1 = x + base(r);
      const VectorXd r1 = rhs - M_ * x1;
      const double rn1 = r1.norm();
      if (!(rn1 < rn)) break;
      x = x1;
      r = r1;
      rn = rn1;
    }
    return x;
  }

  // Direction for the scaled complementarity right-hand side Rs.
  Direction direction(const std::vector<MatrixXd>& Rs, const VectorXd& rs_lp, const VectorXd& Rp,
                      const Point& Rd) const {
    Direction d;
    const std::size_t nb = s_.dims.size();
    std::vector<MatrixXd> GRG(nb);
    Point T;
    T.X.resize(nb);
    for (std::size_t b = 0; b < nb; ++b) {
      const auto& bs = sc_.blocks[b];
      GRG[b] = bs.G * Rs[b] * bs.G.transpose();
      T.X[b] = GRG[b] - bs.W * Rd.X[b] * bs.W;
    }
    const VectorXd wrs = sc_.w.cwiseProduct(rs_lp);
    T.x = wrs - sc_.w.cwiseProduct(sc_.w).cwiseProduct(Rd.x);

    d.dy = solve(Rp - apply_A(s_, T.X, T.x));
    const Point ATdy = apply_AT(s_, d.dy);
    d.dZ.X.resize(nb);
    d.dX.X.resize(nb);
    d.dXs.resize(nb);
    d.dZs.resize(nb);
    for (std::size_t b = 0; b < nb; ++b) {
      const auto& bs = sc_.blocks[b];
      d.dZ.X[b] = sym(Rd.X[b] - ATdy.X[b]);
      d.dX.X[b] = sym(GRG[b] - bs.W * d.dZ.X[b] * bs.W);
      d.dXs[b] = sym(bs.Ginv * d.dX.X[b] * bs.Ginv.transpose());
      d.dZs[b] = sym(bs.G.transpose() * d.dZ.X[b] * bs.G);
    }
    d.dZ.x = Rd.x - ATdy.x;
    d.dX.x = wrs - sc_.w.cwiseProduct(sc_.w).cwiseProduct(d.dZ.x);
    d.dxs = d.dX.x.cwiseQuotient(sc_.w);
    d.dzs = d.dZ.x.cwiseProduct(sc_.w);
    return d;
  }

 private:
  const StandardForm& s_;
  const Scaling& sc_;
  MatrixXd M_;
  Eigen::LLT<MatrixXd> llt_;
  Eigen::LDLT<MatrixXd> ldlt_;
  bool ok_ = false;
  bool use_ldlt_ = false;
};

std::pair<double, double> step_lengths(const Scaling& sc, const Point& X, const Point& Z, const Direction& d) {
  double ap = max_step_lp(X.x, d.dX.x);
  double ad = max_step_lp(Z.x, d.dZ.x);
  for (std::size_t b = 0; b < sc.blocks.size(); ++b) {
    ap = std::min(ap, max_step_psd(sc.blocks[b].lambda, d.dXs[b]));
    ad = std::min(ad, max_step_psd(sc.blocks[b].lambda, d.dZs[b]));
  }
  return {ap, ad};
}

Point axpy(const Point& p, double a, const Point& d) {
  Point out;
  out.x = p.x + a * d.x;
  for (std::size_t b = 0; b < p.X.size(); ++b) out.X.push_back(sym(p.X[b] + a * d.X[b]));
  return out;
}

// Largest violation of membership in the cone (for a candidate dual slack).
double cone_violation(const Point& p) {
  double v = 0.0;
  if (p.x.size() != 0) v = std::max(v, -p.x.minCoeff());
  for (const auto& m : p.X) v = std::max(v, -min_eig(m));
  return v;
}

}  // namespace

void ConicProblem::check() const {
  if (blocks.psd_dims.empty() && blocks.lp_dim == 0) throw std::invalid_argument("problem has no blocks");
  for (int n : blocks.psd_dims)
    if (n <= 0) throw std::invalid_argument("PSD block dimension must be positive");
  check_functional(objective, blocks, "objective");
  for (std::size_t k = 0; k < constraints.size(); ++k)
    check_functional(constraints[k].a, blocks, fmt::format("constraint {}", k));
}

double evaluate(const LinearFunctional& f, const std::vector<MatrixXd>& psd, const VectorXd& lp) {
  double v = 0.0;
  for (std::size_t b = 0; b < f.psd.size() && b < psd.size(); ++b)
    if (f.psd[b].size() != 0) v += inner(f.psd[b], psd[b]);
  if (f.lp.size() != 0 && lp.size() != 0) v += f.lp.dot(lp);
  return v;
}

ConicSolution solve(const ConicProblem& problem, const Settings& settings) {
  problem.check();
  const StandardForm s = to_standard(problem);
  const std::size_t nb = s.dims.size();

  // Starting point: multiples of the identity, sized from the data.
  double max_a = 0.0, max_b = 0.0;
  for (int k = 0; k < s.m; ++k) {
    double nk = s.Alp.row(k).norm();
    for (const auto& a : s.A[static_cast<std::size_t>(k)])
      if (a.size() != 0) nk = std::hypot(nk, a.norm());
    max_a = std::max(max_a, nk);
    max_b = std::max(max_b, (1.0 + std::abs(s.b(k))) / (1.0 + nk));
  }
  double normC = s.c.norm();
  for (const auto& c : s.C) normC = std::hypot(normC, c.norm());
  const double n_total = std::max(1.0, s.nu);
  const double zeta = std::max({10.0, std::sqrt(n_total), n_total * max_b});
  const double eta = std::max({10.0, std::sqrt(n_total), max_a, normC});

  Point X, Z;
  for (int n : s.dims) {
    X.X.push_back(zeta * MatrixXd::Identity(n, n));
    Z.X.push_back(eta * MatrixXd::Identity(n, n));
  }
  X.x = VectorXd::Constant(s.nlp, zeta);
  Z.x = VectorXd::Constant(s.nlp, eta);
  VectorXd y = VectorXd::Zero(s.m);

  const double norm_b = s.b.norm();

  ConicSolution sol;
  if (settings.trace_csv)
    *settings.trace_csv << "iteration,primal_objective,dual_objective,primal_infeasibility,"
                           "dual_infeasibility,complementarity,relative_gap,step_primal,step_dual\n";

  auto finish = [&](Status st) {
    sol.status = st;
    for (std::size_t b = 0; b < nb; ++b) sol.psd.push_back(X.X[b]);
    sol.lp = X.x.head(s.n_orig_lp);
    sol.y = s.sign * y;
    sol.primal_objective = s.sign * objective(s, X);
    sol.dual_objective = s.sign * s.b.dot(y);
    sol.relative_gap = std::abs(sol.primal_objective - sol.dual_objective) /
                       (1.0 + std::abs(sol.primal_objective) + std::abs(sol.dual_objective));
    return sol;
  };

  // Best iterate so far; late iterations can lose accuracy once the Schur
  // complement becomes ill-conditioned.
  struct Snapshot {
    Point X, Z;
    VectorXd y;
    int iter = -1;
    double merit = std::numeric_limits<double>::infinity();
  } best;
  auto fallback = [&](Status st) {
    if (best.merit <= settings.accept_tolerance) {
      X = best.X;
      Z = best.Z;
      y = best.y;
      sol.iterations = best.iter;
      return finish(Status::Optimal);
    }
    return finish(st);
  };

  double last_ap = 0.0, last_ad = 0.0;
  int stalls = 0;
  for (int iter = 0;; ++iter) {
    const VectorXd Rp = s.b - apply_A(s, X.X, X.x);
    Point ATy = apply_AT(s, y);
    Point Rd;
    Rd.x = s.c - Z.x - ATy.x;
    for (std::size_t b = 0; b < nb; ++b) Rd.X.push_back(sym(s.C[b] - Z.X[b] - ATy.X[b]));

    const double pobj = objective(s, X);
    const double dobj = s.b.dot(y);
    const double comp = complementarity(X, Z);
    const double mu = comp / s.nu;
    IterationRecord rec;
    rec.iteration = iter;
    rec.primal_objective = s.sign * pobj;
    rec.dual_objective = s.sign * dobj;
    rec.primal_infeasibility = Rp.norm() / (1.0 + norm_b);
    rec.dual_infeasibility = norm(Rd) / (1.0 + normC);
    rec.complementarity = comp;
    rec.relative_gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    rec.step_primal = last_ap;
    rec.step_dual = last_ad;
    sol.trace.push_back(rec);
    sol.iterations = iter;
    if (settings.trace_csv)
      *settings.trace_csv << fmt::format("{},{:.17g},{:.17g},{:.6e},{:.6e},{:.6e},{:.6e},{:.4f},{:.4f}\n", iter,
                                         rec.primal_objective, rec.dual_objective, rec.primal_infeasibility,
                                         rec.dual_infeasibility, comp, rec.relative_gap, last_ap, last_ad);

    const double comp_rel = comp / (1.0 + std::abs(pobj) + std::abs(dobj));
    auto converged = [&](double tol) {
      return rec.primal_infeasibility <= tol && rec.dual_infeasibility <= tol && rec.relative_gap <= tol &&
             comp_rel <= tol;
    };
    if (converged(settings.tolerance)) return finish(Status::Optimal);
    const double merit = std::max({rec.primal_infeasibility, rec.dual_infeasibility, rec.relative_gap, comp_rel});
    if (merit < best.merit) best = {X, Z, y, iter, merit};

    // Approximate Farkas multiplier: b^T y > 0 with -A^T y in the dual cone.
    const double by = dobj;
    if (by > 0.0 && rec.primal_infeasibility > settings.certificate_tolerance) {
      Point neg = apply_AT(s, -y / by);
      const double r = cone_violation(neg);
      if (r <= settings.certificate_tolerance) {
        sol.certificate_residual = r;
        return finish(Status::Infeasible);
      }
    }
    // Approximate improving ray: X in the cone with <C,X> < 0 and A(X) small
    // relative to |<C,X>|.
    if (pobj < 0.0 && rec.dual_infeasibility > settings.certificate_tolerance) {
      const double r = apply_A(s, X.X, X.x).norm() / (-pobj);
      if (r <= settings.certificate_tolerance) {
        sol.certificate_residual = r;
        return finish(Status::Unbounded);
      }
    }
    if (iter >= settings.max_iterations)
      return fallback(Status::MaxIterations);

    Scaling sc;
    sc.blocks.resize(nb);
    bool scaled = true;
    for (std::size_t b = 0; b < nb; ++b) scaled = scaled && nt_scaling(X.X[b], Z.X[b], sc.blocks[b]);
    sc.w = X.x.cwiseQuotient(Z.x).cwiseSqrt();
    sc.lambda = X.x.cwiseProduct(Z.x).cwiseSqrt();
    if (!scaled || !sc.w.allFinite())
      return fallback(Status::NumericalFailure);

    NewtonSystem ns(s, sc, settings.regularization);
    if (!ns.ok()) return fallback(Status::NumericalFailure);

    // Predictor: scaled complementarity target zero.
    std::vector<MatrixXd> Rs(nb);
    for (std::size_t b = 0; b < nb; ++b) Rs[b] = -MatrixXd(sc.blocks[b].lambda.asDiagonal());
    const Direction aff = ns.direction(Rs, -sc.lambda, Rp, Rd);
    auto [ap_aff, ad_aff] = step_lengths(sc, X, Z, aff);
    ap_aff = std::min(1.0, ap_aff);
    ad_aff = std::min(1.0, ad_aff);
    const double mu_aff = complementarity(axpy(X, ap_aff, aff.dX), axpy(Z, ad_aff, aff.dZ)) / s.nu;
    const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

    // Corrector with the second-order term.
    for (std::size_t b = 0; b < nb; ++b) {
      const VectorXd& lam = sc.blocks[b].lambda;
      MatrixXd rhs = -0.5 * (aff.dXs[b] * aff.dZs[b] + aff.dZs[b] * aff.dXs[b]);
      rhs.diagonal().array() += sigma * mu - lam.array().square();
      for (Eigen::Index i = 0; i < rhs.rows(); ++i)
        for (Eigen::Index j = 0; j < rhs.cols(); ++j) rhs(i, j) *= 2.0 / (lam(i) + lam(j));
      Rs[b] = sym(rhs);
    }
    const VectorXd rs_lp =
        ((sigma * mu - sc.lambda.array().square() - aff.dxs.array() * aff.dzs.array()) / sc.lambda.array()).matrix();
    const Direction d = ns.direction(Rs, rs_lp, Rp, Rd);
    const auto [ap_max, ad_max] = step_lengths(sc, X, Z, d);
    const double ap = std::min(1.0, settings.step_fraction * ap_max);
    const double ad = std::min(1.0, settings.step_fraction * ad_max);
    if (!d.dy.allFinite() || !(ap > 0.0) || !(ad > 0.0))
      return fallback(Status::NumericalFailure);

    X = axpy(X, ap, d.dX);
    Z = axpy(Z, ad, d.dZ);
    y += ad * d.dy;
    last_ap = ap;
    last_ad = ad;

    stalls = (ap < 1e-8 && ad < 1e-8) ? stalls + 1 : 0;
    if (stalls >= 3)
      return fallback(Status::NumericalFailure);
  }
}

double ResidualReport::worst_relative() const {
  return std::max({primal_infeasibility_rel, dual_infeasibility_rel, complementarity_rel, gap_rel});
}

ResidualReport residuals(const ConicProblem& problem, const ConicSolution& solution) {
  const auto& bs = problem.blocks;
  if (solution.psd.size() != bs.psd_dims.size() || solution.lp.size() != bs.lp_dim ||
      solution.y.size() != static_cast<Eigen::Index>(problem.constraints.size()))
    throw std::invalid_argument("residuals: solution shape does not match problem");

  const double sgn = problem.sense == Sense::Minimize ? 1.0 : -1.0;
  ResidualReport r;
  r.primal_objective = evaluate(problem.objective, solution.psd, solution.lp);
  double dobj = 0.0;
  double compl_slack = 0.0;
  double sign_violation = 0.0;

  // Dual slack S = sgn * (C - sum_k y_k A_k) must lie in the cone.
  Point S;
  for (std::size_t b = 0; b < bs.psd_dims.size(); ++b) {
    const int n = bs.psd_dims[b];
    MatrixXd c = (b < problem.objective.psd.size() && problem.objective.psd[b].size() != 0)
                     ? problem.objective.psd[b]
                     : MatrixXd::Zero(n, n);
    S.X.push_back(c);
  }
  S.x = problem.objective.lp.size() != 0 ? problem.objective.lp : VectorXd::Zero(bs.lp_dim);

  for (std::size_t k = 0; k < problem.constraints.size(); ++k) {
    const auto& con = problem.constraints[k];
    const double yk = solution.y(static_cast<Eigen::Index>(k));
    const double slack = evaluate(con.a, solution.psd, solution.lp) - con.rhs;
    double viol = 0.0;
    switch (con.relation) {
      case Relation::Equal: viol = std::abs(slack); break;
      case Relation::GreaterEqual: viol = std::max(0.0, -slack); break;
      case Relation::LessEqual: viol = std::max(0.0, slack); break;
    }
    r.primal_violation.push_back(viol);
    r.primal_violation_rel.push_back(viol / (1.0 + std::abs(con.rhs)));
    r.primal_infeasibility = std::max(r.primal_infeasibility, viol);
    r.primal_infeasibility_rel = std::max(r.primal_infeasibility_rel, r.primal_violation_rel.back());
    dobj += con.rhs * yk;
    if (con.relation != Relation::Equal) {
      const double dir = con.relation == Relation::GreaterEqual ? 1.0 : -1.0;
      sign_violation = std::max(sign_violation, -sgn * dir * yk);
      compl_slack += std::abs(slack * yk);
    }
    for (std::size_t b = 0; b < con.a.psd.size() && b < S.X.size(); ++b)
      if (con.a.psd[b].size() != 0) S.X[b] -= yk * con.a.psd[b];
    if (con.a.lp.size() != 0) S.x -= yk * con.a.lp;
  }
  double normC = 0.0;
  for (auto& m : S.X) m = sgn * m;
  S.x *= sgn;
  for (const auto& m : problem.objective.psd) normC = std::hypot(normC, m.norm());
  if (problem.objective.lp.size() != 0) normC = std::hypot(normC, problem.objective.lp.norm());

  r.dual_objective = dobj;
  r.dual_infeasibility = std::max(cone_violation(S), sign_violation);
  r.dual_infeasibility_rel = r.dual_infeasibility / (1.0 + normC);

  double comp = compl_slack;
  for (std::size_t b = 0; b < S.X.size(); ++b) comp += std::abs(inner(S.X[b], solution.psd[b]));
  if (bs.lp_dim > 0) comp += S.x.cwiseProduct(solution.lp).cwiseAbs().sum();
  const double scale = 1.0 + std::abs(r.primal_objective) + std::abs(r.dual_objective);
  r.complementarity = comp;
  r.complementarity_rel = comp / scale;
  r.gap = std::abs(r.primal_objective - r.dual_objective);
  r.gap_rel = r.gap / scale;
  return r;
}

}  // namespace mbqcqp::conic
