#include "mbqcqp/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

namespace mbqcqp {

using Eigen::VectorXd;

namespace {

constexpr double kRequiredFloor = 1e-14;
constexpr double kVanishRel = 1e-12;

}  // namespace

SupportSet select_support(const VectorXd& beta_bar, int Q) {
  const int M = static_cast<int>(beta_bar.size());
  if (Q < 0 || Q > M) throw std::invalid_argument(fmt::format("select_support: Q = {} with M = {}", Q, M));
  SupportSet idx(static_cast<std::size_t>(M));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return beta_bar(a) > beta_bar(b); });
  idx.resize(static_cast<std::size_t>(Q));
  std::sort(idx.begin(), idx.end());
  return idx;
}

CMatrix psd_factor(const HermitianMatrix& X) {
  const int n = X.dim();
  Eigen::VectorXd lam;
  CMatrix U;
  if (X.is_real()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(X.real());
    lam = es.eigenvalues();
    U = es.eigenvectors().cast<Complex>();
  } else {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(X.matrix());
    lam = es.eigenvalues();
    U = es.eigenvectors();
  }
  if (n == 0) return CMatrix(0, 0);
  const double lmax = lam.maxCoeff();
  if (lam.minCoeff() < -1e-8 * (1.0 + std::max(0.0, lmax)))
    throw RoundingError(fmt::format("covariance is not PSD (min eigenvalue {})", lam.minCoeff()));
  // Eigenvalues at round-off level are treated as zero so that a low-rank
  // covariance yields samples exactly in its range.
  const double floor = 1e-14 * std::max(0.0, lmax);
  const Eigen::VectorXd kept = (lam.array() > floor).select(lam, 0.0);
  return U * kept.cwiseSqrt().cast<Complex>().asDiagonal();
}

CVector sample_gaussian(const CMatrix& L, Field field, rng::Engine& eng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::Index k = L.cols();
  CVector g(k);
  if (field == Field::Real) {
    for (Eigen::Index j = 0; j < k; ++j) g(j) = Complex(normal(eng), 0.0);
  } else {
    const double s = 1.0 / std::sqrt(2.0);
    for (Eigen::Index j = 0; j < k; ++j) {
      const double re = normal(eng);
      const double im = normal(eng);
      g(j) = Complex(s * re, s * im);
    }
  }
  return L * g;
}

CVector sample_gaussian(const HermitianMatrix& X, Field field, rng::Engine& eng) {
  return sample_gaussian(psd_factor(X), field, eng);
}

double scale_min(const VectorXd& q, const std::vector<bool>& in_support, double epsilon) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    if (in_support[static_cast<std::size_t>(i)]) s = std::max(s, 1.0 / q(i));
    else if (epsilon > 0.0) s = std::max(s, epsilon / q(i));
  }
  return std::sqrt(s);
}

double scale_max(const VectorXd& q, const std::vector<bool>& in_support, double epsilon,
                 const VectorXd& vanish_threshold) {
  double s = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    if (q(i) <= vanish_threshold(i)) continue;  // c/0 = +inf: no cap
    const double cap = in_support[static_cast<std::size_t>(i)] ? epsilon : 1.0;
    s = std::min(s, cap / q(i));
  }
  return std::sqrt(s);
}

FeasibilityReport check_feasibility(const Instance& inst, const Eigen::VectorXi& x1, const CVector& x2, double tol) {
  const int M = inst.M();
  if (x1.size() != M || x2.size() != inst.N()) throw std::invalid_argument("check_feasibility: shape mismatch");
  FeasibilityReport r;
  r.binary_ok = ((x1.array() == 0) || (x1.array() == 1)).all();
  r.cardinality_ok = x1.sum() == inst.Q;
  r.worst_slack = std::numeric_limits<double>::infinity();
  const bool minimize = inst.sense == ModelSense::Minimize;
  for (int i = 0; i < M; ++i) {
    const double q = inst.matrices[static_cast<std::size_t>(i)].quad_form(x2);
    const bool on = x1(i) == 1;
    const double s = minimize ? q - (on ? 1.0 : inst.epsilon) : (on ? inst.epsilon : 1.0) - q;
    r.slack.push_back(s);
    r.worst_slack = std::min(r.worst_slack, s);
  }
  r.feasible = r.binary_ok && r.cardinality_ok && r.worst_slack >= -tol;
  return r;
}

namespace {

struct TrialContext {
  const Instance& inst;
  CMatrix L;
  std::vector<bool> in_support;
  VectorXd lambda_max;
  long long budget = 0;
};

// Draws until every required quadratic form is usable (min model).
RoundingTrial run_min_trial(const TrialContext& ctx, const RoundingOptions& opt, int trial) {
  const Instance& inst = ctx.inst;
  const int M = inst.M();
  auto eng = rng::stream(opt.seed, "rounding", opt.realization, static_cast<std::uint64_t>(trial));
  RoundingTrial tr;
  VectorXd q(M);
  for (;;) {
    tr.xi = sample_gaussian(ctx.L, inst.field, eng);
    bool usable = true;
    for (int i = 0; i < M; ++i) {
      q(i) = inst.matrices[static_cast<std::size_t>(i)].quad_form(tr.xi);
      const bool required = ctx.in_support[static_cast<std::size_t>(i)] || inst.epsilon > 0.0;
      if (required && q(i) <= kRequiredFloor) usable = false;
    }
    if (usable) break;
    if (++tr.resamples > ctx.budget)
      throw RoundingError(fmt::format("resample budget of {} exhausted in trial {}", ctx.budget, trial));
  }
  tr.t = scale_min(q, ctx.in_support, inst.epsilon);
  tr.x2 = tr.t * tr.xi;
  tr.objective = tr.x2.squaredNorm();
  return tr;
}

RoundingTrial run_max_trial(const TrialContext& ctx, const RoundingOptions& opt, int trial) {
  const Instance& inst = ctx.inst;
  const int M = inst.M();
  auto eng = rng::stream(opt.seed, "rounding", opt.realization, static_cast<std::uint64_t>(trial));
  RoundingTrial tr;
  tr.xi = sample_gaussian(ctx.L, inst.field, eng);
  const double n2 = tr.xi.squaredNorm();
  if (n2 == 0.0) {
    tr.t = 0.0;
    tr.x2 = tr.xi;
    tr.objective = 0.0;
    return tr;
  }
  VectorXd q(M);
  for (int i = 0; i < M; ++i) q(i) = inst.matrices[static_cast<std::size_t>(i)].quad_form(tr.xi);
  const VectorXd thr = kVanishRel * n2 * ctx.lambda_max;
  tr.t = scale_max(q, ctx.in_support, inst.epsilon, thr);
  if (std::isinf(tr.t)) {
    tr.x2 = tr.xi;
    tr.objective = std::numeric_limits<double>::infinity();
    return tr;
  }
  tr.x2 = tr.t * tr.xi;
  tr.objective = tr.x2.squaredNorm();
  return tr;
}

RoundingOutcome run_rounding(const Instance& inst, const RelaxationSolution& relax, const RoundingOptions& opt,
                             bool minimize) {
  if (opt.trials < 1) throw std::invalid_argument("rounding needs at least one trial");
  if (relax.beta_bar.size() != inst.M() || relax.X2.dim() != inst.N())
    throw std::invalid_argument("rounding: relaxation does not match the instance");
  const int M = inst.M();

  RoundingOutcome out;
  out.support = select_support(relax.beta_bar, inst.Q);
  out.x1 = Eigen::VectorXi::Zero(M);
  for (int i : out.support) out.x1(i) = 1;

  HermitianMatrix X = relax.X2;
  out.rank_before = numerical_rank(X);
  if (opt.rank_reduce) {
    std::vector<HermitianMatrix> A = inst.matrices;
    A.push_back(HermitianMatrix(CMatrix::Identity(inst.N(), inst.N())));
    X = HermitianMatrix(rank_reduce(A, X, inst.field).X);
  }
  out.rank_after = numerical_rank(X);

  TrialContext ctx{inst, psd_factor(X), std::vector<bool>(static_cast<std::size_t>(M), false), VectorXd(M),
                   100LL * opt.trials};
  for (int i : out.support) ctx.in_support[static_cast<std::size_t>(i)] = true;
  for (int i = 0; i < M; ++i) {
    const VectorXd ev = inst.matrices[static_cast<std::size_t>(i)].eigenvalues();
    ctx.lambda_max(i) = ev.size() ? std::max(0.0, ev.maxCoeff()) : 0.0;
  }

  std::vector<RoundingTrial> trials(static_cast<std::size_t>(opt.trials));
  kernels::parallel_for(opt.trials, opt.exec, opt.workers, [&](int t) {
    trials[static_cast<std::size_t>(t)] = minimize ? run_min_trial(ctx, opt, t) : run_max_trial(ctx, opt, t);
  });

  out.trials_attempted = opt.trials;
  out.objectives.reserve(trials.size());
  long long resamples = 0;
  for (std::size_t t = 0; t < trials.size(); ++t) {
    const auto& tr = trials[t];
    resamples += tr.resamples;
    out.objectives.push_back(tr.objective);
    if (std::isinf(tr.t)) out.unbounded = true;
    const bool better = out.best_index < 0 || (minimize ? tr.objective < out.v_ubqp : tr.objective > out.v_ubqp);
    if (better) {
      out.best_index = static_cast<int>(t);
      out.v_ubqp = tr.objective;
    }
  }
  if (resamples > ctx.budget)
    throw RoundingError(fmt::format("resample budget of {} exhausted ({} redraws)", ctx.budget, resamples));
  out.trials_resampled = static_cast<int>(resamples);
  out.best = trials[static_cast<std::size_t>(out.best_index)];
  if (!out.unbounded) out.best.feasible = check_feasibility(inst, out.x1, out.best.x2).feasible;
  if (opt.keep_trials) {
    for (auto& tr : trials)
      if (std::isfinite(tr.t)) tr.feasible = check_feasibility(inst, out.x1, tr.x2).feasible;
    out.all_trials = std::move(trials);
  }
  return out;
}

}  // namespace

RoundingOutcome round_min(const Instance& inst, const RelaxationSolution& relax, const RoundingOptions& opt) {
  if (inst.sense != ModelSense::Minimize) throw std::invalid_argument("round_min: instance is a max model");
  return run_rounding(inst, relax, opt, true);
}

RoundingOutcome round_max(const Instance& inst, const RelaxationSolution& relax, const RoundingOptions& opt) {
  if (inst.sense != ModelSense::Maximize) throw std::invalid_argument("round_max: instance is a min model");
  return run_rounding(inst, relax, opt, false);
}

RoundingOutcome round_solution(const Instance& inst, const RelaxationSolution& relax, const RoundingOptions& opt) {
  return inst.sense == ModelSense::Minimize ? round_min(inst, relax, opt) : round_max(inst, relax, opt);
}

}  // namespace mbqcqp
