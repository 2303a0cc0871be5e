#include "mbqcqp/oracle.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

namespace mbqcqp {

using Eigen::VectorXd;

std::string_view to_string(OracleStatus s) {
  switch (s) {
    case OracleStatus::ExactIsh: return "exact-ish";
    case OracleStatus::Infeasible: return "infeasible";
    case OracleStatus::Unbounded: return "unbounded";
  }
  return "?";
}

long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long double v = 1.0L;
  for (int i = 1; i <= k; ++i) {
    v = v * (n - k + i) / i;
    if (v > 9.0e18L) return std::numeric_limits<long long>::max();
  }
  return static_cast<long long>(std::llround(static_cast<double>(v)));
}

std::vector<std::vector<int>> enumerate_supports(int M, int Q) {
  if (M < 1 || Q < 0 || Q > M) throw OracleError(fmt::format("enumerate_supports: invalid (M, Q) = ({}, {})", M, Q));
  const long long count = binomial(M, Q);
  if (count > kMaxSupports)
    throw OracleError(fmt::format("C({}, {}) = {} supports exceeds the limit of {}", M, Q, count, kMaxSupports));
  std::vector<std::vector<int>> out;
  out.reserve(static_cast<std::size_t>(count));
  std::vector<int> cur(static_cast<std::size_t>(Q));
  for (int i = 0; i < Q; ++i) cur[static_cast<std::size_t>(i)] = i;
  for (;;) {
    out.push_back(cur);
    int i = Q - 1;
    while (i >= 0 && cur[static_cast<std::size_t>(i)] == M - Q + i) --i;
    if (i < 0) break;
    ++cur[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < Q; ++j) cur[static_cast<std::size_t>(j)] = cur[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

int default_grid(Field field) { return field == Field::Real ? kDefaultRealGrid : kDefaultComplexGrid; }

namespace {

constexpr double kVanishRel = 1e-12;

struct Grid {
  Field field;
  int n;
  int rows() const { return field == Field::Real ? 1 : n + 1; }
  int cols() const { return field == Field::Real ? n : 2 * n; }
  double h_col() const { return std::numbers::pi / n; }        // theta or phi spacing
  double h_row() const { return 0.5 * std::numbers::pi / n; }  // a spacing
  CVector direction(int j, int k) const {
    CVector u(2);
    if (field == Field::Real) {
      const double th = k * h_col();
      u << std::cos(th), std::sin(th);
    } else {
      const double a = j * h_row();
      const double ph = k * h_col();
      u << std::cos(a), std::sin(a) * std::polar(1.0, ph);
    }
    return u;
  }
};

enum class Kind { Min, Max };

// Per-direction squared scale; +inf marks an infeasible (min) or
// uncapped (max) direction.
double direction_value(const std::vector<HermitianMatrix>& H, const VectorXd& level, const VectorXd& tol,
                       const CVector& u, Kind kind) {
  if (kind == Kind::Min) {
    double s = 0.0;
    for (std::size_t i = 0; i < H.size(); ++i) {
      const double t = level(static_cast<Eigen::Index>(i));
      if (t <= 0.0) continue;
      const double q = H[i].quad_form(u);
      if (q <= tol(static_cast<Eigen::Index>(i))) return std::numeric_limits<double>::infinity();
      s = std::max(s, t / q);
    }
    return s;
  }
  double s = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < H.size(); ++i) {
    const double q = H[i].quad_form(u);
    if (q <= tol(static_cast<Eigen::Index>(i))) continue;
    s = std::min(s, level(static_cast<Eigen::Index>(i)) / q);
  }
  return s;
}

ContinuousResult scan(const std::vector<HermitianMatrix>& H, const VectorXd& level, Field field, int n, Kind kind,
                      Execution exec) {
  if (H.empty()) throw OracleError("oracle: no constraint matrices");
  for (const auto& h : H)
    if (h.dim() != 2) throw OracleError(fmt::format("oracle: requires N = 2, got N = {}", h.dim()));
  if (level.size() != static_cast<Eigen::Index>(H.size())) throw OracleError("oracle: level count mismatch");
  if (n < 2) throw OracleError("oracle: grid resolution must be at least 2");
  if (field == Field::Real)
    for (const auto& h : H)
      if (!h.is_real()) throw OracleError("oracle: complex data with a real grid");

  VectorXd tol(static_cast<Eigen::Index>(H.size()));
  for (std::size_t i = 0; i < H.size(); ++i)
    tol(static_cast<Eigen::Index>(i)) = kVanishRel * std::max(0.0, H[i].eigenvalues().maxCoeff());

  const Grid g{field, n};
  const int R = g.rows(), C = g.cols();
  Eigen::MatrixXd f(R, C);
  kernels::parallel_for(R * C, exec, 0, [&](int idx) {
    const int j = idx / C, k = idx % C;
    f(j, k) = direction_value(H, level, tol, g.direction(j, k), kind);
  });

  ContinuousResult out;
  int bj = 0, bk = 0;
  bool found = false;
  for (int j = 0; j < R; ++j)
    for (int k = 0; k < C; ++k) {
      const double v = f(j, k);
      if (kind == Kind::Max && std::isinf(v)) {
        out.status = OracleStatus::Unbounded;
        out.value = v;
        out.w = g.direction(j, k);
        return out;
      }
      if (std::isinf(v)) continue;
      if (!found || (kind == Kind::Min ? v < f(bj, bk) : v > f(bj, bk))) {
        bj = j;
        bk = k;
        found = true;
      }
    }
  if (!found) {
    out.status = OracleStatus::Infeasible;
    out.value = std::numeric_limits<double>::infinity();
    return out;
  }
  out.value = f(bj, bk);
  out.w = std::sqrt(out.value) * g.direction(bj, bk);

  // Lipschitz estimate from the segments next to the best grid point; the
  // column coordinate is periodic (u(theta + pi) = -u(theta)).
  const double best = out.value;
  auto slope = [&](int j, int k, double h) {
    const double v = f(j, k);
    return std::isfinite(v) ? std::abs(v - best) / h : 0.0;
  };
  const double hc = g.h_col();
  double Lc = std::max(slope(bj, (bk + 1) % C, hc), slope(bj, (bk + C - 1) % C, hc));
  out.error_bound = Lc * hc / 2.0;
  if (field == Field::Complex) {
    const double hr = g.h_row();
    double Lr = 0.0;
    if (bj + 1 < R) Lr = std::max(Lr, slope(bj + 1, bk, hr));
    if (bj > 0) Lr = std::max(Lr, slope(bj - 1, bk, hr));
    out.error_bound += Lr * hr / 2.0;
  }
  return out;
}

}  // namespace

ContinuousResult exact_continuous_min(const std::vector<HermitianMatrix>& H, const VectorXd& targets, Field field,
                                      int grid, Execution exec) {
  return scan(H, targets, field, grid, Kind::Min, exec);
}

ContinuousResult exact_continuous_max(const std::vector<HermitianMatrix>& H, const VectorXd& caps, Field field,
                                      int grid, Execution exec) {
  return scan(H, caps, field, grid, Kind::Max, exec);
}

OracleResult oracle_value(const Instance& inst, int grid, Execution exec) {
  if (auto rep = validate(inst); !rep.empty()) throw InstanceError("oracle: " + describe(rep));
  if (inst.N() != 2) throw OracleError(fmt::format("oracle: requires N = 2, got N = {}", inst.N()));
  const int M = inst.M();
  const bool minimize = inst.sense == ModelSense::Minimize;
  const auto supports = enumerate_supports(M, inst.Q);

  OracleResult out;
  out.grid = grid;
  bool found = false;
  for (const auto& sup : supports) {
    VectorXd level = VectorXd::Constant(M, minimize ? inst.epsilon : 1.0);
    for (int i : sup) level(i) = minimize ? 1.0 : inst.epsilon;
    const ContinuousResult r = minimize ? exact_continuous_min(inst.matrices, level, inst.field, grid, exec)
                                        : exact_continuous_max(inst.matrices, level, inst.field, grid, exec);
    if (r.status == OracleStatus::Infeasible) continue;
    const bool better = !found || r.status == OracleStatus::Unbounded ||
                        (minimize ? r.value < out.value : r.value > out.value);
    if (better) {
      found = true;
      out.status = r.status;
      out.value = r.value;
      out.w = r.w;
      out.error_bound = r.error_bound;
      out.support = sup;
    }
    if (r.status == OracleStatus::Unbounded) break;
  }
  if (!found) {
    out.status = OracleStatus::Infeasible;
    out.value = std::numeric_limits<double>::infinity();
    return out;
  }
  out.x1 = Eigen::VectorXi::Zero(M);
  for (int i : out.support) out.x1(i) = 1;
  return out;
}

}  // namespace mbqcqp
