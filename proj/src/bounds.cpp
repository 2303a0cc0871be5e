#include "mbqcqp/bounds.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "mbqcqp/rounding.hpp"

namespace mbqcqp {

namespace {

void check_args(double epsilon, int M, int Q) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1]");
  if (Q < 1 || Q > M) throw std::invalid_argument("Q must lie in [1, M]");
}

BoundReport base_report(const Instance& inst) {
  BoundReport b;
  b.sense = inst.sense;
  b.field = inst.field;
  b.M = inst.M();
  b.Q = inst.Q;
  b.epsilon = inst.epsilon;
  return b;
}

}  // namespace

double c_eps(double epsilon, int M, int Q) {
  check_args(epsilon, M, Q);
  return epsilon + (1.0 - epsilon) / (M - Q + 1);
}

double c_tilde(double epsilon, int M, int Q) {
  check_args(epsilon, M, Q);
  return 1.0 - (1.0 - epsilon) / (M - Q + 1);
}

BoundReport min_bound(const Instance& inst) {
  if (inst.sense != ModelSense::Minimize) throw std::invalid_argument("min_bound: instance is a max model");
  constexpr double pi = std::numbers::pi;
  BoundReport b = base_report(inst);
  const double M = inst.M();
  const double Q = inst.Q;
  const double eps = inst.epsilon;
  b.c = c_eps(eps, inst.M(), inst.Q);

  auto pick = [&](double first, const char* first_name, double second, const char* second_name) {
    b.mu = std::max(first, second);
    b.active_branch = first >= second ? first_name : second_name;
  };

  if (inst.Q == inst.M() || eps == 1.0) {
    if (inst.field == Field::Real) {
      b.mu = 27.0 * M * M / pi;
      b.active_branch = "27 M^2 / pi";
    } else {
      pick(8.0 * M, "8 M", 24.0 * std::pow(std::sqrt(M) - 1.0, 2), "24 (sqrt(M) - 1)^2");
    }
    b.note = inst.Q == inst.M() ? "Q = M: continuous multicast case" : "epsilon = 1: continuous multicast case";
  } else if (eps == 0.0) {
    const double tail = M - Q + 1.0;
    if (inst.field == Field::Real) {
      b.mu = 27.0 * Q * Q * tail / pi;
      b.active_branch = "27 Q^2 (M - Q + 1) / pi";
    } else {
      pick(8.0 * Q * tail, "8 Q (M - Q + 1)", 24.0 * std::pow(std::sqrt(Q) - 1.0, 2) * tail,
           "24 (sqrt(Q) - 1)^2 (M - Q + 1)");
    }
    b.note = "epsilon = 0";
  } else {
    const double c = b.c;
    if (inst.field == Field::Real) {
      pick(27.0 * std::pow(M - Q + Q / std::sqrt(c), 2) / pi, "27 [M - Q + Q / sqrt(c)]^2 / pi",
           12.0 * std::pow(std::sqrt(2.0 * M) - 1.0, 2) / (std::pow(pi - 2.0, 2) * c),
           "12 (sqrt(2M) - 1)^2 / ((pi - 2)^2 c)");
    } else {
      pick(8.0 * (M - Q + Q / c), "8 [M - Q + Q / c]", 24.0 * std::pow(std::sqrt(M) - 1.0, 2) / c,
           "24 (sqrt(M) - 1)^2 / c");
    }
  }
  return b;
}

BoundReport max_bound(const Instance& inst, double rank_tolerance) {
  if (inst.sense != ModelSense::Maximize) throw std::invalid_argument("max_bound: instance is a min model");
  if (inst.epsilon == 0.0)
    throw NoGuaranteeError(
        "no guarantee exists for the max model at epsilon = 0: with M = 2, H_1 = H_2 = I, Q = 1 the relaxation "
        "value is 1/2 while every feasible point is w = 0, so the ratio is zero");
  BoundReport b = base_report(inst);
  const double M = inst.M();
  const double eps = inst.epsilon;
  b.c = c_tilde(eps, inst.M(), inst.Q);
  const double cap = inst.field == Field::Real ? std::sqrt(2.0 * M) : std::sqrt(M);
  double K = 0.0;
  for (const auto& H : inst.matrices) K += std::min(static_cast<double>(numerical_rank(H, rank_tolerance)), cap);
  b.K = K;
  const double lead = eps / b.c;
  if (inst.field == Field::Real) {
    b.mu = lead / (200.0 * std::log(50.0 * K));
    b.active_branch = "(eps / c~) / (200 ln(50 K)), K = sum min(rank H_i, sqrt(2M))";
  } else {
    b.mu = lead / (4.0 * std::log(100.0 * K));
    b.active_branch = "(eps / c~) / (4 ln(100 K)), K = sum min(rank H_i, sqrt(M))";
    b.note = "complex branch caps ranks at sqrt(M) inside K";
  }
  if (eps == 1.0) b.note += (b.note.empty() ? "" : "; ") + std::string("epsilon = 1: continuous case, c~ = 1");
  if (inst.Q == inst.M()) b.note += (b.note.empty() ? "" : "; ") + std::string("Q = M: c~ = epsilon");
  return b;
}

BoundReport bound_for(const Instance& inst) {
  return inst.sense == ModelSense::Minimize ? min_bound(inst) : max_bound(inst);
}

BoundReport certify(BoundReport bound, double v_candidate, double v_sdp) {
  if (!(v_sdp > 0.0)) throw std::invalid_argument(fmt::format("certify: relaxation value {} is not positive", v_sdp));
  const double ratio = v_candidate / v_sdp;
  bound.empirical_ratio = ratio;
  bound.certified = bound.sense == ModelSense::Minimize ? ratio <= bound.mu + 1e-9 : ratio >= bound.mu - 1e-9;
  return bound;
}

}  // namespace mbqcqp
