#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "mbqcqp/instance.hpp"

namespace mbqcqp {

// Raised for the max model at epsilon = 0, where the rounding ratio can be 0.
class NoGuaranteeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BoundReport {
  ModelSense sense = ModelSense::Minimize;
  Field field = Field::Real;
  int M = 0;
  int Q = 0;
  double epsilon = 0.0;
  double c = 0.0;          // c(eps) for min, c~(eps) for max
  std::optional<double> K;  // max model only
  double mu = 0.0;
  std::string active_branch;
  std::string note;
  std::optional<double> empirical_ratio;
  bool certified = false;
};

double c_eps(double epsilon, int M, int Q);
double c_tilde(double epsilon, int M, int Q);

BoundReport min_bound(const Instance& inst);
BoundReport max_bound(const Instance& inst, double rank_tolerance = 1e-9);
BoundReport bound_for(const Instance& inst);

// Sets empirical_ratio = v_candidate / v_sdp and the verdict:
// min: ratio <= mu + 1e-9, max: ratio >= mu - 1e-9.
BoundReport certify(BoundReport bound, double v_candidate, double v_sdp);

}  // namespace mbqcqp
