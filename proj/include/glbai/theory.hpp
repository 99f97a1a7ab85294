#pragma once

#include "glbai/types.hpp"

namespace glbai {

/// Inputs of the sample-complexity bound of a run.
struct ComplexityInputs {
  Index dim;
  Index num_arms;
  double epsilon;
  double delta;
  double kappa;
  double reward_bound;
  double slope_floor;
  double lipschitz;
  double delta_min;
};

struct ComplexityReport {
  ComplexityInputs inputs;
  double h_eps;
  double bound_tau;
};

/// H_eps = 18 K k_mu / max(3 eps, eps + Delta_min)^2.
double complexity_h(Index num_arms, double lipschitz, double epsilon, double delta_min);

/// High-probability upper bound on the stopping time,
///
///   A (log[A (pi sqrt(d / (6 delta)) + 1)] + c_mu / (4 kappa R) sqrt((K + 1) / (d H)))^2
///
/// with A = 64 d kappa^2 R^2 H / c_mu^2.
double stopping_time_bound(const ComplexityInputs& in);

ComplexityReport complexity_report(const ComplexityInputs& in);

}  // namespace glbai
