#include "glbai/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace glbai {

double complexity_h(Index num_arms, double lipschitz, double epsilon, double delta_min) {
  if (!(epsilon > 0)) throw InvalidArgument("epsilon must be positive");
  if (delta_min < 0) throw InvalidArgument("Delta_min must be non-negative");
  const double denom = std::max(3.0 * epsilon, epsilon + delta_min);
  return 18.0 * static_cast<double>(num_arms) * lipschitz / (denom * denom);
}

double stopping_time_bound(const ComplexityInputs& in) {
  const double d = static_cast<double>(in.dim);
  const double k = static_cast<double>(in.num_arms);
  if (!(in.delta > 0 && in.delta < std::min(1.0, d / std::numbers::e)))
    throw InvalidArgument("delta must lie in (0, min(1, d/e))");
  if (!(in.kappa > 0 && in.reward_bound > 0 && in.slope_floor > 0 && in.lipschitz > 0))
    throw InvalidArgument("complexity constants must be positive");
  const double h = complexity_h(in.num_arms, in.lipschitz, in.epsilon, in.delta_min);
  const double a = 64.0 * d * in.kappa * in.kappa * in.reward_bound * in.reward_bound /
                   (in.slope_floor * in.slope_floor) * h;
  const double inner = std::log(a * (std::numbers::pi * std::sqrt(d / (6.0 * in.delta)) + 1.0)) +
                       in.slope_floor / (4.0 * in.kappa * in.reward_bound) * std::sqrt((k + 1.0) / (d * h));
  return a * inner * inner;
}

ComplexityReport complexity_report(const ComplexityInputs& in) {
  return {in, complexity_h(in.num_arms, in.lipschitz, in.epsilon, in.delta_min), stopping_time_bound(in)};
}

}  // namespace glbai
