#pragma once

#include "glbai/design.hpp"
#include "glbai/environment.hpp"
#include "glbai/link.hpp"
#include "glbai/selector.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace glbai {

/// How the width multiplier alpha of C_t is chosen.
struct AlphaMode {
  enum class Kind { Theoretical, Empirical, Fixed };
  Kind kind = Kind::Empirical;
  double value = 0;  ///< used by Kind::Fixed

  static AlphaMode theoretical() { return {Kind::Theoretical, 0}; }
  static AlphaMode empirical() { return {Kind::Empirical, 0}; }
  static AlphaMode fixed(double v) { return {Kind::Fixed, v}; }
  std::string describe() const;
};

struct RunConfig {
  double epsilon = 0.1;
  double delta = 0.05;
  /// Length of the exploratory phase; min(K, 3d) when unset.
  std::optional<Index> exploration_length;
  AlphaMode alpha_mode = AlphaMode::empirical();
  /// Total pull budget; the run returns its current best arm when it is hit.
  Index max_steps = 200000;
  std::uint64_t seed = 0;
  /// Radius S of the parameter ball. Defaults to ||theta|| in simulation mode.
  std::optional<double> param_bound;
  /// The likelihood iterates are kept in ||theta|| <= norm_cap_factor * S.
  double norm_cap_factor = 10.0;
  /// Check every pairwise confidence interval against the true gaps
  /// (simulation mode only; never affects control flow).
  bool track_coverage = true;
  bool check_bounds = true;
  bool keep_trace = true;
  /// Also store theta_t in each trace record.
  bool trace_theta = false;
};

void validate(const RunConfig& config, Index num_arms, Index dim);

struct RoundRecord {
  Index t;
  Index best;
  Index challenger;
  double stat;
  double width;
  Index played;  ///< -1 in the stopping round
  double reward;
  double score_norm;
  int mle_iterations;
  VectorXd theta;  ///< only with RunConfig::trace_theta
};

struct Diagnostics {
  /// Rounds in which some true gap fell outside its confidence interval.
  Index coverage_violations = 0;
  Index first_coverage_violation = -1;
  Index coverage_checks = 0;
  /// ||y||_{M^-1} <= sqrt(rho / T_y)
  Index allocation_bound_checks = 0;
  Index allocation_bound_violations = 0;
  /// ||w*||_inf <= 2 k_mu
  Index weight_bound_checks = 0;
  Index weight_bound_violations = 0;
  Index mle_failures = 0;
  Index mle_projected = 0;
  Index degenerate_directions = 0;
  Index truncated_rewards = 0;
};

struct RunResult {
  std::string algorithm;
  Index returned_arm = -1;
  Index tau = 0;  ///< total number of pulls
  bool budget_exhausted = false;
  double final_stat = 0;
  std::vector<RoundRecord> trace;
  std::vector<Index> pulls;
  std::vector<double> rewards;
  Diagnostics diagnostics;

  // Quantities fixed at the end of the exploratory phase.
  Index exploration_length = 0;
  double lambda_0 = 0;
  double kappa = 0;
  double alpha = 0;
  LinkModel<double> link;
  /// C_t at the stopping round.
  double final_width_scale = 0;
};

/// Independent generators of one run, derived from its seed.
struct RunStreams {
  Rng algorithm;
  Rng reward;
  explicit RunStreams(std::uint64_t seed) : algorithm(seed, Stream::Algorithm), reward(seed, Stream::Reward) {}
};

Index default_exploration_length(Index num_arms, Index dim);

/// Plays E = min(K, 3d) arms drawn uniformly with replacement, then keeps
/// drawing until M is nonsingular (at most 50 d extra pulls). Records
/// lambda_0 = lambda_min(M) in the returned design.
DesignState<double> exploratory_phase(const BanditInstance& env, const RunConfig& config, RunStreams& streams,
                                      RunResult* record = nullptr);

/// Parameter-ball radius used for the link constants of a run.
double resolve_param_bound(const BanditInstance& env, const RunConfig& config);

/// Runs GLGapE to its stopping time (or the pull budget).
RunResult run_glgape(const BanditInstance& env, const RunConfig& config);

}  // namespace glbai
