#pragma once

#include "glbai/link.hpp"
#include "glbai/rng.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace glbai {

/// Arms of a generalized linear bandit. With a hidden parameter (simulation
/// mode) the instance knows its means and can generate rewards; a
/// features-only instance carries no ground truth.
struct BanditInstance {
  MatrixXd features;  ///< K x d, one arm per row
  LinkKind link = LinkKind::Logistic;
  std::optional<VectorXd> theta;
  VectorXd means;  ///< empty without ground truth
  std::vector<std::string> arm_ids;
  /// Rewards are clipped to |r| <= reward_bound (poisson, identity).
  double reward_bound = 1.0;
  /// Half-width of the uniform noise of identity-link rewards.
  double noise_sigma = 0.0;

  Index num_arms() const { return features.rows(); }
  Index dim() const { return features.cols(); }
  bool has_ground_truth() const { return theta.has_value(); }
};

struct InstanceOptions {
  std::optional<double> reward_bound;
  double noise_sigma = 0.1;
};

/// Builds an instance and its means. Default reward bounds: 1 (logistic),
/// max|mu| + sigma (identity), max mu + 6 sqrt(max mu) + 6 (poisson).
BanditInstance make_instance(MatrixXd features, std::optional<VectorXd> theta, LinkKind link,
                             const InstanceOptions& options = {});

/// theta ~ N(0, I_d), feature entries iid uniform on [-1, 1].
BanditInstance sample_instance(Index num_arms, Index dim, LinkKind link, Rng& rng,
                               const InstanceOptions& options = {});

struct RewardDraw {
  double reward;
  bool truncated;
};

/// Logistic: Bernoulli(mu_a). Poisson: Poisson(mu_a) truncated at the reward
/// bound. Identity: mu_a + U[-sigma, sigma], clipped to the reward bound.
RewardDraw pull_arm(const BanditInstance& instance, Index arm, Rng& rng);

struct InstanceStats {
  Index best_arm;
  VectorXd optimal_gaps;
  double delta_min;
};

InstanceStats instance_stats(const VectorXd& means);
InstanceStats instance_stats(const BanditInstance& instance);

/// Features CSV: header `arm_id,f1,...,fd`, one row per arm. Theta CSV: an
/// optional `f1,...,fd` header followed by one row of d values.
BanditInstance load_instance_csv(const std::filesystem::path& features_path,
                                 const std::optional<std::filesystem::path>& theta_path, LinkKind link,
                                 const InstanceOptions& options = {});

void write_instance_csv(const BanditInstance& instance, const std::filesystem::path& features_path,
                        const std::optional<std::filesystem::path>& theta_path);

}  // namespace glbai
