#include "glbai/gape.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace glbai {

double gape_exploration_scale(double reward_bound, Index num_arms, Index t, double delta) {
  const double tt = static_cast<double>(t);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  return 0.5 * reward_bound * reward_bound *
         std::log(2.0 * static_cast<double>(num_arms) * tt * tt * pi2 / (6.0 * delta));
}

RunResult run_gape(const BanditInstance& env, double epsilon, double delta, Index max_steps, std::uint64_t seed,
                   bool keep_trace) {
  const Index k = env.num_arms();
  if (k < 2) throw InvalidArgument("GapE needs at least two arms");
  if (env.link != LinkKind::Logistic) throw InvalidArgument("GapE requires binary (logistic) rewards");
  if (!(epsilon > 0)) throw InvalidArgument("epsilon must be positive");
  if (!(delta > 0 && delta < 1)) throw InvalidArgument("delta must lie in (0, 1)");
  if (max_steps < k + 1) throw InvalidArgument("max_steps must be at least K + 1");

  RunResult result;
  result.algorithm = "gape";
  result.exploration_length = k;
  RunStreams streams(seed);
  const double r = env.reward_bound;

  std::vector<double> sums(k, 0.0);
  std::vector<Index> counts(k, 0);
  const auto play = [&](Index arm) {
    const RewardDraw draw = pull_arm(env, arm, streams.reward);
    sums[arm] += draw.reward;
    ++counts[arm];
    result.pulls.push_back(arm);
    result.rewards.push_back(draw.reward);
    return draw.reward;
  };
  for (Index a = 0; a < k; ++a) play(a);

  std::vector<double> means(k), widths(k);
  while (true) {
    const Index t = static_cast<Index>(result.pulls.size()) + 1;
    const double scale = gape_exploration_scale(r, k, t, delta);
    Index best = 0;
    for (Index a = 0; a < k; ++a) {
      means[a] = sums[a] / static_cast<double>(counts[a]);
      widths[a] = std::sqrt(scale / static_cast<double>(counts[a]));
      if (means[a] > means[best]) best = a;
    }
    Index challenger = -1;
    double stat = -std::numeric_limits<double>::infinity();
    double runner_up = -std::numeric_limits<double>::infinity();
    for (Index a = 0; a < k; ++a) {
      if (a == best) continue;
      runner_up = std::max(runner_up, means[a]);
      const double v = means[a] - means[best] + widths[a] + widths[best];
      if (v > stat) {
        stat = v;
        challenger = a;
      }
    }

    RoundRecord rec{t, best, challenger, stat, widths[best], -1, 0.0, 0.0, 0, {}};
    const bool stop = stat <= epsilon;
    if (stop || static_cast<Index>(result.pulls.size()) >= max_steps) {
      result.returned_arm = best;
      result.budget_exhausted = !stop;
      result.final_stat = stat;
      if (keep_trace) result.trace.push_back(std::move(rec));
      break;
    }

    Index arm = 0;
    double index = -std::numeric_limits<double>::infinity();
    for (Index a = 0; a < k; ++a) {
      const double gap = a == best ? means[best] - runner_up : means[best] - means[a];
      const double v = -gap + widths[a];
      if (v > index) {
        index = v;
        arm = a;
      }
    }
    rec.played = arm;
    rec.reward = play(arm);
    if (keep_trace) result.trace.push_back(std::move(rec));
  }
  result.tau = static_cast<Index>(result.pulls.size());
  return result;
}

}  // namespace glbai
