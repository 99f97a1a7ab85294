#pragma once

#include "glbai/engine.hpp"

namespace glbai {

/// Gap-based exploration for independent arms with binary rewards. Features
/// are never read: only arm indices and observed rewards.
///
/// Each arm is pulled once; then, with empirical means m and counts T, the
/// width of arm k at round t is b_k = sqrt(a_t / T_k) with the anytime
/// Hoeffding scale a_t = (R^2 / 2) ln(2 K t^2 pi^2 / (6 delta)). The arm
/// maximizing -gap_k + b_k is pulled until the empirical best arm's
/// pessimistic gap max_j (m_j - m_best + b_j + b_best) is at most epsilon.
RunResult run_gape(const BanditInstance& env, double epsilon, double delta, Index max_steps, std::uint64_t seed,
                   bool keep_trace = true);

/// Exploration scale a_t of the widths above.
double gape_exploration_scale(double reward_bound, Index num_arms, Index t, double delta);

}  // namespace glbai
