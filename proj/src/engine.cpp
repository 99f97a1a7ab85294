#include "glbai/engine.hpp"

#include "glbai/confidence.hpp"
#include "glbai/mle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace glbai {

std::string AlphaMode::describe() const {
  switch (kind) {
    case Kind::Theoretical: return "theoretical";
    case Kind::Empirical: return "empirical";
    case Kind::Fixed: return std::to_string(value);
  }
  return "?";
}

void validate(const RunConfig& config, Index num_arms, Index dim) {
  if (num_arms < 2) throw InvalidArgument("K must be at least 2");
  if (!(config.epsilon > 0)) throw InvalidArgument("epsilon must be positive");
  if (!(config.delta > 0 && config.delta < 1)) throw InvalidArgument("delta must lie in (0, 1)");
  if (config.alpha_mode.kind == AlphaMode::Kind::Fixed && !(config.alpha_mode.value > 0))
    throw InvalidArgument("explicit alpha must be positive");
  if (config.exploration_length && *config.exploration_length < 1)
    throw InvalidArgument("exploration length must be at least 1");
  const Index e = config.exploration_length.value_or(default_exploration_length(num_arms, dim));
  if (config.max_steps < e + 1) throw InvalidArgument("max_steps must be at least E + 1");
  if (config.param_bound && !(*config.param_bound > 0)) throw InvalidArgument("param_bound must be positive");
}

Index default_exploration_length(Index num_arms, Index dim) { return std::min(num_arms, 3 * dim); }

DesignState<double> exploratory_phase(const BanditInstance& env, const RunConfig& config, RunStreams& streams,
                                      RunResult* record) {
  const Index k = env.num_arms();
  const Index d = env.dim();
  if (k < 2) throw InvalidArgument("K must be at least 2");
  DesignState<double> design(d, k);

  const auto play = [&] {
    const Index arm = static_cast<Index>(streams.algorithm.uniform_index(static_cast<std::uint64_t>(k)));
    const RewardDraw draw = pull_arm(env, arm, streams.reward);
    design.update(arm, env.features.row(arm).transpose(), draw.reward);
    if (record) {
      record->pulls.push_back(arm);
      record->rewards.push_back(draw.reward);
      if (draw.truncated) ++record->diagnostics.truncated_rewards;
    }
  };

  const Index e = config.exploration_length.value_or(default_exploration_length(k, d));
  for (Index n = 0; n < e; ++n) play();
  Index extra = 0;
  while (!design.refresh_inverse()) {
    if (extra >= 50 * d) {
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(design.covariance(), Eigen::EigenvaluesOnly);
      const double tol = 1e-10 * std::max(design.covariance().trace(), 1e-300) / static_cast<double>(d);
      const Index rank = (es.eigenvalues().array() > tol).count();
      throw RankDeficient("exploratory phase: arm features span only " + std::to_string(rank) + " of " +
                              std::to_string(d) + " dimensions",
                          rank, d);
    }
    play();
    ++extra;
  }
  design.set_lambda_0(min_eigenvalue(design));
  return design;
}

double resolve_param_bound(const BanditInstance& env, const RunConfig& config) {
  if (config.param_bound) return *config.param_bound;
  if (env.theta) {
    const double n = env.theta->norm();
    return n > 0 ? n : 1.0;
  }
  throw InvalidArgument("param_bound is required when the hidden parameter is unknown");
}

namespace {

// True when some pair (i, j) has |Delta(i, j) - Delta_t(i, j)| > beta_t(i, j).
bool coverage_violated(const BanditInstance& env, const LinkModel<double>& link, const DesignState<double>& design,
                       const VectorXd& theta, double c_t) {
  const MatrixXd gram = env.features * design.inverse() * env.features.transpose();
  const VectorXd z = env.features * theta;
  const Index k = env.num_arms();
  VectorXd est(k);
  for (Index a = 0; a < k; ++a) est(a) = mu_eval(link.kind, z(a));
  for (Index i = 0; i < k; ++i) {
    for (Index j = i + 1; j < k; ++j) {
      const double width =
          c_t * corner_max<double>(gram(i, i), gram(j, j), gram(i, j), link.slope_floor, link.lipschitz).width;
      const double err = std::abs((env.means(i) - env.means(j)) - (est(i) - est(j)));
      if (err > width * (1.0 + 1e-12) + 1e-15) return true;
    }
  }
  return false;
}

}  // namespace

RunResult run_glgape(const BanditInstance& env, const RunConfig& config) {
  const Index k = env.num_arms();
  const Index d = env.dim();
  validate(config, k, d);

  RunResult result;
  result.algorithm = "glgape";
  RunStreams streams(config.seed);
  DesignState<double> design = exploratory_phase(env, config, streams, &result);
  result.exploration_length = design.num_observations();

  const double s = resolve_param_bound(env, config);
  const LinkModel<double> link = model_constants<double>(env.link, s, env.features, env.reward_bound);
  result.link = link;
  result.lambda_0 = design.lambda_0();
  result.kappa = kappa_constant(design.lambda_0(), link.feature_bound);
  switch (config.alpha_mode.kind) {
    case AlphaMode::Kind::Theoretical:
      result.alpha = theoretical_alpha(link, design.lambda_0());
      break;
    case AlphaMode::Kind::Empirical:
      result.alpha = calibrate_alpha(link, design, env.features, design.round(), config.delta);
      break;
    case AlphaMode::Kind::Fixed:
      result.alpha = config.alpha_mode.value;
      break;
  }
  const WidthSchedule<double> sched{result.alpha, d, config.delta};

  MleOptions<double> mle_opts;
  mle_opts.norm_cap = config.norm_cap_factor * s;
  const bool ground_truth = env.has_ground_truth();
  const Index coverage_from = std::max<Index>(2, d);  // checked for t > max(2, d)

  std::optional<VectorXd> warm;
  Diagnostics& diag = result.diagnostics;
  while (true) {
    const Index t = design.round();

    const GlmSample<double> sample = GlmSample<double>::from_design(env.features, design);
    MleSolution<double> fit;
    try {
      fit = fit_mle(sample, link.kind, warm, mle_opts);
    } catch (const MleError<double>& warm_error) {
      // retry from the origin
      try {
        fit = fit_mle<double>(sample, link.kind, std::nullopt, mle_opts);
      } catch (const MleError<double>& cold_error) {
        const auto& a = warm_error.best();
        const auto& b = cold_error.best();
        fit = log_likelihood(sample, link.kind, a.theta) >= log_likelihood(sample, link.kind, b.theta) ? a : b;
        ++diag.mle_failures;
      }
    }
    if (fit.projected) ++diag.mle_projected;
    warm = fit.theta;

    const double c_t = width_scale(sched, t);
    const GapCertificate<double> cert = select_gap(fit.theta, link, design, c_t, env.features);

    if (ground_truth && config.track_coverage && t > coverage_from) {
      ++diag.coverage_checks;
      if (coverage_violated(env, link, design, fit.theta, c_t)) {
        if (diag.coverage_violations == 0) diag.first_coverage_violation = t;
        ++diag.coverage_violations;
      }
    }

    RoundRecord rec{t, cert.best, cert.challenger, cert.stat, cert.width, -1, 0.0, fit.score_norm,
                    fit.iterations, config.trace_theta ? fit.theta : VectorXd()};

    const bool stop = cert.stat <= config.epsilon;
    if (stop || design.num_observations() >= config.max_steps) {
      result.returned_arm = cert.best;
      result.budget_exhausted = !stop;
      result.final_stat = cert.stat;
      result.final_width_scale = c_t;
      if (config.keep_trace) result.trace.push_back(std::move(rec));
      break;
    }

    Index arm;
    if (cert.direction.isZero(0)) {
      ++diag.degenerate_directions;
      const Index i = cert.best, j = cert.challenger;
      const Index lo = std::min(i, j), hi = std::max(i, j);
      arm = design.count(hi) < design.count(lo) ? hi : lo;
    } else {
      const std::vector<std::pair<Index, double>> hint{{cert.best, cert.c1}, {cert.challenger, -cert.c2}};
      const Allocation<double> alloc = solve_direction_lp(env.features, cert.direction, hint);
      if (config.check_bounds) {
        ++diag.weight_bound_checks;
        if (alloc.weights.lpNorm<Eigen::Infinity>() > 2.0 * link.lipschitz * (1.0 + 1e-9))
          ++diag.weight_bound_violations;
        double t_y = std::numeric_limits<double>::infinity();
        for (Index a = 0; a < k; ++a)
          if (alloc.probabilities(a) > 0)
            t_y = std::min(t_y, static_cast<double>(design.count(a)) / alloc.probabilities(a));
        if (t_y > 0) {
          ++diag.allocation_bound_checks;
          if (mahalanobis_norm(design, cert.direction) > std::sqrt(alloc.rho / t_y) * (1.0 + 1e-9))
            ++diag.allocation_bound_violations;
        }
      }
      arm = select_arm(alloc, design.counts());
    }

    const RewardDraw draw = pull_arm(env, arm, streams.reward);
    if (draw.truncated) ++diag.truncated_rewards;
    design.update(arm, env.features.row(arm).transpose(), draw.reward);
    result.pulls.push_back(arm);
    result.rewards.push_back(draw.reward);
    rec.played = arm;
    rec.reward = draw.reward;
    if (config.keep_trace) result.trace.push_back(std::move(rec));
  }

  result.tau = static_cast<Index>(result.pulls.size());
  return result;
}

}  // namespace glbai
