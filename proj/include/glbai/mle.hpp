#pragma once

#include "glbai/design.hpp"
#include "glbai/link.hpp"

#include <limits>
#include <optional>
#include <vector>

namespace glbai {

/// Weighted GLM sample: row l of `features` was observed `counts(l)` times with
/// total reward `reward_sums(l)`. A plain history has all counts equal to one.
template <typename Scalar>
struct GlmSample {
  Matrix<Scalar> features;
  Vector<Scalar> counts;
  Vector<Scalar> reward_sums;

  Index size() const { return features.rows(); }
  Index dim() const { return features.cols(); }

  static GlmSample from_history(const std::vector<Observation<Scalar>>& history) {
    if (history.empty()) throw InvalidArgument("history is empty");
    const Index d = history.front().x.size();
    GlmSample s{Matrix<Scalar>(history.size(), d), Vector<Scalar>::Ones(history.size()),
                Vector<Scalar>(history.size())};
    for (std::size_t l = 0; l < history.size(); ++l) {
      if (history[l].x.size() != d) throw DimensionMismatch("ragged history");
      s.features.row(l) = history[l].x.transpose();
      s.reward_sums(l) = history[l].reward;
    }
    return s;
  }

  template <typename Derived>
  static GlmSample from_design(const Eigen::MatrixBase<Derived>& arm_features,
                               const DesignState<Scalar>& design) {
    if (arm_features.rows() != design.num_arms() || arm_features.cols() != design.dim())
      throw DimensionMismatch("arm features do not match the design");
    return GlmSample{arm_features, design.counts().template cast<Scalar>(), design.reward_sums()};
  }
};

template <typename Scalar>
struct MleOptions {
  /// Iterates are kept inside ||theta|| <= norm_cap.
  Scalar norm_cap = std::numeric_limits<Scalar>::infinity();
  int max_iterations = 100;
  Scalar score_tolerance = Scalar(1e-6);
  int max_halvings = 30;
};

template <typename Scalar>
struct MleSolution {
  Vector<Scalar> theta;
  Scalar score_norm = 0;
  int iterations = 0;
  bool projected = false;
  /// Log-likelihood after each accepted step, starting with the initial point.
  std::vector<Scalar> objective_trace;
};

/// Thrown when the iteration cannot reach the score tolerance. Carries the
/// best iterate seen.
template <typename Scalar>
class MleError : public Error {
 public:
  MleError(const std::string& what, MleSolution<Scalar> best) : Error(what), best_(std::move(best)) {}
  const MleSolution<Scalar>& best() const { return best_; }

 private:
  MleSolution<Scalar> best_;
};

template <typename Scalar>
Scalar log_likelihood(const GlmSample<Scalar>& sample, LinkKind kind, const Vector<Scalar>& theta) {
  const Vector<Scalar> z = sample.features * theta;
  Scalar ll = 0;
  for (Index l = 0; l < sample.size(); ++l) {
    if (sample.counts(l) == 0) continue;
    ll += sample.reward_sums(l) * z(l) - sample.counts(l) * log_partition(kind, z(l));
  }
  return ll;
}

template <typename Scalar>
Vector<Scalar> score(const GlmSample<Scalar>& sample, LinkKind kind, const Vector<Scalar>& theta) {
  const Vector<Scalar> z = sample.features * theta;
  Vector<Scalar> resid(sample.size());
  for (Index l = 0; l < sample.size(); ++l)
    resid(l) = sample.reward_sums(l) - sample.counts(l) * mu_eval(kind, z(l));
  return sample.features.transpose() * resid;
}

/// Solves sum_l (r_l - mu(theta^T x_l)) x_l = 0 by damped Newton iteration on
/// the canonical-link log-likelihood. Steps are halved until the
/// log-likelihood does not decrease. Iterates leaving the norm cap are
/// rescaled onto it and the solution is then marked `projected`.
template <typename Scalar>
MleSolution<Scalar> fit_mle(const GlmSample<Scalar>& sample, LinkKind kind,
                            const std::optional<Vector<Scalar>>& warm_start = std::nullopt,
                            const MleOptions<Scalar>& options = {}) {
  const Index d = sample.dim();
  if (sample.size() == 0 || sample.counts.sum() <= 0) throw InvalidArgument("history is empty");
  if (sample.counts.size() != sample.size() || sample.reward_sums.size() != sample.size())
    throw DimensionMismatch("sample counts/rewards do not match its rows");

  const auto project = [&](Vector<Scalar>& theta) {
    const Scalar n = theta.norm();
    if (n > options.norm_cap) {
      theta *= options.norm_cap / n;
      return true;
    }
    return false;
  };

  MleSolution<Scalar> sol;
  sol.theta = warm_start.value_or(Vector<Scalar>::Zero(d));
  if (sol.theta.size() != d) throw DimensionMismatch("warm start has the wrong dimension");
  sol.projected = project(sol.theta);

  Scalar ll = log_likelihood(sample, kind, sol.theta);
  sol.objective_trace.push_back(ll);
  Vector<Scalar> g = score(sample, kind, sol.theta);
  sol.score_norm = g.norm();

  bool on_boundary = sol.projected;
  while (sol.score_norm > options.score_tolerance && sol.iterations < options.max_iterations) {
    const Vector<Scalar> z = sample.features * sol.theta;
    Vector<Scalar> w(sample.size());
    for (Index l = 0; l < sample.size(); ++l) w(l) = sample.counts(l) * mu_derivative(kind, z(l));
    const Matrix<Scalar> hessian = sample.features.transpose() * w.asDiagonal() * sample.features;
    Eigen::LDLT<Matrix<Scalar>> ldlt(hessian);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || !(ldlt.vectorD().minCoeff() > 0))
      throw MleError<Scalar>("singular Hessian in likelihood iteration", sol);
    const Vector<Scalar> step = ldlt.solve(g);
    ++sol.iterations;

    Scalar scale = 1;
    bool accepted = false;
    bool clipped = false;
    Vector<Scalar> candidate;
    Scalar ll_candidate = ll;
    for (int h = 0; h <= options.max_halvings; ++h, scale /= 2) {
      candidate = sol.theta + scale * step;
      clipped = project(candidate);
      ll_candidate = log_likelihood(sample, kind, candidate);
      if (ll_candidate >= ll) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;

    const Scalar moved = (candidate - sol.theta).norm();
    sol.theta = candidate;
    ll = ll_candidate;
    sol.objective_trace.push_back(ll);
    g = score(sample, kind, sol.theta);
    sol.score_norm = g.norm();
    on_boundary = clipped;
    if (clipped) sol.projected = true;
    if (moved <= Scalar(1e-12) * (Scalar(1) + sol.theta.norm())) break;
  }

  if (sol.score_norm <= options.score_tolerance) return sol;
  if (on_boundary) {
    sol.projected = true;
    return sol;
  }
  throw MleError<Scalar>("likelihood iteration did not reach the score tolerance (|score| = " +
                             std::to_string(static_cast<double>(sol.score_norm)) + ")",
                         sol);
}

}  // namespace glbai
