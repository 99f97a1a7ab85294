#pragma once

#include "glbai/design.hpp"
#include "glbai/link.hpp"

#include <cmath>
#include <numbers>

namespace glbai {

/// C_t = alpha * sqrt(2 d log t log(pi^2 d t^2 / (6 delta))).
template <typename Scalar>
struct WidthSchedule {
  Scalar alpha;
  Index dim;
  Scalar delta;
};

template <typename Scalar>
Scalar width_scale(const WidthSchedule<Scalar>& sched, Index t) {
  using std::log;
  using std::sqrt;
  if (t < 2) throw InvalidArgument("confidence width requested for round t < 2");
  const Scalar tt = static_cast<Scalar>(t);
  const Scalar d = static_cast<Scalar>(sched.dim);
  const Scalar pi2 = std::numbers::pi_v<Scalar> * std::numbers::pi_v<Scalar>;
  return sched.alpha * sqrt(Scalar(2) * d * log(tt) * log(pi2 * d * tt * tt / (Scalar(6) * sched.delta)));
}

template <typename Scalar>
struct GapInterval {
  Index i;
  Index j;
  Scalar center;
  Scalar width;

  Scalar lower() const { return center - width; }
  Scalar upper() const { return center + width; }
  bool contains(Scalar gap) const { return std::abs(gap - center) <= width; }
};

/// mu(theta^T x_i) - mu(theta^T x_j).
template <typename Scalar, typename D1, typename D2, typename D3>
Scalar gap_estimate(const Eigen::MatrixBase<D1>& theta, LinkKind kind, const Eigen::MatrixBase<D2>& x_i,
                    const Eigen::MatrixBase<D3>& x_j) {
  if (x_i.size() != theta.size() || x_j.size() != theta.size())
    throw DimensionMismatch("gap_estimate: dimension mismatch");
  return mu_eval<Scalar>(kind, theta.dot(x_i)) - mu_eval<Scalar>(kind, theta.dot(x_j));
}

template <typename Scalar>
struct CornerWidth {
  Scalar width;
  Scalar c1;
  Scalar c2;
};

/// max over (c, c') in [lo, hi]^2 of sqrt(c^2 a_ii + c'^2 a_jj - 2 c c' a_ij),
/// i.e. ||c x_i - c' x_j||_A for the Gram entries a = x^T A x. The squared
/// objective is convex in (c, c'), so only the four corners are evaluated.
/// Ties keep the lexicographically smallest corner.
template <typename Scalar>
CornerWidth<Scalar> corner_max(Scalar a_ii, Scalar a_jj, Scalar a_ij, Scalar lo, Scalar hi) {
  const Scalar corners[4][2] = {{lo, lo}, {lo, hi}, {hi, lo}, {hi, hi}};
  CornerWidth<Scalar> best{-1, lo, lo};
  Scalar best_q = -std::numeric_limits<Scalar>::infinity();
  for (const auto& c : corners) {
    const Scalar q = c[0] * c[0] * a_ii + c[1] * c[1] * a_jj - Scalar(2) * c[0] * c[1] * a_ij;
    if (q > best_q) {
      best_q = q;
      best = {0, c[0], c[1]};
    }
  }
  best.width = std::sqrt(best_q > 0 ? best_q : Scalar(0));
  return best;
}

/// beta_t(i, j) = C_t max_{c, c' in [c_mu, k_mu]} ||c x_i - c' x_j||_{M_t^{-1}},
/// with the maximizing (c1, c2).
template <typename Scalar, typename D1, typename D2>
CornerWidth<Scalar> gap_width(const LinkModel<Scalar>& link, const DesignState<Scalar>& design, Scalar c_t,
                              const Eigen::MatrixBase<D1>& x_i, const Eigen::MatrixBase<D2>& x_j) {
  if (!(link.slope_floor <= link.lipschitz)) throw InvalidArgument("slope floor exceeds Lipschitz constant");
  const Matrix<Scalar>& m_inv = design.inverse();
  const Vector<Scalar> u = m_inv * x_i;
  const Vector<Scalar> v = m_inv * x_j;
  auto cw = corner_max<Scalar>(x_i.dot(u), x_j.dot(v), x_j.dot(u), link.slope_floor, link.lipschitz);
  cw.width *= c_t;
  return cw;
}

template <typename Scalar, typename D1, typename D2, typename D3>
GapInterval<Scalar> gap_interval(const LinkModel<Scalar>& link, const DesignState<Scalar>& design,
                                 const Eigen::MatrixBase<D1>& theta, Scalar c_t, Index i, Index j,
                                 const Eigen::MatrixBase<D2>& x_i, const Eigen::MatrixBase<D3>& x_j) {
  return {i, j, gap_estimate<Scalar>(theta, link.kind, x_i, x_j), gap_width(link, design, c_t, x_i, x_j).width};
}

/// Widest corner norm max_{i,j} max_{c,c'} ||c x_i - c' x_j||_{M^{-1}} over all
/// arm pairs (i = j included).
template <typename Scalar, typename Derived>
Scalar max_pairwise_norm(const LinkModel<Scalar>& link, const DesignState<Scalar>& design,
                         const Eigen::MatrixBase<Derived>& features) {
  const Matrix<Scalar> gram = features * design.inverse() * features.transpose();
  Scalar best = 0;
  for (Index i = 0; i < gram.rows(); ++i)
    for (Index j = i; j < gram.rows(); ++j)
      best = std::max(best, corner_max<Scalar>(gram(i, i), gram(j, j), gram(i, j), link.slope_floor,
                                               link.lipschitz).width);
  return best;
}

/// alpha = 2 kappa R / c_mu, the value under which the gap confidence sets
/// hold uniformly in time with probability 1 - delta.
template <typename Scalar>
Scalar theoretical_alpha(const LinkModel<Scalar>& link, Scalar lambda_0) {
  return Scalar(2) * kappa_constant(lambda_0, link.feature_bound) * link.reward_bound / link.slope_floor;
}

/// Width multiplier that makes the widest pairwise confidence width at round
/// `round` equal to exactly 1, the natural range of a gap between logistic
/// means. Equivalent to scaling the theoretical multiplier 2 kappa R / c_mu
/// down by 1 / (2 kappa R / c_mu * C_t(alpha = 1) * max norm).
template <typename Scalar, typename Derived>
Scalar calibrate_alpha(const LinkModel<Scalar>& link, const DesignState<Scalar>& design,
                       const Eigen::MatrixBase<Derived>& features, Index round, Scalar delta) {
  if (round < 2) throw InvalidArgument("calibration round must be at least 2");
  const Scalar unit_scale = width_scale(WidthSchedule<Scalar>{1, design.dim(), delta}, round);
  const Scalar widest = max_pairwise_norm(link, design, features);
  if (!(widest > 0)) throw InvalidArgument("all pairwise confidence widths are zero");
  return Scalar(1) / (unit_scale * widest);
}

}  // namespace glbai
