#pragma once

#include "glbai/confidence.hpp"
#include "glbai/simplex.hpp"

#include <vector>

namespace glbai {

template <typename Scalar>
struct GapCertificate {
  Index best;        ///< i_t, the empirically best arm
  Index challenger;  ///< j_t, the most ambiguous alternative
  Scalar stat;       ///< B(t) = Delta_t(j_t, i_t) + beta_t(i_t, j_t)
  Scalar gap;        ///< Delta_t(j_t, i_t)
  Scalar width;      ///< beta_t(i_t, j_t)
  Scalar c1;
  Scalar c2;
  Vector<Scalar> direction;  ///< y_t = c1 x^{i_t} - c2 x^{j_t}
};

/// Empirical best arm and the challenger with the largest pessimistic
/// advantage over it. Ties go to the lowest index.
template <typename Scalar, typename D1, typename D2>
GapCertificate<Scalar> select_gap(const Eigen::MatrixBase<D1>& theta, const LinkModel<Scalar>& link,
                                  const DesignState<Scalar>& design, Scalar c_t,
                                  const Eigen::MatrixBase<D2>& features) {
  const Index k = features.rows();
  if (k < 2) throw InvalidArgument("select_gap needs at least two arms");
  if (features.cols() != theta.size()) throw DimensionMismatch("select_gap: dimension mismatch");

  const Vector<Scalar> z = features * theta;
  Vector<Scalar> means(k);
  for (Index a = 0; a < k; ++a) means(a) = mu_eval(link.kind, z(a));
  Index best = 0;
  for (Index a = 1; a < k; ++a)
    if (means(a) > means(best)) best = a;

  const Matrix<Scalar>& m_inv = design.inverse();
  const Matrix<Scalar> xm = features * m_inv;
  const Vector<Scalar> diag = xm.cwiseProduct(features).rowwise().sum();
  const Vector<Scalar> cross = xm * features.row(best).transpose();

  GapCertificate<Scalar> cert{best, -1, -std::numeric_limits<Scalar>::infinity(), 0, 0, 0, 0, {}};
  for (Index j = 0; j < k; ++j) {
    if (j == best) continue;
    const auto cw = corner_max<Scalar>(diag(best), diag(j), cross(j), link.slope_floor, link.lipschitz);
    const Scalar gap = means(j) - means(best);
    const Scalar width = c_t * cw.width;
    if (gap + width > cert.stat) cert = {best, j, gap + width, gap, width, cw.c1, cw.c2, {}};
  }
  cert.direction = cert.c1 * features.row(best).transpose() - cert.c2 * features.row(cert.challenger).transpose();
  return cert;
}

template <typename Scalar>
struct Allocation {
  Vector<Scalar> weights;        ///< w*, a minimum-l1 representation of y
  Vector<Scalar> probabilities;  ///< p_a = |w*_a| / rho
  Scalar rho = 0;                ///< ||w*||_1
};

/// min ||w||_1 s.t. sum_a w_a x^a = y, via the split w = u - v, u, v >= 0.
/// `hint` is an optional set of arms known to represent y (phase 1 tries
/// their columns first).
template <typename D1, typename D2, typename Scalar = typename D1::Scalar>
Allocation<Scalar> solve_direction_lp(const Eigen::MatrixBase<D1>& features, const Eigen::MatrixBase<D2>& y,
                                      const std::vector<std::pair<Index, Scalar>>& hint = {}) {
  const Index k = features.rows();
  const Index d = features.cols();
  if (y.size() != d) throw DimensionMismatch("direction has the wrong dimension");

  Allocation<Scalar> alloc;
  if (y.isZero(0)) {
    alloc.weights = Vector<Scalar>::Zero(k);
    alloc.probabilities = Vector<Scalar>::Zero(k);
    return alloc;
  }

  Matrix<Scalar> a(d, 2 * k);
  a.leftCols(k) = features.transpose();
  a.rightCols(k) = -features.transpose();
  const Vector<Scalar> c = Vector<Scalar>::Ones(2 * k);
  std::vector<Index> cols;
  for (const auto& [arm, w] : hint) cols.push_back(w >= 0 ? arm : arm + k);

  DenseSimplex<Scalar> lp;
  const auto res = lp.solve(a, Vector<Scalar>(y), c, cols);
  alloc.weights = res.x.head(k) - res.x.tail(k);
  // zero out round-off weights
  const Scalar floor = Scalar(1e-12) * alloc.weights.template lpNorm<1>();
  for (Index a = 0; a < k; ++a)
    if (std::abs(alloc.weights(a)) <= floor) alloc.weights(a) = 0;
  alloc.rho = alloc.weights.template lpNorm<1>();
  alloc.probabilities = alloc.weights.cwiseAbs() / alloc.rho;
  return alloc;
}

/// argmin over {a : p_a > 0} of T_a / p_a, lowest index on ties.
template <typename Scalar, typename CountVec>
Index select_arm(const Allocation<Scalar>& alloc, const CountVec& counts) {
  const Index k = alloc.probabilities.size();
  if (static_cast<Index>(counts.size()) != k) throw DimensionMismatch("select_arm: counts size mismatch");
  Index arm = -1;
  Scalar best = std::numeric_limits<Scalar>::infinity();
  for (Index a = 0; a < k; ++a) {
    const Scalar p = alloc.probabilities(a);
    if (!(p > 0)) continue;
    const Scalar ratio = static_cast<Scalar>(counts[a]) / p;
    if (arm < 0 || ratio < best) {
      best = ratio;
      arm = a;
    }
  }
  if (arm < 0) throw InvalidArgument("allocation has no arm with positive probability");
  return arm;
}

}  // namespace glbai
