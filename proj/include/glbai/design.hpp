#pragma once

#include "glbai/types.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <vector>

namespace glbai {

template <typename Scalar>
struct Observation {
  Index arm;
  Vector<Scalar> x;
  Scalar reward;
};

/// Running design of a bandit run: history, M = sum x x^T, its inverse and
/// per-arm statistics. Round index t counts observations + 1.
///
/// The inverse is maintained by rank-one (Sherman-Morrison) updates once M
/// becomes nonsingular and is recomputed directly every `kRefreshPeriod`
/// updates to bound drift.
template <typename Scalar>
class DesignState {
 public:
  static constexpr int kRefreshPeriod = 256;

  DesignState(Index dim, Index num_arms)
      : m_(Matrix<Scalar>::Zero(dim, dim)),
        m_inv_(Matrix<Scalar>::Zero(dim, dim)),
        counts_(Eigen::VectorX<Index>::Zero(num_arms)),
        reward_sums_(Vector<Scalar>::Zero(num_arms)) {
    if (dim < 1) throw InvalidArgument("design dimension must be at least 1");
    if (num_arms < 1) throw InvalidArgument("design needs at least one arm");
  }

  Index dim() const { return m_.rows(); }
  Index num_arms() const { return counts_.size(); }
  /// Current round index t = number of observations + 1.
  Index round() const { return static_cast<Index>(history_.size()) + 1; }
  Index num_observations() const { return static_cast<Index>(history_.size()); }

  const Matrix<Scalar>& covariance() const { return m_; }
  const Matrix<Scalar>& inverse() const {
    if (!nonsingular_) throw SingularDesign("design matrix is singular");
    return m_inv_;
  }
  bool nonsingular() const { return nonsingular_; }
  const Eigen::VectorX<Index>& counts() const { return counts_; }
  Index count(Index arm) const { return counts_(arm); }
  const Vector<Scalar>& reward_sums() const { return reward_sums_; }
  const std::vector<Observation<Scalar>>& history() const { return history_; }

  /// Minimum eigenvalue recorded at the end of the exploratory phase.
  Scalar lambda_0() const { return lambda_0_; }
  void set_lambda_0(Scalar v) { lambda_0_ = v; }

  template <typename Derived>
  void update(Index arm, const Eigen::MatrixBase<Derived>& x, Scalar reward) {
    if (x.size() != dim())
      throw DimensionMismatch("feature row has dimension " + std::to_string(x.size()) +
                              ", design has " + std::to_string(dim()));
    if (arm < 0 || arm >= num_arms()) throw InvalidArgument("arm index out of range");
    if (!std::isfinite(static_cast<double>(reward))) throw InvalidArgument("reward must be finite");

    const Vector<Scalar> xv = x;
    m_.noalias() += xv * xv.transpose();
    counts_(arm) += 1;
    reward_sums_(arm) += reward;
    history_.push_back({arm, xv, reward});

    if (nonsingular_) {
      if (++updates_since_refresh_ >= kRefreshPeriod) {
        refresh_inverse();
      } else {
        const Vector<Scalar> u = m_inv_ * xv;
        m_inv_.noalias() -= (u * u.transpose()) / (Scalar(1) + xv.dot(u));
      }
    }
  }

  /// Re-tests nonsingularity (min eigenvalue > 1e-10 trace/d) and, when it
  /// holds, recomputes the inverse directly. Returns the flag.
  bool refresh_inverse() {
    updates_since_refresh_ = 0;
    if (!is_nonsingular(m_)) {
      nonsingular_ = false;
      return false;
    }
    m_inv_ = m_.ldlt().solve(Matrix<Scalar>::Identity(dim(), dim()));
    nonsingular_ = true;
    return true;
  }

  /// M rebuilt from the stored history.
  Matrix<Scalar> rebuild_covariance() const {
    Matrix<Scalar> m = Matrix<Scalar>::Zero(dim(), dim());
    for (const auto& obs : history_) m.noalias() += obs.x * obs.x.transpose();
    return m;
  }

  static bool is_nonsingular(const Matrix<Scalar>& m) {
    const Scalar trace = m.trace();
    if (!(trace > 0)) return false;
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0) > Scalar(1e-10) * trace / Scalar(m.rows());
  }

 private:
  Matrix<Scalar> m_;
  Matrix<Scalar> m_inv_;
  Eigen::VectorX<Index> counts_;
  Vector<Scalar> reward_sums_;
  std::vector<Observation<Scalar>> history_;
  bool nonsingular_ = false;
  int updates_since_refresh_ = 0;
  Scalar lambda_0_ = 0;
};

template <typename Scalar, typename Derived>
void design_update(DesignState<Scalar>& state, Index arm, const Eigen::MatrixBase<Derived>& x,
                   Scalar reward) {
  state.update(arm, x, reward);
}

/// ||y||_{M^{-1}}.
template <typename Scalar, typename Derived>
Scalar mahalanobis_norm(const DesignState<Scalar>& state, const Eigen::MatrixBase<Derived>& y) {
  if (y.size() != state.dim()) throw DimensionMismatch("direction dimension mismatch");
  const Scalar q = y.dot(state.inverse() * y);
  return std::sqrt(q > 0 ? q : Scalar(0));
}

template <typename Scalar>
Scalar min_eigenvalue(const Matrix<Scalar>& m) {
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

template <typename Scalar>
Scalar min_eigenvalue(const DesignState<Scalar>& state) {
  return min_eigenvalue(state.covariance());
}

}  // namespace glbai
