#pragma once

#include "glbai/types.hpp"

#include <Eigen/LU>

#include <cmath>
#include <limits>
#include <vector>

namespace glbai {

/// Two-phase revised simplex for
///
///   min c^T x  s.t.  A x = b, x >= 0
///
/// with Bland's smallest-index rule for the entering and the leaving
/// variable, so it terminates on degenerate problems. The basis is
/// refactorized at every pivot; meant for a few dozen rows and a few hundred
/// columns.
template <typename Scalar>
class DenseSimplex {
 public:
  struct Result {
    Vector<Scalar> x;
    Scalar objective;
    int pivots;
  };

  /// Smallest admissible pivot element, relative to the column scale.
  Scalar pivot_tolerance = Scalar(1e-11);
  /// Reduced costs above -optimality_tolerance count as non-negative.
  Scalar optimality_tolerance = Scalar(1e-10);
  Scalar feasibility_tolerance = Scalar(1e-9);

  /// `hint` lists columns that phase 1 tries to bring into the basis before
  /// falling back to Bland's rule, e.g. the support of a known feasible point.
  Result solve(const Matrix<Scalar>& a, const Vector<Scalar>& b, const Vector<Scalar>& c,
               const std::vector<Index>& hint = {}) {
    m_ = a.rows();
    n_ = a.cols();
    if (b.size() != m_ || c.size() != n_) throw DimensionMismatch("simplex: inconsistent problem sizes");

    // Rows flipped so that b >= 0; artificial column n + i is e_i.
    a_ = a;
    b_ = b;
    for (Index i = 0; i < m_; ++i) {
      if (b_(i) < 0) {
        a_.row(i) *= -1;
        b_(i) *= -1;
      }
    }
    scale_ = std::max(Scalar(1), a_.cwiseAbs().maxCoeff());
    basis_.resize(m_);
    for (Index i = 0; i < m_; ++i) basis_[i] = n_ + i;
    pivots_ = 0;

    // Phase 1: minimize the sum of artificials.
    cost_ = Vector<Scalar>::Zero(n_ + m_);
    cost_.tail(m_).setOnes();
    factorize();
    for (Index col : hint) {
      if (col < 0 || col >= n_ || is_basic(col)) continue;
      if (reduced_cost(col) < -optimality_tolerance) {
        const Vector<Scalar> dir = binv_ * column(col);
        const Index row = ratio_test(dir);
        if (row >= 0) pivot(row, col);
      }
    }
    iterate(n_);
    const Scalar infeasibility = x_b_.cwiseMax(Scalar(0)).dot(basic_costs());
    if (infeasibility > feasibility_tolerance * (Scalar(1) + b_.template lpNorm<Eigen::Infinity>()))
      throw InfeasibleProgram("right-hand side is not in the range of the constraint matrix");

    // Swap zero-level artificials for original columns. A row where that is
    // impossible is redundant; its artificial stays basic at zero.
    for (Index i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      Index best = -1;
      Scalar best_abs = pivot_tolerance * scale_;
      for (Index j = 0; j < n_; ++j) {
        if (is_basic(j)) continue;
        const Scalar v = std::abs(binv_.row(i).dot(a_.col(j)));
        if (v > best_abs) {
          best_abs = v;
          best = j;
        }
      }
      if (best >= 0) pivot(i, best);
    }

    // Phase 2 on the original costs.
    cost_.head(n_) = c;
    cost_.tail(m_).setZero();
    iterate(n_);

    Result res;
    res.x = Vector<Scalar>::Zero(n_);
    for (Index i = 0; i < m_; ++i)
      if (basis_[i] < n_) res.x(basis_[i]) = std::max(x_b_(i), Scalar(0));
    res.objective = c.dot(res.x);
    res.pivots = pivots_;
    return res;
  }

 private:
  Vector<Scalar> column(Index j) const {
    if (j < n_) return a_.col(j);
    Vector<Scalar> e = Vector<Scalar>::Zero(m_);
    e(j - n_) = 1;
    return e;
  }

  bool is_basic(Index j) const {
    for (Index v : basis_)
      if (v == j) return true;
    return false;
  }

  Vector<Scalar> basic_costs() const {
    Vector<Scalar> cb(m_);
    for (Index i = 0; i < m_; ++i) cb(i) = cost_(basis_[i]);
    return cb;
  }

  void factorize() {
    Matrix<Scalar> basis_matrix(m_, m_);
    for (Index i = 0; i < m_; ++i) basis_matrix.col(i) = column(basis_[i]);
    const Eigen::PartialPivLU<Matrix<Scalar>> lu(basis_matrix);
    binv_ = lu.inverse();
    x_b_ = lu.solve(b_);
    y_ = binv_.transpose() * basic_costs();
  }

  Scalar reduced_cost(Index j) const { return cost_(j) - y_.dot(column(j)); }

  Index ratio_test(const Vector<Scalar>& dir) const {
    Index row = -1;
    Scalar best = std::numeric_limits<Scalar>::infinity();
    for (Index i = 0; i < m_; ++i) {
      if (dir(i) <= pivot_tolerance) continue;
      const Scalar ratio = std::max(x_b_(i), Scalar(0)) / dir(i);
      const Scalar tie = feasibility_tolerance * (Scalar(1) + std::abs(best));
      if (row < 0 || ratio < best - tie || (ratio <= best + tie && basis_[i] < basis_[row])) {
        best = ratio;
        row = i;
      }
    }
    return row;
  }

  void pivot(Index row, Index col) {
    basis_[row] = col;
    ++pivots_;
    factorize();
  }

  // Bland's rule over the first `allowed` columns.
  void iterate(Index allowed) {
    y_ = binv_.transpose() * basic_costs();
    const int max_pivots = 50 * static_cast<int>(m_ + n_ + 1);
    for (int it = 0; it < max_pivots; ++it) {
      Index col = -1;
      for (Index j = 0; j < allowed; ++j) {
        if (is_basic(j)) continue;
        if (reduced_cost(j) < -optimality_tolerance) {
          col = j;
          break;
        }
      }
      if (col < 0) return;
      const Vector<Scalar> dir = binv_ * column(col);
      const Index row = ratio_test(dir);
      if (row < 0) throw InfeasibleProgram("linear program is unbounded");
      pivot(row, col);
    }
    throw Error("simplex did not terminate within the pivot budget");
  }

  Matrix<Scalar> a_;
  Vector<Scalar> b_;
  Vector<Scalar> cost_;
  Matrix<Scalar> binv_;
  Vector<Scalar> x_b_;
  Vector<Scalar> y_;
  std::vector<Index> basis_;
  Scalar scale_ = 1;
  Index n_ = 0;
  Index m_ = 0;
  int pivots_ = 0;
};

}  // namespace glbai
