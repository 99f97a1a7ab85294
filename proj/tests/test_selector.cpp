#include "glbai/selector.hpp"
#include "test_support.hpp"

using namespace glbai;
using oracle::design_from;

namespace {

LinkModel<double> logistic_box(double lo) {
  LinkModel<double> link;
  link.slope_floor = lo;
  link.lipschitz = 0.25;
  return link;
}

}  // namespace

TEST_CASE("LP on the standard basis") {
  const MatrixXd e = MatrixXd::Identity(4, 4);
  const auto a = solve_direction_lp(e, VectorXd::Unit(4, 0));
  CHECK(test::max_abs(a.weights - VectorXd::Unit(4, 0)) < 1e-12);
  CHECK(a.rho == doctest::Approx(1.0));
  CHECK(a.probabilities(0) == doctest::Approx(1.0));

  const VectorXd y = (VectorXd(4) << 2, -3, 0, 0).finished();
  const auto b = solve_direction_lp(e, y);
  CHECK(test::max_abs(b.weights - y) < 1e-12);
  CHECK(b.rho == doctest::Approx(5.0));
  CHECK(b.probabilities(0) == doctest::Approx(0.4));
  CHECK(b.probabilities(1) == doctest::Approx(0.6));
  CHECK(b.probabilities(2) == 0.0);
}

TEST_CASE("LP optimum equals basic-solution enumeration") {
  Rng rng(31337);
  for (int trial = 0; trial < 200; ++trial) {
    const Index d = 1 + static_cast<Index>(rng.uniform_index(3));
    const Index k = d + static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(7 - d)));
    const MatrixXd x = test::random_matrix(rng, k, d);
    const VectorXd y = test::random_vector(rng, d, -2, 2);
    const auto alloc = solve_direction_lp(x, y);
    const double oracle = oracle::l1_min_by_enumeration(x, y);
    CHECK(alloc.rho == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(test::max_abs(x.transpose() * alloc.weights - y) <= 1e-8);
    CHECK(alloc.probabilities.sum() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(alloc.probabilities.minCoeff() >= 0.0);
  }
}

TEST_CASE("LP invariants on larger instances") {
  Rng rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const Index d = 2 + static_cast<Index>(rng.uniform_index(9));
    const Index k = d + static_cast<Index>(rng.uniform_index(60));
    const MatrixXd x = test::random_matrix(rng, k, d);
    const Index i = static_cast<Index>(rng.uniform_index(k));
    const Index j = (i + 1) % k;
    const double c1 = rng.uniform(0.05, 0.25), c2 = rng.uniform(0.05, 0.25);
    const VectorXd y = c1 * x.row(i).transpose() - c2 * x.row(j).transpose();
    const std::vector<std::pair<Index, double>> hint{{i, c1}, {j, -c2}};
    const auto alloc = solve_direction_lp(x, y, hint);
    CHECK(test::max_abs(x.transpose() * alloc.weights - y) <= 1e-8);
    // The two-arm representation is feasible, so it bounds the optimum.
    CHECK(alloc.rho <= c1 + c2 + 1e-12);
    CHECK(alloc.weights.lpNorm<Eigen::Infinity>() <= 2 * 0.25);
    CHECK(alloc.probabilities.sum() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(solve_direction_lp(x, y).rho == doctest::Approx(alloc.rho).epsilon(1e-9));

    const auto scaled = solve_direction_lp(x, (3.5 * y).eval());
    CHECK(scaled.rho == doctest::Approx(3.5 * alloc.rho).epsilon(1e-9));
    CHECK(test::max_abs(scaled.probabilities - alloc.probabilities) <= 1e-8);
  }
}

TEST_CASE("LP errors and degenerate input") {
  MatrixXd x(2, 2);
  x << 1, 1, 2, 2;
  CHECK_THROWS_AS(solve_direction_lp(x, Eigen::Vector2d(1, 0)), InfeasibleProgram);
  CHECK_THROWS_AS(solve_direction_lp(x, Eigen::Vector3d(1, 0, 0)), DimensionMismatch);
  const auto zero = solve_direction_lp(x, Eigen::Vector2d(0, 0));
  CHECK(zero.rho == 0.0);
  CHECK(zero.weights.isZero(0));
  // Rank-deficient but consistent: y on the span.
  const auto on_span = solve_direction_lp(x, Eigen::Vector2d(3, 3));
  CHECK(on_span.rho == doctest::Approx(1.5));
}

TEST_CASE("select_arm") {
  Allocation<double> a;
  a.probabilities = Eigen::Vector2d(0.5, 0.5);
  CHECK(select_arm(a, std::vector<int>{3, 5}) == 0);
  CHECK(select_arm(a, std::vector<int>{4, 4}) == 0);
  CHECK(select_arm(a, std::vector<int>{9, 4}) == 1);
  a.probabilities = Eigen::Vector2d(0, 1);
  CHECK(select_arm(a, std::vector<int>{0, 1000}) == 1);
  a.probabilities = Eigen::Vector2d(0, 0);
  CHECK_THROWS_AS(select_arm(a, std::vector<int>{1, 1}), InvalidArgument);
  CHECK_THROWS_AS(select_arm(a, std::vector<int>{1}), DimensionMismatch);
}

TEST_CASE("select_gap, two arms") {
  const auto s = design_from(MatrixXd::Identity(2, 2));
  MatrixXd x(2, 2);
  x << 1, 0, 0, 1;
  const auto cert = select_gap(Eigen::Vector2d(-0.5, 0.3), logistic_box(0.1), s, 1.0, x);
  CHECK(cert.best == 1);
  CHECK(cert.challenger == 0);
}

TEST_CASE("select_gap with zero width") {
  Rng rng(3);
  const MatrixXd x = test::random_matrix(rng, 6, 3);
  const auto s = design_from(test::random_spd(rng, 3));
  const VectorXd th = test::normal_vector(rng, 3);
  const auto cert = select_gap(th, logistic_box(0.1), s, 0.0, x);
  VectorXd mu(6);
  for (Index a = 0; a < 6; ++a) mu(a) = mu_eval(LinkKind::Logistic, x.row(a).dot(th));
  Index best;
  mu.maxCoeff(&best);
  double smallest = INFINITY;
  for (Index a = 0; a < 6; ++a)
    if (a != best) smallest = std::min(smallest, mu(best) - mu(a));
  CHECK(cert.best == best);
  CHECK(cert.stat == doctest::Approx(-smallest).epsilon(1e-12));
  CHECK(cert.stat < 0);
}

TEST_CASE("select_gap equals an exhaustive scan") {
  Rng rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    const Index k = 5, d = 3;
    const MatrixXd x = test::random_matrix(rng, k, d);
    const auto s = design_from(test::random_spd(rng, d));
    const VectorXd th = test::normal_vector(rng, d);
    const auto link = logistic_box(rng.uniform(0.02, 0.2));
    const double c_t = rng.uniform(0.1, 3.0);
    const auto cert = select_gap(th, link, s, c_t, x);

    Index best = 0;
    for (Index a = 1; a < k; ++a)
      if (mu_eval(LinkKind::Logistic, x.row(a).dot(th)) > mu_eval(LinkKind::Logistic, x.row(best).dot(th))) best = a;
    Index arg = -1;
    double stat = -INFINITY, c1 = 0, c2 = 0;
    for (Index j = 0; j < k; ++j) {
      if (j == best) continue;
      const VectorXd xi = x.row(best).transpose(), xj = x.row(j).transpose();
      const auto w = gap_width(link, s, c_t, xi, xj);
      const double b = gap_estimate<double>(th, LinkKind::Logistic, xj, xi) + w.width;
      if (b > stat) {
        stat = b;
        arg = j;
        c1 = w.c1;
        c2 = w.c2;
      }
    }
    CHECK(cert.best == best);
    CHECK(cert.challenger == arg);
    CHECK(cert.challenger != cert.best);
    CHECK(cert.stat == doctest::Approx(stat).epsilon(1e-12));
    CHECK(cert.stat == doctest::Approx(cert.gap + cert.width).epsilon(1e-12));
    const VectorXd y = c1 * x.row(best).transpose() - c2 * x.row(arg).transpose();
    CHECK(test::max_abs(cert.direction - y) <= 1e-14);
  }
  CHECK_THROWS_AS(select_gap(Eigen::Vector2d(0, 0), logistic_box(0.1), design_from(MatrixXd::Identity(2, 2)), 1.0,
                             MatrixXd::Ones(1, 2)),
                  InvalidArgument);
}

TEST_CASE("allocation bound on the direction norm") {
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const Index k = 12, d = 4;
    const MatrixXd x = test::random_matrix(rng, k, d);
    DesignState<double> s(d, k);
    for (int n = 0; n < 40; ++n) {
      const Index a = static_cast<Index>(rng.uniform_index(k));
      s.update(a, x.row(a).transpose(), 0.0);
    }
    if (!s.refresh_inverse()) continue;
    const VectorXd y = 0.2 * x.row(0).transpose() - 0.15 * x.row(1).transpose();
    const auto alloc = solve_direction_lp(x, y);
    double t_y = INFINITY;
    for (Index a = 0; a < k; ++a)
      if (alloc.probabilities(a) > 0) t_y = std::min(t_y, s.count(a) / alloc.probabilities(a));
    if (!(t_y > 0)) continue;
    CHECK(alloc.rho <= 1.0);
    CHECK(mahalanobis_norm(s, y) <= std::sqrt(alloc.rho / t_y) * (1 + 1e-9));
  }
}
