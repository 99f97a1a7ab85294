// Acceptance suite: one PASS/FAIL line per criterion.

#include "glbai/confidence.hpp"
#include "glbai/experiment.hpp"
#include "glbai/mle.hpp"
#include "glbai/selector.hpp"
#include "glbai/stats.hpp"
#include "../oracles.hpp"

#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

using namespace glbai;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const Verdict& v, double seconds) {
  if (!v.pass) ++failures;
  std::printf("[%s] criterion %d (%s): %s [%.1fs]\n", v.pass ? "PASS" : "FAIL", id, name.c_str(), v.detail.c_str(),
              seconds);
  std::fflush(stdout);
}

template <typename F>
void run_criterion(int id, const std::string& name, F&& body) {
  const auto start = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  report(id, name, v, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

ExperimentConfig correctness_config() {
  ExperimentConfig c;
  c.num_arms = 50;
  c.dim = 10;
  c.link = LinkKind::Logistic;
  c.epsilon = 0.1;
  c.delta = 0.05;
  c.alpha_mode = AlphaMode::empirical();
  c.num_replications = 100;
  c.base_seed = 1;
  return c;
}

ExperimentConfig coverage_config() {
  ExperimentConfig c;
  c.num_arms = 10;
  c.dim = 5;
  c.epsilon = 0.1;
  c.delta = 0.05;
  c.alpha_mode = AlphaMode::theoretical();
  c.num_replications = 200;
  c.base_seed = 1;
  c.max_steps = 2000;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  fs::path out = fs::temp_directory_path() / "glbai_acceptance";
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::strcmp(argv[i], "--out") == 0) out = argv[i + 1];
    if (std::strcmp(argv[i], "--workers") == 0) workers = static_cast<unsigned>(std::stoul(argv[i + 1]));
  }
  fs::create_directories(out);

  std::vector<ReplicationOutcome> correctness;
  std::vector<ReplicationOutcome> coverage;

  run_criterion(1, "epsilon-delta correctness", [&]() -> Verdict {
    const ExperimentConfig c = correctness_config();
    correctness = run_replications(c, "glgape", workers);
    fs::create_directories(out / "c1");
    std::ofstream csv(out / "c1" / "runs.csv", std::ios::binary);
    write_run_csv(csv, correctness);
    Index fails = 0;
    for (const auto& r : correctness) fails += r.success ? 0 : 1;
    const double rate = static_cast<double>(fails) / static_cast<double>(correctness.size());
    double tau = 0;
    for (const auto& r : correctness) tau += static_cast<double>(r.tau);
    return {rate <= 0.095, "failure rate " + fmt(rate) + " <= 0.095 over " + std::to_string(correctness.size()) +
                               " runs (mean tau " + fmt(tau / static_cast<double>(correctness.size())) + ")"};
  });

  run_criterion(2, "sample efficiency vs GapE", [&]() -> Verdict {
    ExperimentConfig c = correctness_config();
    c.num_replications = 30;
    const auto summary = cmd_compare(c, out / "c2", workers);
    const double ratio = summary["tau_ratio"].get<double>();
    return {ratio >= 10.0, "mean tau GapE / GLGapE = " + fmt(summary["gape"]["mean_tau"].get<double>(), 6) + " / " +
                               fmt(summary["glgape"]["mean_tau"].get<double>()) + " = " + fmt(ratio) + " >= 10"};
  });

  run_criterion(3, "trend reproduction", [&]() -> Verdict {
    struct Sweep {
      SweepAxis axis;
      std::vector<double> values;
      Index k;
    };
    const Sweep sweeps[] = {{SweepAxis::NumArms, {50, 100, 200}, 0},
                            {SweepAxis::Dim, {5, 10, 20}, 100},
                            {SweepAxis::Epsilon, {0.05, 0.1, 0.2}, 100}};
    std::vector<nlohmann::json> summaries;
    for (const auto& s : sweeps) {
      ExperimentConfig c = correctness_config();
      c.num_replications = 20;
      c.track_coverage = false;
      if (s.k > 0) c.num_arms = s.k;
      c.sweep_axis = s.axis;
      c.sweep_values = s.values;
      summaries.push_back(cmd_sweep(c, out / ("c3_" + std::string(to_string(s.axis))), workers));
    }
    const auto means = [](const nlohmann::json& s) {
      std::vector<double> m;
      for (const auto& p : s["points"]) m.push_back(p["mean_tau"].get<double>());
      return m;
    };
    const double p_d = summaries[1]["spearman"]["p_increasing"].get<double>();
    const double p_eps = summaries[2]["spearman"]["p_decreasing"].get<double>();
    const double slope_k = stats::log_log_slope(sweeps[0].values, means(summaries[0]));
    const double slope_d = stats::log_log_slope(sweeps[1].values, means(summaries[1]));
    const bool pass = p_d < 0.05 && p_eps < 0.05 && slope_k < slope_d;
    std::string detail = "d: p(increasing) = " + fmt(p_d, 3) + "; epsilon: p(decreasing) = " + fmt(p_eps, 3) +
                         "; log-log slope in K " + fmt(slope_k, 3) + " < in d " + fmt(slope_d, 3) + "; mean tau K=";
    for (double m : means(summaries[0])) detail += fmt(m) + "/";
    detail.back() = ' ';
    detail += "d=";
    for (double m : means(summaries[1])) detail += fmt(m) + "/";
    detail.back() = ' ';
    detail += "eps=";
    for (double m : means(summaries[2])) detail += fmt(m) + "/";
    detail.pop_back();
    return {pass, detail};
  });

  run_criterion(4, "confidence coverage", [&]() -> Verdict {
    const ExperimentConfig c = coverage_config();
    coverage = run_replications(c, "glgape", workers);
    Index violated = 0, checks = 0;
    for (const auto& r : coverage) {
      violated += r.diagnostics.coverage_violations > 0 ? 1 : 0;
      checks += r.diagnostics.coverage_checks;
    }
    const double frac = static_cast<double>(violated) / static_cast<double>(coverage.size());
    return {frac <= 0.08 && checks > 0, "runs with an excursion " + fmt(frac) + " <= 0.08 over " +
                                            std::to_string(coverage.size()) + " runs (" + std::to_string(checks) +
                                            " rounds checked)"};
  });

  run_criterion(5, "oracle equivalences", [&]() -> Verdict {
    Rng rng(20240605);
    // Corner maximum vs 101 x 101 grid.
    double corner_err = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      const Index d = 1 + static_cast<Index>(rng.uniform_index(5));
      const MatrixXd m = oracle::random_spd(rng, d);
      const auto s = oracle::design_from(m);
      const VectorXd xi = oracle::random_vector(rng, d), xj = oracle::random_vector(rng, d);
      LinkModel<double> link;
      link.slope_floor = rng.uniform(0.01, 0.2);
      link.lipschitz = link.slope_floor + rng.uniform(0.0, 0.5);
      const double w = gap_width(link, s, 1.0, xi, xj).width;
      corner_err = std::max(corner_err, std::abs(w - oracle::grid_max(s.inverse(), xi, xj, link.slope_floor,
                                                                      link.lipschitz, 101)));
    }
    // LP vs basic-solution enumeration.
    double lp_err = 0;
    for (int trial = 0; trial < 200; ++trial) {
      const Index d = 1 + static_cast<Index>(rng.uniform_index(3));
      const Index k = d + static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(7 - d)));
      const MatrixXd x = oracle::random_matrix(rng, k, d);
      const VectorXd y = oracle::random_vector(rng, d, -2, 2);
      const double best = oracle::l1_min_by_enumeration(x, y);
      lp_err = std::max(lp_err, std::abs(solve_direction_lp(x, y).rho - best) / std::max(1.0, best));
    }
    // Rank-one inverse updates vs direct inversion.
    double inv_err = 0;
    for (int trial = 0; trial < 50; ++trial) {
      const Index d = 1 + static_cast<Index>(rng.uniform_index(10));
      const Index k = 30;
      const MatrixXd x = oracle::random_matrix(rng, k, d);
      DesignState<double> s(d, k);
      while (!s.nonsingular()) {
        const Index a = static_cast<Index>(rng.uniform_index(k));
        s.update(a, x.row(a).transpose(), 0.0);
        s.refresh_inverse();
      }
      for (int n = 0; n < 500; ++n) {
        const Index a = static_cast<Index>(rng.uniform_index(k));
        s.update(a, x.row(a).transpose(), 0.0);
        const MatrixXd direct = s.covariance().inverse();
        inv_err = std::max(inv_err, oracle::max_abs(s.inverse() - direct) / std::max(1.0, oracle::max_abs(direct)));
      }
    }
    // Identity-link likelihood vs least squares.
    double ls_err = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const Index d = 1 + static_cast<Index>(rng.uniform_index(8));
      const Index n = d + 5 + static_cast<Index>(rng.uniform_index(50));
      GlmSample<double> s{oracle::random_matrix(rng, n, d), VectorXd::Ones(n), oracle::random_vector(rng, n, -2, 2)};
      const VectorXd theta = fit_mle(s, LinkKind::Identity).theta;
      const MatrixXd gram = s.features.transpose() * s.features;
      const VectorXd oracle_theta = gram.inverse() * (s.features.transpose() * s.reward_sums);
      ls_err = std::max(ls_err, oracle::max_abs(theta - oracle_theta));
    }
    // Logistic score residual.
    double score_max = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const Index d = 1 + static_cast<Index>(rng.uniform_index(10));
      const Index n = 50 + 20 * d;
      const VectorXd theta = oracle::normal_vector(rng, d);
      GlmSample<double> s{oracle::random_matrix(rng, n, d), VectorXd::Ones(n), VectorXd(n)};
      for (Index l = 0; l < n; ++l)
        s.reward_sums(l) = rng.bernoulli(mu_eval(LinkKind::Logistic, s.features.row(l).dot(theta))) ? 1.0 : 0.0;
      const auto sol = fit_mle(s, LinkKind::Logistic);
      score_max = std::max(score_max, score(s, LinkKind::Logistic, sol.theta).norm());
    }
    const bool pass = corner_err <= 1e-9 && lp_err <= 1e-9 && inv_err <= 1e-8 && ls_err <= 1e-8 && score_max <= 1e-6;
    return {pass, "corner vs grid " + fmt(corner_err, 2) + " (1000); LP vs enumeration " + fmt(lp_err, 2) +
                      " (200); rank-one vs direct " + fmt(inv_err, 2) + "; identity vs least squares " +
                      fmt(ls_err, 2) + "; logistic score " + fmt(score_max, 3) + " (100)"};
  });

  run_criterion(6, "runtime diagnostics", [&]() -> Verdict {
    if (correctness.empty() || coverage.empty()) return {false, "criteria 1 and 4 produced no runs"};
    Index l1 = 0, l1_checks = 0, l3 = 0, l3_checks = 0;
    for (const auto& r : correctness) {
      l1 += r.diagnostics.allocation_bound_violations;
      l1_checks += r.diagnostics.allocation_bound_checks;
      l3 += r.diagnostics.weight_bound_violations;
      l3_checks += r.diagnostics.weight_bound_checks;
    }
    Index clean = 0, t4 = 0;
    for (const auto& r : coverage) {
      if (r.diagnostics.coverage_violations > 0 || !r.theory) continue;
      ++clean;
      const double bound = r.theory->h_eps * r.final_width_scale * r.final_width_scale +
                           static_cast<double>(r.num_arms) + 1.0;
      t4 += static_cast<double>(r.tau) <= bound ? 0 : 1;
    }
    const bool pass = l1 == 0 && l3 == 0 && t4 == 0 && l1_checks > 0 && l3_checks > 0 && clean > 0;
    return {pass, "allocation bound " + std::to_string(l1) + "/" + std::to_string(l1_checks) + ", weight bound " +
                      std::to_string(l3) + "/" + std::to_string(l3_checks) + " violations; sample complexity bound " +
                      std::to_string(t4) + " violations on " + std::to_string(clean) + " coverage-clean runs"};
  });

  run_criterion(7, "determinism", [&]() -> Verdict {
    const ExperimentConfig c = correctness_config();
    const unsigned other = workers == 1 ? 2 : 1;
    cmd_run(c, out / "c7", other);
    const std::string a = slurp(out / "c1" / "runs.csv");
    const std::string b = slurp(out / "c7" / "runs.csv");
    return {!a.empty() && a == b, "runs.csv " + std::to_string(a.size()) + " bytes, re-run with " +
                                      std::to_string(other) + " worker(s) " + (a == b ? "identical" : "differs")};
  });

  std::printf("%s: %d of 7 criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
