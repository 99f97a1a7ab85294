#pragma once

#include <utility>
#include <vector>

namespace glbai::stats {

double mean(const std::vector<double>& xs);
double median(std::vector<double> xs);
/// Sample standard deviation (n - 1 denominator).
double stddev(const std::vector<double>& xs);
/// Normal-approximation 95% interval for the mean.
std::pair<double, double> mean_ci95(const std::vector<double>& xs);
/// Wilson 95% interval for a binomial proportion.
std::pair<double, double> wilson_ci95(double successes, double trials);

/// Ranks 1..n with ties given their average rank.
std::vector<double> average_ranks(const std::vector<double>& xs);

struct SpearmanResult {
  double rho;
  /// One-sided p-values for rho > 0 and rho < 0 (Student-t approximation
  /// with n - 2 degrees of freedom).
  double p_increasing;
  double p_decreasing;
};

SpearmanResult spearman(const std::vector<double>& x, const std::vector<double>& y);

/// Least-squares slope of log(y) on log(x).
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace glbai::stats
