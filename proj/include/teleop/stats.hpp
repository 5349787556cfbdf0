#ifndef TELEOP_STATS_HPP
#define TELEOP_STATS_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace teleop {

struct TestResult {
  std::string test;       // "ks", "friedman", "wilcoxon"
  double statistic = 0.0; // D, chi2 or Z
  double p_value = 1.0;
  std::size_t n = 0;      // sample or block count
  double alpha_used = 0.05;
  bool significant = false;
};

/// Rectangular blocks x treatments matrix of paired measurements.
struct PairedData {
  std::vector<std::string> conditions;
  std::vector<std::vector<double>> blocks;  // blocks[i][j]: block i, condition j

  void validate() const;
  std::size_t n_blocks() const { return blocks.size(); }
  std::size_t n_conditions() const { return conditions.size(); }
  std::vector<double> column(std::size_t j) const;
};

/// One-sample Kolmogorov-Smirnov against a normal fitted to the sample
/// (mean, sd); asymptotic p-value, no small-sample correction.
TestResult ks_normality(const std::vector<double>& samples, double alpha = 0.05);

/// Friedman rank test with average-rank ties and the standard tie
/// correction; p from chi-square with k-1 dof.
TestResult friedman(const PairedData& data, double alpha = 0.05);

/// Paired Wilcoxon signed-rank. Zero differences are discarded; ties get
/// average ranks. n <= 12 uses exact enumeration of all sign assignments,
/// larger n the normal approximation.
TestResult wilcoxon_signed_rank(const std::vector<double>& a,
                                const std::vector<double>& b, double alpha);

double bonferroni(double alpha_family, int m);

struct ComparisonReport {
  std::string metric;
  double alpha_family = 0.05;
  double alpha_pairwise = 0.05;
  std::vector<std::pair<std::string, TestResult>> normality;   // per condition
  TestResult friedman_result;
  struct Pairwise {
    std::string condition_a, condition_b;
    TestResult result;
  };
  std::vector<Pairwise> pairwise;
};

/// Full battery in reporting order: KS per condition, Friedman across all
/// conditions, then every pairwise Wilcoxon at the Bonferroni-corrected
/// threshold.
ComparisonReport compare_conditions(const PairedData& data, double alpha = 0.05);

/// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);

/// Upper-tail chi-square probability with `dof` degrees of freedom.
double chi2_sf(double x, int dof);

/// Standard normal CDF.
double normal_cdf(double z);

/// Asymptotic Kolmogorov distribution tail Q(lambda).
double kolmogorov_q(double lambda);

}  // namespace teleop

#endif  // TELEOP_STATS_HPP
