#include "teleop/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace teleop {

void PairedData::validate() const {
  if (conditions.size() < 2) {
    throw std::invalid_argument("PairedData: need at least 2 conditions");
  }
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].size() != conditions.size()) {
      throw std::invalid_argument("PairedData: block " + std::to_string(i) +
                                  " is not rectangular");
    }
  }
}

std::vector<double> PairedData::column(std::size_t j) const {
  std::vector<double> col;
  col.reserve(blocks.size());
  for (const auto& row : blocks) col.push_back(row.at(j));
  return col;
}

// ---------------------------------------------------------------------------
// Distribution plumbing

namespace {

double gamma_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_p: bad arguments");
  if (x == 0.0) return 0.0;
  return x < a + 1.0 ? gamma_series(a, x) : 1.0 - gamma_cf(a, x);
}

double chi2_sf(double x, int dof) {
  if (x <= 0.0) return 1.0;
  return 1.0 - gamma_p(0.5 * static_cast<double>(dof), 0.5 * x);
}

double normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

double kolmogorov_q(double lambda) {
  if (lambda < 0.1) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * lambda * lambda * j * j);
    sum += sign * term;
    sign = -sign;
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Tests

TestResult ks_normality(const std::vector<double>& samples, double alpha) {
  const std::size_t n = samples.size();
  if (n < 5) throw std::invalid_argument("ks_normality: need at least 5 samples");
  double mean = std::accumulate(samples.begin(), samples.end(), 0.0) /
                static_cast<double>(n);
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (sd <= 1e-12 * std::max(std::fabs(mean), 1.0)) {
    throw std::invalid_argument("ks_normality: zero-variance sample is degenerate");
  }
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  double d_max = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = normal_cdf((sorted[i] - mean) / sd);
    const double above = static_cast<double>(i + 1) / static_cast<double>(n) - f;
    const double below = f - static_cast<double>(i) / static_cast<double>(n);
    d_max = std::max({d_max, above, below});
  }
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  const double lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d_max;
  TestResult r;
  r.test = "ks";
  r.statistic = d_max;
  r.p_value = kolmogorov_q(lambda);
  r.n = n;
  r.alpha_used = alpha;
  r.significant = r.p_value < alpha;
  return r;
}

namespace {

// Average ranks of `values` (any order), ties averaged.
std::vector<double> average_ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

TestResult friedman(const PairedData& data, double alpha) {
  data.validate();
  const std::size_t n = data.n_blocks();
  const std::size_t k = data.n_conditions();
  if (n < 2) throw std::invalid_argument("friedman: need at least 2 blocks");

  std::vector<double> rank_sums(k, 0.0);
  double tie_term = 0.0;  // sum over blocks of sum (t^3 - t)
  for (const auto& row : data.blocks) {
    const std::vector<double> ranks = average_ranks(row);
    for (std::size_t j = 0; j < k; ++j) rank_sums[j] += ranks[j];
    // count tie-group sizes
    std::vector<double> sorted = row;
    std::sort(sorted.begin(), sorted.end());
    std::size_t i = 0;
    while (i < sorted.size()) {
      std::size_t j = i;
      while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i + 1);
      tie_term += t * t * t - t;
      i = j + 1;
    }
  }

  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  double chi2 = 0.0;
  for (double rj : rank_sums) chi2 += rj * rj;
  chi2 = 12.0 / (nd * kd * (kd + 1.0)) * chi2 - 3.0 * nd * (kd + 1.0);
  const double correction = 1.0 - tie_term / (nd * kd * (kd * kd - 1.0));
  chi2 = correction > 0.0 ? chi2 / correction : 0.0;

  TestResult r;
  r.test = "friedman";
  r.statistic = chi2;
  r.p_value = chi2 > 0.0 ? chi2_sf(chi2, static_cast<int>(k) - 1) : 1.0;
  r.n = n;
  r.alpha_used = alpha;
  r.significant = r.p_value < alpha;
  return r;
}

TestResult wilcoxon_signed_rank(const std::vector<double>& a,
                                const std::vector<double>& b, double alpha) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("wilcoxon: paired samples differ in length");
  }
  std::vector<double> diffs;
  diffs.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d != 0.0) diffs.push_back(d);
  }
  if (diffs.empty()) {
    throw std::invalid_argument("wilcoxon: all differences are zero (degenerate)");
  }
  const std::size_t n = diffs.size();
  if (n < 5) {
    throw std::invalid_argument("wilcoxon: fewer than 5 nonzero differences");
  }

  std::vector<double> abs_d(n);
  std::transform(diffs.begin(), diffs.end(), abs_d.begin(),
                 [](double d) { return std::fabs(d); });
  const std::vector<double> ranks = average_ranks(abs_d);

  double w_plus = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (diffs[i] > 0.0) w_plus += ranks[i];
  }
  const double total = static_cast<double>(n) * static_cast<double>(n + 1) / 2.0;
  const double w_minus = total - w_plus;
  const double w = std::min(w_plus, w_minus);

  const double nd = static_cast<double>(n);
  const double mu = nd * (nd + 1.0) / 4.0;
  const double sigma = std::sqrt(nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0);
  const double z = (w - mu) / sigma;  // <= 0 by construction of W

  TestResult r;
  r.test = "wilcoxon";
  r.statistic = z;
  r.n = n;
  r.alpha_used = alpha;

  if (n <= 12) {
    // Exact two-sided p over all 2^n sign assignments. Ranks are halves,
    // so sums are exact in doubles.
    const std::uint64_t count = 1ULL << n;
    std::uint64_t le = 0, ge = 0;
    for (std::uint64_t mask = 0; mask < count; ++mask) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (mask & (1ULL << i)) s += ranks[i];
      }
      if (s <= w_plus) ++le;
      if (s >= w_plus) ++ge;
    }
    const double one_sided =
        static_cast<double>(std::min(le, ge)) / static_cast<double>(count);
    r.p_value = std::min(1.0, 2.0 * one_sided);
  } else {
    r.p_value = std::min(1.0, 2.0 * normal_cdf(z));
  }
  r.significant = r.p_value < alpha;
  return r;
}

double bonferroni(double alpha_family, int m) {
  if (m < 1) throw std::invalid_argument("bonferroni: m must be >= 1");
  if (!(alpha_family > 0.0 && alpha_family <= 1.0)) {
    throw std::invalid_argument("bonferroni: alpha outside (0,1]");
  }
  return alpha_family / static_cast<double>(m);
}

ComparisonReport compare_conditions(const PairedData& data, double alpha) {
  data.validate();
  const std::size_t k = data.n_conditions();
  ComparisonReport report;
  report.alpha_family = alpha;
  const int pairs = static_cast<int>(k * (k - 1) / 2);
  report.alpha_pairwise = bonferroni(alpha, pairs);

  for (std::size_t j = 0; j < k; ++j) {
    TestResult ks;
    try {
      ks = ks_normality(data.column(j), alpha);
    } catch (const std::exception&) {
      ks.test = "ks(degenerate)";
      ks.p_value = 1.0;
      ks.n = data.n_blocks();
      ks.alpha_used = alpha;
    }
    report.normality.emplace_back(data.conditions[j], ks);
  }

  report.friedman_result = friedman(data, alpha);

  for (std::size_t ja = 0; ja < k; ++ja) {
    for (std::size_t jb = ja + 1; jb < k; ++jb) {
      ComparisonReport::Pairwise pw;
      pw.condition_a = data.conditions[ja];
      pw.condition_b = data.conditions[jb];
      try {
        pw.result = wilcoxon_signed_rank(data.column(ja), data.column(jb),
                                         report.alpha_pairwise);
      } catch (const std::exception&) {
        // Identical paired columns carry no evidence of a difference.
        pw.result.test = "wilcoxon(degenerate)";
        pw.result.p_value = 1.0;
        pw.result.n = data.n_blocks();
        pw.result.alpha_used = report.alpha_pairwise;
        pw.result.significant = false;
      }
      report.pairwise.push_back(std::move(pw));
    }
  }
  return report;
}

}  // namespace teleop
