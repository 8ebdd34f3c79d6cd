#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mm/core/program.hpp"

namespace mm {

class StatsError : public Error {
 public:
  using Error::Error;
};

/// Bonferroni-corrected thresholds for three pairwise comparisons.
inline constexpr double kAlphaSignificant = 0.05 / 3;
inline constexpr double kAlphaHighlySignificant = 0.01 / 3;

struct StatResult {
  std::string test;
  double statistic = 0;
  std::optional<double> p_value;
  bool significant = false;         // p < 0.05/3
  bool highly_significant = false;  // p < 0.01/3
  std::string method;               // e.g. "exact", "normal", "chi2"
};

StatResult with_flags(StatResult r);
nlohmann::json to_json(const StatResult& r);

double mean(const std::vector<double>& x);
/// Sample standard deviation (n - 1 denominator).
double stddev(const std::vector<double>& x);
double standard_error(const std::vector<double>& x);

/// Midranks (1-based) of `x`, ties sharing the average rank.
std::vector<double> midranks(const std::vector<double>& x);

/// Shapiro-Wilk W with Royston's AS R94 coefficients and p-value. 3 <= n <= 5000.
StatResult shapiro_wilk(std::vector<double> x);

enum class KruskalMode { ChiSquare, Exact };
/// Tie-corrected H. Exact mode enumerates every assignment of the pooled
/// observations to groups and needs N <= 10.
StatResult kruskal_wallis(const std::vector<std::vector<double>>& groups, KruskalMode mode = KruskalMode::ChiSquare);

enum class MannWhitneyMode { Auto, Exact, Normal };
/// U of sample `a`. Auto uses the exact null distribution when there are no
/// ties and n_a + n_b <= 16, otherwise the tie- and continuity-corrected
/// normal approximation. Two-sided p.
StatResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b,
                          MannWhitneyMode mode = MannWhitneyMode::Auto);

/// (mean_a - mean_b) / pooled SD.
StatResult cohens_d(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace mm
