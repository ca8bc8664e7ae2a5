#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace persuade {

struct PopulationStats;  // metrics.hpp

enum class Sidedness { OneSided, TwoSided };

const char* sidedness_name(Sidedness s);

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::optional<int> df;
  Sidedness sidedness = Sidedness::TwoSided;
  std::string method;

  bool operator==(const TestResult&) const = default;
};

// Exact binomial test by tail summation (no normal approximation). Two-sided
// p is min(1, 2 * min(P(X<=k), P(X>=k))); one-sided takes the tail in the
// observed direction. statistic = k.
TestResult binomial_test(std::int64_t k, std::int64_t n, double p0,
                         Sidedness sided);

// Goodness-of-fit of per-advocate win counts against a 0.5 win rate:
// sum_i [(w_i - n_i/2)^2 + (l_i - n_i/2)^2] / (n_i/2), df = #advocates.
// Trials pair advocates, so the cells are dependent and the chi-squared
// reference is approximate; winrate_null_permutation is the assumption-free
// companion. Input pairs are (wins, appearances). Throws EmptyInput.
TestResult winrate_null_from_counts(
    const std::vector<std::pair<std::int64_t, std::int64_t>>& wins_appearances);
TestResult winrate_null_test(const PopulationStats& pop);

// Same statistic referenced against its exact conditional null: winners
// resampled fairly per trial within the observed pair layout.
TestResult winrate_null_permutation(const PopulationStats& pop,
                                    int replications, std::uint64_t seed);

// Contingency test of (wins, losses) across groups, df = groups - 1.
// Throws DegenerateTable when a margin is zero.
TestResult chi_squared_homogeneity(
    const std::vector<std::pair<std::int64_t, std::int64_t>>& win_loss_by_group);

// Wilson score interval; 0 <= lo <= k/n <= hi <= 1.
std::pair<double, double> wilson_interval(std::int64_t k, std::int64_t n,
                                          double confidence);

// Upper tail of the chi-squared distribution via the regularized incomplete
// gamma function.
double chi_squared_sf(double x, int df);

// Standard normal quantile (used by the Wilson interval).
double normal_quantile(double p);
double normal_cdf(double x);

}  // namespace persuade
