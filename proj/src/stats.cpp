#include "persuade/stats.hpp"

#include <algorithm>
#include <cmath>

#include "persuade/error.hpp"
#include "persuade/metrics.hpp"
#include "persuade/rng.hpp"

namespace persuade {

const char* sidedness_name(Sidedness s) {
  return s == Sidedness::OneSided ? "one_sided" : "two_sided";
}

// ---------------------------------------------------------------------------
// Binomial test
// ---------------------------------------------------------------------------

namespace {

double log_choose(std::int64_t n, std::int64_t k) {
  return std::lgamma(static_cast<double>(n + 1)) -
         std::lgamma(static_cast<double>(k + 1)) -
         std::lgamma(static_cast<double>(n - k + 1));
}

double binom_log_pmf(std::int64_t k, std::int64_t n, double p) {
  if (p == 0.0) return k == 0 ? 0.0 : -HUGE_VAL;
  if (p == 1.0) return k == n ? 0.0 : -HUGE_VAL;
  return log_choose(n, k) + static_cast<double>(k) * std::log(p) +
         static_cast<double>(n - k) * std::log1p(-p);
}

double binom_tail_leq(std::int64_t k, std::int64_t n, double p) {
  double sum = 0.0;
  for (std::int64_t i = 0; i <= k; ++i) sum += std::exp(binom_log_pmf(i, n, p));
  return std::min(1.0, sum);
}

double binom_tail_geq(std::int64_t k, std::int64_t n, double p) {
  double sum = 0.0;
  for (std::int64_t i = n; i >= k; --i) sum += std::exp(binom_log_pmf(i, n, p));
  return std::min(1.0, sum);
}

}  // namespace

TestResult binomial_test(std::int64_t k, std::int64_t n, double p0,
                         Sidedness sided) {
  if (n < 1 || k < 0 || k > n) {
    raise(ErrorCode::Domain, "binomial_test requires 0 <= k <= n, n >= 1");
  }
  if (!(p0 > 0.0 && p0 < 1.0)) {
    raise(ErrorCode::Domain, "binomial_test requires 0 < p0 < 1");
  }
  TestResult r;
  r.statistic = static_cast<double>(k);
  r.sidedness = sided;
  r.method = "binomial-exact";
  const double lower = binom_tail_leq(k, n, p0);
  const double upper = binom_tail_geq(k, n, p0);
  if (sided == Sidedness::TwoSided) {
    r.p_value = std::min(1.0, 2.0 * std::min(lower, upper));
  } else {
    const double mean = static_cast<double>(n) * p0;
    r.p_value = static_cast<double>(k) >= mean ? upper : lower;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Chi-squared tail via the regularized incomplete gamma function
// ---------------------------------------------------------------------------

namespace {

constexpr int kGammaMaxIter = 500;
constexpr double kGammaEps = 1e-15;

// Lower regularized incomplete gamma P(a, x) by series; valid for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double term = sum;
  for (int i = 0; i < kGammaMaxIter; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kGammaEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper regularized incomplete gamma Q(a, x) by continued fraction (modified
// Lentz); valid for x >= a + 1.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kGammaMaxIter; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kGammaEps) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q(double a, double x) {
  if (x <= 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

}  // namespace

double chi_squared_sf(double x, int df) {
  if (x < 0.0) raise(ErrorCode::Domain, "chi_squared_sf requires x >= 0");
  if (df < 1) raise(ErrorCode::Domain, "chi_squared_sf requires df >= 1");
  return gamma_q(static_cast<double>(df) / 2.0, x / 2.0);
}

// ---------------------------------------------------------------------------
// Normal distribution helpers
// ---------------------------------------------------------------------------

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    raise(ErrorCode::Domain, "normal_quantile requires 0 < p < 1");
  }
  // Acklam's rational approximation, then one Halley step against erfc.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
  x = x - u / (1.0 + x * u / 2.0);
  return x;
}

// ---------------------------------------------------------------------------
// Wilson interval
// ---------------------------------------------------------------------------

std::pair<double, double> wilson_interval(std::int64_t k, std::int64_t n,
                                          double confidence) {
  if (n < 1 || k < 0 || k > n) {
    raise(ErrorCode::Domain, "wilson_interval requires 0 <= k <= n, n >= 1");
  }
  if (!(confidence > 0.0 && confidence < 1.0)) {
    raise(ErrorCode::Domain, "wilson_interval requires 0 < confidence < 1");
  }
  const double z = normal_quantile(0.5 + confidence / 2.0);
  const double nn = static_cast<double>(n);
  const double phat = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (phat + z2 / (2.0 * nn)) / denom;
  const double half =
      z * std::sqrt(phat * (1.0 - phat) / nn + z2 / (4.0 * nn * nn)) / denom;
  // At k = 0 (k = n) the bound is exactly 0 (1); keep it free of rounding
  // residue.
  const double lo = k == 0 ? 0.0 : std::max(0.0, center - half);
  const double hi = k == n ? 1.0 : std::min(1.0, center + half);
  return {lo, hi};
}

// ---------------------------------------------------------------------------
// Win-rate null tests
// ---------------------------------------------------------------------------

namespace {

// sum_i [(w_i - n_i/2)^2 + (l_i - n_i/2)^2] / (n_i / 2) == sum_i (2w_i - n_i)^2 / n_i
double winrate_statistic(
    const std::vector<std::pair<std::int64_t, std::int64_t>>& wins_appearances) {
  double stat = 0.0;
  for (const auto& [wins, appearances] : wins_appearances) {
    const double dev =
        2.0 * static_cast<double>(wins) - static_cast<double>(appearances);
    stat += dev * dev / static_cast<double>(appearances);
  }
  return stat;
}

}  // namespace

TestResult winrate_null_from_counts(
    const std::vector<std::pair<std::int64_t, std::int64_t>>& wins_appearances) {
  if (wins_appearances.empty()) {
    raise(ErrorCode::EmptyInput, "winrate_null_test: no advocates");
  }
  for (const auto& [wins, appearances] : wins_appearances) {
    if (appearances < 1) {
      raise(ErrorCode::EmptyInput,
            "winrate_null_test: advocate with zero appearances");
    }
    if (wins < 0 || wins > appearances) {
      raise(ErrorCode::Domain, "winrate_null_test: wins outside [0, appearances]");
    }
  }
  TestResult r;
  r.statistic = winrate_statistic(wins_appearances);
  r.df = static_cast<int>(wins_appearances.size());
  r.p_value = chi_squared_sf(r.statistic, *r.df);
  r.sidedness = Sidedness::TwoSided;
  r.method = "winrate-chi2";
  return r;
}

TestResult winrate_null_test(const PopulationStats& pop) {
  std::vector<std::pair<std::int64_t, std::int64_t>> counts;
  counts.reserve(pop.per_advocate.size());
  for (const auto& [advocate, tally] : pop.per_advocate) {
    counts.emplace_back(tally.wins, tally.appearances);
  }
  return winrate_null_from_counts(counts);
}

TestResult winrate_null_permutation(const PopulationStats& pop,
                                    int replications, std::uint64_t seed) {
  if (pop.pairs.empty()) {
    raise(ErrorCode::EmptyInput, "winrate_null_permutation: no pairs");
  }
  if (replications < 1) {
    raise(ErrorCode::Domain, "winrate_null_permutation: replications < 1");
  }

  // Advocate index space and fixed appearance counts from the pair layout.
  std::vector<std::string> advocates;
  auto index_of = [&](const std::string& id) -> std::size_t {
    for (std::size_t i = 0; i < advocates.size(); ++i) {
      if (advocates[i] == id) return i;
    }
    advocates.push_back(id);
    return advocates.size() - 1;
  };
  struct IndexedPair {
    std::size_t first;
    std::size_t second;
    std::int64_t n;
  };
  std::vector<IndexedPair> pairs;
  for (const auto& p : pop.pairs) {
    pairs.push_back({index_of(p.first), index_of(p.second), p.n()});
  }
  std::vector<std::int64_t> appearances(advocates.size(), 0);
  for (const auto& p : pairs) {
    appearances[p.first] += p.n;
    appearances[p.second] += p.n;
  }

  std::vector<std::pair<std::int64_t, std::int64_t>> observed;
  for (const auto& [advocate, tally] : pop.per_advocate) {
    observed.emplace_back(tally.wins, tally.appearances);
  }
  const double observed_stat = winrate_statistic(observed);

  Rng rng = Rng::derive(seed, "winrate-permutation");
  int at_least = 0;
  std::vector<std::int64_t> wins(advocates.size());
  for (int rep = 0; rep < replications; ++rep) {
    std::fill(wins.begin(), wins.end(), 0);
    for (const auto& p : pairs) {
      const std::int64_t w1 = rng.binomial(p.n, 0.5);
      wins[p.first] += w1;
      wins[p.second] += p.n - w1;
    }
    double stat = 0.0;
    for (std::size_t i = 0; i < wins.size(); ++i) {
      const double dev = 2.0 * static_cast<double>(wins[i]) -
                         static_cast<double>(appearances[i]);
      stat += dev * dev / static_cast<double>(appearances[i]);
    }
    if (stat >= observed_stat) ++at_least;
  }

  TestResult r;
  r.statistic = observed_stat;
  r.p_value = (1.0 + at_least) / (1.0 + replications);
  r.sidedness = Sidedness::TwoSided;
  r.method = "winrate-permutation";
  return r;
}

TestResult chi_squared_homogeneity(
    const std::vector<std::pair<std::int64_t, std::int64_t>>& win_loss_by_group) {
  if (win_loss_by_group.size() < 2) {
    raise(ErrorCode::EmptyInput, "chi_squared_homogeneity requires >= 2 groups");
  }
  double total = 0.0;
  double col_w = 0.0;
  double col_l = 0.0;
  for (const auto& [w, l] : win_loss_by_group) {
    if (w < 0 || l < 0) raise(ErrorCode::Domain, "negative cell count");
    if (w + l < 1) {
      raise(ErrorCode::DegenerateTable, "group with zero total");
    }
    col_w += static_cast<double>(w);
    col_l += static_cast<double>(l);
    total += static_cast<double>(w + l);
  }
  if (col_w == 0.0 || col_l == 0.0) {
    raise(ErrorCode::DegenerateTable, "outcome margin is zero");
  }
  double stat = 0.0;
  for (const auto& [w, l] : win_loss_by_group) {
    const double row = static_cast<double>(w + l);
    const double e_w = row * col_w / total;
    const double e_l = row * col_l / total;
    const double dw = static_cast<double>(w) - e_w;
    const double dl = static_cast<double>(l) - e_l;
    stat += dw * dw / e_w + dl * dl / e_l;
  }
  TestResult r;
  r.statistic = stat;
  r.df = static_cast<int>(win_loss_by_group.size()) - 1;
  r.p_value = chi_squared_sf(stat, *r.df);
  r.sidedness = Sidedness::TwoSided;
  r.method = "chi2-homogeneity";
  return r;
}

}  // namespace persuade
