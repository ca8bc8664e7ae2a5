#include "persuade/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "persuade/error.hpp"
#include "persuade/stats.hpp"

namespace persuade {

bool RecordFilter::matches(const TrialRecord& r) const {
  if (judge && r.judge != *judge) return false;
  if (condition) {
    auto c = r.trial_condition();
    if (!c || *c != *condition) return false;
  }
  if (jurisdiction && r.jurisdiction != *jurisdiction) return false;
  return true;
}

std::vector<PairwiseCounts> pairwise_counts(
    std::span<const TrialRecord> records,
    const std::function<bool(const TrialRecord&)>& predicate) {
  std::map<std::pair<std::string, std::string>, PairwiseCounts> acc;
  for (const auto& r : records) {
    if (!r.completed()) continue;
    if (predicate && !predicate(r)) continue;
    std::string a = r.assignment.side1.advocate;
    std::string b = r.assignment.side2.advocate;
    if (a == b) continue;  // head-to-head records carry no advocate contest
    const bool swapped = a > b;
    if (swapped) std::swap(a, b);
    auto& cell = acc[{a, b}];
    cell.first = a;
    cell.second = b;
    if (r.winning_advocate == cell.first) {
      ++cell.m1;
    } else if (r.winning_advocate == cell.second) {
      ++cell.m2;
    } else {
      raise(ErrorCode::State,
            "trial " + std::to_string(r.assignment.trial_id) +
                ": winning advocate '" + r.winning_advocate +
                "' is neither side's advocate");
    }
  }
  std::vector<PairwiseCounts> out;
  out.reserve(acc.size());
  for (auto& [key, cell] : acc) out.push_back(std::move(cell));
  return out;
}

std::vector<PairwiseCounts> pairwise_counts(std::span<const TrialRecord> records,
                                            const RecordFilter& filter) {
  return pairwise_counts(
      records, [&filter](const TrialRecord& r) { return filter.matches(r); });
}

double pairwise_persuadability(const PairwiseCounts& counts) {
  const std::int64_t n = counts.n();
  if (n < 1) {
    raise(ErrorCode::EmptyInput, "pairwise_persuadability: empty pair (n = 0)");
  }
  return std::abs(static_cast<double>(counts.m1 - counts.m2)) /
         (2.0 * static_cast<double>(n));
}

PairwiseStats pairwise_stats(const PairwiseCounts& counts, double confidence) {
  PairwiseStats s;
  s.counts = counts;
  s.p2 = pairwise_persuadability(counts);
  auto [lo, hi] = wilson_interval(counts.m1, counts.n(), confidence);
  s.ci_lo = lo;
  s.ci_hi = hi;
  s.p_value =
      binomial_test(counts.m1, counts.n(), 0.5, Sidedness::TwoSided).p_value;
  return s;
}

PopulationStats population_persuadability(
    const std::vector<PairwiseCounts>& counts) {
  if (counts.empty()) {
    raise(ErrorCode::EmptyInput, "population_persuadability: no pairs");
  }
  PopulationStats pop;
  pop.pairs = counts;
  double weighted = 0.0;
  for (const auto& c : counts) {
    pop.n_pop += c.n();
    weighted += std::abs(static_cast<double>(c.m1 - c.m2));
    const double p2 = pairwise_persuadability(c);
    if (p2 > pop.p2max ||
        (pop.p2max_first.empty() && pop.p2max_second.empty())) {
      pop.p2max = p2;
      pop.p2max_first = c.first;
      pop.p2max_second = c.second;
    }
    pop.per_advocate[c.first].wins += c.m1;
    pop.per_advocate[c.first].appearances += c.n();
    pop.per_advocate[c.second].wins += c.m2;
    pop.per_advocate[c.second].appearances += c.n();
  }
  pop.p_pop = weighted / (2.0 * static_cast<double>(pop.n_pop));
  return pop;
}

double win_rate_from_p(double p) {
  if (!(p >= 0.0 && p <= 0.5)) {
    raise(ErrorCode::Domain, "persuadability outside [0, 0.5]");
  }
  return 0.5 + p;
}

}  // namespace persuade
