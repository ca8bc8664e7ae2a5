#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "persuade/trials.hpp"

namespace persuade {

// Win counts for one unordered advocate pair; `first` is the
// lexicographically smaller id and m1 counts its wins.
struct PairwiseCounts {
  std::string first;
  std::string second;
  std::int64_t m1 = 0;
  std::int64_t m2 = 0;

  std::int64_t n() const { return m1 + m2; }

  bool operator==(const PairwiseCounts&) const = default;
};

struct RecordFilter {
  std::optional<std::string> judge;
  std::optional<PromptCondition> condition;
  std::optional<Jurisdiction> jurisdiction;

  bool matches(const TrialRecord& r) const;
};

// One entry per unordered advocate pair with at least one completed trial,
// ordered by pair key. Counts come solely from winning-advocate fields; failed
// trials never count.
std::vector<PairwiseCounts> pairwise_counts(std::span<const TrialRecord> records,
                                            const RecordFilter& filter = {});
std::vector<PairwiseCounts> pairwise_counts(
    std::span<const TrialRecord> records,
    const std::function<bool(const TrialRecord&)>& predicate);

// |m1 - m2| / (2n). Throws EmptyInput when n = 0.
double pairwise_persuadability(const PairwiseCounts& counts);

struct PairwiseStats {
  PairwiseCounts counts;
  double p2 = 0.0;
  double ci_lo = 0.0;  // Wilson interval on the first advocate's win rate
  double ci_hi = 1.0;
  double p_value = 1.0;  // two-sided exact binomial against 0.5

  bool operator==(const PairwiseStats&) const = default;
};

PairwiseStats pairwise_stats(const PairwiseCounts& counts,
                             double confidence = 0.95);

struct AdvocateTally {
  std::int64_t wins = 0;
  std::int64_t appearances = 0;

  bool operator==(const AdvocateTally&) const = default;
};

struct PopulationStats {
  std::vector<PairwiseCounts> pairs;
  std::int64_t n_pop = 0;
  double p_pop = 0.0;
  std::string p2max_first;
  std::string p2max_second;
  double p2max = 0.0;
  std::map<std::string, AdvocateTally> per_advocate;

  bool operator==(const PopulationStats&) const = default;
};

// Trial-weighted aggregate over all pairs (sum |m1 - m2| / 2 n_pop), the
// maximising pair, and per-advocate win/appearance tallies. Throws EmptyInput.
PopulationStats population_persuadability(const std::vector<PairwiseCounts>& counts);

// The stronger advocate's implied win rate 0.5 + p. Throws Domain outside
// [0, 0.5].
double win_rate_from_p(double p);

}  // namespace persuade
