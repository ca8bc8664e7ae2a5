#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "persuade/metrics.hpp"
#include "persuade/stats.hpp"
#include "persuade/trials.hpp"

namespace persuade {

struct ConditionSummary {
  PopulationStats pop;
  std::vector<PairwiseStats> pairs;
  TestResult p2max_binomial;  // two-sided exact binomial on the p2max pair
  TestResult winrate_chi2;
  TestResult winrate_permutation;

  bool operator==(const ConditionSummary&) const = default;
};

struct ConditionComparison {
  PopulationStats facts_only;
  PopulationStats with_original_arguments;
  double delta_p_pop = 0.0;  // facts_only minus with_original_arguments
  TestResult homogeneity;

  bool operator==(const ConditionComparison&) const = default;
};

struct JurisdictionBreakdown {
  std::map<std::string, PopulationStats> per_jurisdiction;  // keyed by code
  // Set when both jurisdictions of a flag are present in the ledger.
  std::optional<bool> uk_below_us;
  std::optional<bool> irl_below_uk;
  std::optional<bool> irl_below_us;
  TestResult variation;

  bool operator==(const JurisdictionBreakdown&) const = default;
};

struct PositionBias {
  std::int64_t first_presented_wins = 0;
  std::int64_t n = 0;
  double win_rate = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 1.0;

  bool operator==(const PositionBias&) const = default;
};

struct CampaignReport {
  std::string judge;
  std::string campaign_id;
  std::string config_digest;
  std::string ledger_digest;
  std::string advocate_template;
  std::string judge_template;
  std::string tool_version;
  std::uint64_t seed = 0;
  std::map<std::string, ConditionSummary> per_condition;  // by condition name
  std::optional<ConditionComparison> condition_comparison;  // both conditions present
  std::optional<JurisdictionBreakdown> jurisdictions;
  PositionBias position_bias;

  bool operator==(const CampaignReport&) const = default;
};

struct ReportOptions {
  double confidence = 0.95;
  int permutation_replications = 2000;
  std::string ledger_digest;  // provenance; computed by the caller
};

// Distinct judges in order of first appearance.
std::vector<std::string> judges_in(const Ledger& ledger);

ConditionComparison compare_conditions(const Ledger& ledger,
                                       const std::string& judge);
JurisdictionBreakdown jurisdiction_breakdown(const Ledger& ledger,
                                             const std::string& judge);

CampaignReport build_campaign_report(const Ledger& ledger,
                                     const std::string& judge,
                                     const ReportOptions& options = {});

struct HeadToHeadBlock {
  std::string judge;
  std::string advocate;
  std::int64_t wins_with = 0;     // with_original_arguments condition wins
  std::int64_t wins_without = 0;  // facts_only condition wins
  TestResult binomial;            // two-sided against 0.5

  std::int64_t n() const { return wins_with + wins_without; }

  bool operator==(const HeadToHeadBlock&) const = default;
};

struct HeadToHeadResult {
  std::vector<HeadToHeadBlock> blocks;
  int blocks_won_by_with = 0;
  int blocks_tied = 0;
  int blocks_total = 0;
  // One-sided sign test over untied block majorities ("did the
  // with-arguments side win the block?").
  TestResult aggregate;
  std::string campaign_id;
  std::string ledger_digest;

  bool operator==(const HeadToHeadResult&) const = default;
};

HeadToHeadResult summarize_head_to_head(const Ledger& ledger,
                                        const std::string& ledger_digest = "");

enum class ReportFormat { Markdown, Csv, Json };

// Deterministic renderings. Markdown mirrors the judge-per-row summary table
// with (p2max, p_pop) column pairs per condition; CSV carries the pairwise
// detail plus one summary row per judge and condition; JSON round-trips.
std::string render_report(const CampaignReport& report, ReportFormat format);
std::string render_reports(const std::vector<CampaignReport>& reports,
                           ReportFormat format);
std::string render_head_to_head(const HeadToHeadResult& result,
                                ReportFormat format);

CampaignReport campaign_report_from_json(const std::string& json_text);

}  // namespace persuade
