#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "persuade/argbank.hpp"
#include "persuade/corpus.hpp"
#include "persuade/providers.hpp"
#include "persuade/rng.hpp"

namespace persuade {

enum class PresentationOrder { Side1First, Side2First };

const char* order_name(PresentationOrder o);
std::optional<PresentationOrder> order_from_name(std::string_view name);

struct ArgumentRef {
  std::string advocate;
  PromptCondition condition = PromptCondition::FactsOnly;
  int replicate = 1;

  bool operator==(const ArgumentRef&) const = default;
};

struct TrialAssignment {
  std::int64_t trial_id = 0;
  std::string scenario_id;
  ArgumentRef side1;
  ArgumentRef side2;
  PresentationOrder order = PresentationOrder::Side1First;

  bool operator==(const TrialAssignment&) const = default;
};

enum class ParseMethod { Marker, RetryMarker };

struct Verdict {
  int winning_side = 1;  // 1 or 2
  ParseMethod method = ParseMethod::Marker;

  bool operator==(const Verdict&) const = default;
};

struct TrialRecord {
  TrialAssignment assignment;
  std::string judge;
  Jurisdiction jurisdiction = Jurisdiction::US;
  std::optional<Verdict> verdict;
  std::string failure_reason;  // non-empty iff verdict absent
  // Derived: the advocate of the winning side. Empty for failed trials and
  // for head-to-head ledgers, which record the winning condition instead.
  std::string winning_advocate;
  std::optional<PromptCondition> winning_condition;
  std::string prompt_digest;
  std::string response_digest;
  std::int64_t timestamp_ms = 0;
  std::int64_t latency_ms = 0;
  int attempts = 0;
  std::string campaign_id;

  bool completed() const { return verdict.has_value(); }
  // Trial-level condition; meaningful when both sides share one (campaign
  // ledgers). Head-to-head sides differ by construction.
  std::optional<PromptCondition> trial_condition() const;

  bool operator==(const TrialRecord&) const = default;
};

inline constexpr const char* kLedgerKindCampaign = "campaign";
inline constexpr const char* kLedgerKindHeadToHead = "head_to_head";

struct LedgerHeader {
  std::string kind;
  std::string campaign_id;
  std::string config_digest;
  std::uint64_t seed = 0;
  std::string bank_digest;
  std::string corpus_digest;
  std::string advocate_template;
  std::string judge_template;
  std::string tool_version;

  bool operator==(const LedgerHeader&) const = default;
};

struct Ledger {
  LedgerHeader header;
  std::vector<TrialRecord> records;
};

Ledger load_ledger(const std::string& path);

// Argument pools grouped by (scenario, side, condition), the shape trial
// sampling draws from. Built once per campaign; optionally restricted to a
// subset of advocates.
class SidePools {
 public:
  static SidePools build(const ArgumentBank& bank,
                         const std::vector<std::string>& advocates = {});

  // Entries ordered by (advocate, replicate). Empty vector if no such cell.
  const std::vector<const ArgumentRecord*>& pool(std::string_view scenario_id,
                                                 int side,
                                                 PromptCondition cond) const;

 private:
  std::map<std::string, std::vector<const ArgumentRecord*>> pools_;
};

// Draw order is part of the contract: scenario, side-1 argument, side-2
// argument (excluding the side-1 advocate), presentation order.
TrialAssignment sample_assignment(Rng& rng, const SidePools& pools,
                                  const Corpus& corpus, PromptCondition cond,
                                  std::int64_t trial_id);

// Head-to-head: same advocate on both sides, one side argued from each
// condition; condition placement, replicates and order all random.
TrialAssignment sample_head_to_head_assignment(Rng& rng, const SidePools& pools,
                                               const Corpus& corpus,
                                               const std::string& advocate,
                                               std::int64_t trial_id);

// Blinded judge prompt: facts, legal question, both arguments labeled only by
// party, in presentation order, then the decide-as-a-court instruction and
// the DECISION marker directive. Throws DanglingReference if the assignment
// does not resolve against the bank.
std::string build_judge_prompt(const Scenario& s, const TrialAssignment& a,
                               const ArgumentBank& bank);
const std::string& judge_template_hash();

// Scans for the last "DECISION:" line and maps the label to a side.
// Throws AmbiguousVerdict when no marker, no label, or both labels match.
Verdict parse_verdict(const std::string& response,
                      const std::array<std::string, 2>& labels);

struct CampaignConfig {
  std::uint64_t seed = 0;
  int trials_per_condition = 600;  // campaign mode
  int trials_per_judge = 200;      // head-to-head mode
  std::vector<std::string> judges;
  // Campaign: advocate pool restriction (empty = every bank advocate).
  // Head-to-head: the advocates tested against themselves.
  std::vector<std::string> advocates;
  std::vector<PromptCondition> conditions{kBothConditions.begin(),
                                          kBothConditions.end()};
  std::string corpus_path;
  std::string bank_path;
  std::string providers_path;
  int parallelism = 4;
  double failure_threshold = 0.05;
  int replacement_cap = 60;
};

CampaignConfig parse_campaign_config(const std::string& json_text);
CampaignConfig load_campaign_config(const std::string& path);
std::string campaign_config_to_json(const CampaignConfig& config);

struct RunOptions {
  // Stop after this many newly executed trials (0 = no limit). Lets long
  // remote campaigns run in bounded slices; resuming continues the plan.
  std::int64_t max_new_trials = 0;
  bool store_objects = false;  // content-addressed prompt/response sidecar
  std::string objects_dir;
  // Zero timestamps so fully synthetic runs are byte-stable across reruns.
  bool logical_clock = false;
};

struct JudgeRunSummary {
  std::string judge;
  int completed = 0;
  int failed = 0;
  int replacements = 0;
  bool aborted = false;
  std::string abort_reason;
};

struct RunSummary {
  std::string ledger_path;
  std::string campaign_id;
  int new_trials = 0;
  bool complete = false;  // every per-block quota met, no judge aborted
  std::vector<JudgeRunSummary> judges;
};

RunSummary run_campaign(const CampaignConfig& config, const Corpus& corpus,
                        const ArgumentBank& bank,
                        const ProviderRegistry& providers,
                        const std::string& ledger_path,
                        const RunOptions& options = {});

RunSummary run_head_to_head(const CampaignConfig& config, const Corpus& corpus,
                            const ArgumentBank& bank,
                            const ProviderRegistry& providers,
                            const std::string& ledger_path,
                            const RunOptions& options = {});

}  // namespace persuade
