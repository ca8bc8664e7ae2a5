#pragma once

// Campaign lifecycle entry points shared by the C API, the CLI and the
// acceptance suite: generate, run, head-to-head, analyze, simulate.

#include <cstdint>
#include <string>
#include <vector>

#include "persuade/analysis.hpp"
#include "persuade/argbank.hpp"
#include "persuade/trials.hpp"

namespace persuade {

struct GenerateSpec {
  std::string corpus_path;
  std::string providers_path;
  std::string bank_path;
  std::vector<std::string> advocates;
  std::vector<PromptCondition> conditions{kBothConditions.begin(),
                                          kBothConditions.end()};
  int k = 5;
  std::uint64_t seed = 0;
  bool strict_corpus = true;
};

GenerateSummary run_generate(const GenerateSpec& spec);

// Loads corpus, bank and providers from the config's paths, then runs.
RunSummary run_campaign_from_config(const CampaignConfig& config,
                                    const std::string& ledger_path,
                                    const RunOptions& options);
RunSummary run_head_to_head_from_config(const CampaignConfig& config,
                                        const std::string& ledger_path,
                                        const RunOptions& options);

struct AnalyzeOptions {
  int permutation_replications = 2000;
  double confidence = 0.95;
};

struct AnalyzeResult {
  std::string kind;  // ledger kind analyzed
  std::vector<std::string> report_paths;
};

// Offline: reads the ledger, writes report.md / report.csv / report.json
// into out_dir. Permutation seeds derive from the ledger's own seed, so the
// same ledger always renders byte-identical reports.
AnalyzeResult run_analyze(const std::string& ledger_path,
                          const std::string& out_dir,
                          const AnalyzeOptions& options = {});

struct SimulateSpec {
  std::uint64_t seed = 1;
  std::string strengths = "fixture";  // strength-table path, or "fixture"
  std::string corpus_path;            // empty = built-in fixture corpus
  int trials_per_condition = 600;
  int judges = 1;
  int k = 5;
  int parallelism = 4;
  std::string out_dir;
  std::int64_t max_new_trials = 0;  // 0 = run to completion
  bool store_objects = false;
  int permutation_replications = 2000;
};

struct SimulateResult {
  std::string corpus_path;
  std::string strengths_path;
  std::string providers_path;
  std::string bank_path;
  std::string ledger_path;
  std::vector<std::string> report_paths;  // empty when the run was paused
  RunSummary run;
};

// Fully synthetic end-to-end campaign under a Bradley-Terry strength table:
// fixture corpus (or the given one), synthetic advocate bank, synthetic
// judges, ledger, reports. Deterministic: a seed fixes every output byte.
SimulateResult run_simulate(const SimulateSpec& spec);

}  // namespace persuade
