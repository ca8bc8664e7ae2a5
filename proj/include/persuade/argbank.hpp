#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "persuade/corpus.hpp"
#include "persuade/providers.hpp"

namespace persuade {

enum class PromptCondition { FactsOnly, WithOriginalArguments };

inline constexpr std::array<PromptCondition, 2> kBothConditions = {
    PromptCondition::FactsOnly, PromptCondition::WithOriginalArguments};

const char* condition_name(PromptCondition c);  // "facts_only" | "with_original_arguments"
std::optional<PromptCondition> condition_from_name(std::string_view name);

struct ArgumentRecord {
  std::string scenario_id;
  int side = 1;  // 1 or 2
  std::string advocate;
  PromptCondition condition = PromptCondition::FactsOnly;
  int replicate = 1;  // 1..k within its cell
  std::string text;
  std::string generation_digest;  // sha256 over (prompt, model, params)
  std::string template_hash;

  bool operator==(const ArgumentRecord&) const = default;
};

struct ArgumentBank {
  std::vector<ArgumentRecord> records;
  int k = 5;
  std::vector<std::string> advocates;   // intended advocate ids
  std::vector<PromptCondition> conditions;

  // All records of one (scenario, side, condition) cell group, ordered by
  // (advocate, replicate). This is the pool trial sampling draws from.
  std::vector<const ArgumentRecord*> side_pool(std::string_view scenario_id,
                                               int side,
                                               PromptCondition cond) const;

  const ArgumentRecord* find(std::string_view scenario_id, int side,
                             std::string_view advocate, PromptCondition cond,
                             int replicate) const;
};

// Advocate prompt under one condition: facts, legal question, under
// WithOriginalArguments both original-argument paragraphs, then the
// instruction to argue the given side as persuasively as possible.
std::string build_advocate_prompt(const Scenario& s, int side,
                                  PromptCondition cond);

// Hash of the advocate prompt template text (with placeholders), recorded in
// every generated record so reruns are auditable.
const std::string& advocate_template_hash();

struct GenerateSummary {
  int issued = 0;       // completions actually requested this run
  int reused = 0;       // records already on disk
  int expected = 0;     // full-bank record count
  std::vector<std::string> failures;  // one entry per failed cell replicate
};

// Builds (or resumes) the bank at bank_path as append-only JSON Lines plus a
// companion manifest. Existing records are never regenerated.
GenerateSummary generate_bank(const Corpus& corpus,
                              const std::vector<ModelSpec>& advocates,
                              const std::vector<PromptCondition>& conditions,
                              int k, std::uint64_t seed,
                              const std::string& bank_path);

ArgumentBank load_bank(const std::string& bank_path);

// Digest of the bank's record content (independent of file layout); ties
// ledgers to the exact arguments they were run over.
std::string bank_content_digest(const ArgumentBank& bank);

// Empty iff the bank is complete for (corpus x advocates x sides x conditions
// x k), every scenario id resolves, and every record invariant holds.
std::vector<std::string> validate_bank(const ArgumentBank& bank,
                                       const Corpus& corpus);

std::string manifest_path_for(const std::string& bank_path);

}  // namespace persuade
