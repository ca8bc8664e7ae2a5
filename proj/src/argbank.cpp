#include "persuade/argbank.hpp"

#include <algorithm>
#include <filesystem>
#include <set>

#include "jsonio.hpp"
#include "persuade/digest.hpp"
#include "persuade/error.hpp"

namespace persuade {

using jsonio::json;

const char* condition_name(PromptCondition c) {
  switch (c) {
    case PromptCondition::FactsOnly: return "facts_only";
    case PromptCondition::WithOriginalArguments: return "with_original_arguments";
  }
  return "facts_only";
}

std::optional<PromptCondition> condition_from_name(std::string_view name) {
  if (name == "facts_only") return PromptCondition::FactsOnly;
  if (name == "with_original_arguments") {
    return PromptCondition::WithOriginalArguments;
  }
  return std::nullopt;
}

namespace {

// Single versioned template for both conditions; {original_arguments_block}
// collapses to nothing under facts_only. Its hash is recorded in every
// generated record.
constexpr const char* kAdvocateTemplate =
    "You are counsel instructed in a case before the courts of "
    "{jurisdiction}.\n"
    "\n"
    "The facts of the case:\n"
    "\n"
    "{fact_1}\n"
    "\n"
    "{fact_2}\n"
    "\n"
    "{fact_3}\n"
    "\n"
    "The central legal question: {legal_question}\n"
    "{original_arguments_block}"
    "\n"
    "Write the most convincing argument that you can for the {party_label}. "
    "Argue only the {party_label}'s side of the question, as persuasively as "
    "you can on these facts. Reply with the argument text alone.\n";

constexpr const char* kOriginalArgumentsBlock =
    "\n"
    "A summary of the principal arguments advanced by the parties in the "
    "original case:\n"
    "\n"
    "{original_argument_1}\n"
    "\n"
    "{original_argument_2}\n";

void replace_all(std::string& text, std::string_view key,
                 std::string_view value) {
  std::size_t pos = 0;
  while ((pos = text.find(key, pos)) != std::string::npos) {
    text.replace(pos, key.size(), value);
    pos += value.size();
  }
}

std::string cell_label(const std::string& scenario_id, int side,
                       const std::string& advocate, PromptCondition cond) {
  return "(scenario " + scenario_id + ", side " + std::to_string(side) +
         ", advocate " + advocate + ", " + condition_name(cond) + ")";
}

}  // namespace

std::string build_advocate_prompt(const Scenario& s, int side,
                                  PromptCondition cond) {
  std::string text = kAdvocateTemplate;
  std::string block;
  if (cond == PromptCondition::WithOriginalArguments) {
    block = kOriginalArgumentsBlock;
    replace_all(block, "{original_argument_1}", s.original_arguments[0]);
    replace_all(block, "{original_argument_2}", s.original_arguments[1]);
  }
  replace_all(text, "{original_arguments_block}", block);
  replace_all(text, "{jurisdiction}",
              jurisdiction_display_name(s.jurisdiction));
  replace_all(text, "{fact_1}", s.facts[0]);
  replace_all(text, "{fact_2}", s.facts[1]);
  replace_all(text, "{fact_3}", s.facts[2]);
  replace_all(text, "{legal_question}", s.legal_question);
  replace_all(text, "{party_label}", s.party_label(side));
  return text;
}

const std::string& advocate_template_hash() {
  static const std::string hash =
      sha256_hex(std::string(kAdvocateTemplate) + kOriginalArgumentsBlock);
  return hash;
}

std::vector<const ArgumentRecord*> ArgumentBank::side_pool(
    std::string_view scenario_id, int side, PromptCondition cond) const {
  std::vector<const ArgumentRecord*> out;
  for (const auto& r : records) {
    if (r.scenario_id == scenario_id && r.side == side && r.condition == cond) {
      out.push_back(&r);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const ArgumentRecord* a, const ArgumentRecord* b) {
              return std::tie(a->advocate, a->replicate) <
                     std::tie(b->advocate, b->replicate);
            });
  return out;
}

const ArgumentRecord* ArgumentBank::find(std::string_view scenario_id, int side,
                                         std::string_view advocate,
                                         PromptCondition cond,
                                         int replicate) const {
  for (const auto& r : records) {
    if (r.scenario_id == scenario_id && r.side == side &&
        r.advocate == advocate && r.condition == cond &&
        r.replicate == replicate) {
      return &r;
    }
  }
  return nullptr;
}

std::string manifest_path_for(const std::string& bank_path) {
  return bank_path + ".manifest.json";
}

namespace {

json record_to_json(const ArgumentRecord& r) {
  json j;
  j["scenario_id"] = r.scenario_id;
  j["side"] = r.side;
  j["advocate"] = r.advocate;
  j["condition"] = condition_name(r.condition);
  j["replicate"] = r.replicate;
  j["text"] = r.text;
  j["generation_digest"] = r.generation_digest;
  j["template_hash"] = r.template_hash;
  return j;
}

ArgumentRecord record_from_json(const json& j, const std::string& path) {
  ArgumentRecord r;
  r.scenario_id = jsonio::get_string(j, "scenario_id", path);
  r.side = static_cast<int>(jsonio::get_int(j, "side", path));
  r.advocate = jsonio::get_string(j, "advocate", path);
  std::string cond = jsonio::get_string(j, "condition", path);
  auto c = condition_from_name(cond);
  if (!c) {
    raise(ErrorCode::Schema, path + ".condition: unknown condition '" + cond + "'");
  }
  r.condition = *c;
  r.replicate = static_cast<int>(jsonio::get_int(j, "replicate", path));
  r.text = jsonio::get_string(j, "text", path);
  r.generation_digest = jsonio::get_string(j, "generation_digest", path);
  r.template_hash = jsonio::get_string(j, "template_hash", path);
  return r;
}

std::string cell_key(const std::string& scenario_id, int side,
                     const std::string& advocate, PromptCondition cond) {
  return scenario_id + "\x1f" + std::to_string(side) + "\x1f" + advocate +
         "\x1f" + condition_name(cond);
}

void write_manifest(const std::string& bank_path, const Corpus& corpus,
                    const std::vector<std::string>& advocate_ids,
                    const std::vector<PromptCondition>& conditions, int k,
                    const std::map<std::string, std::set<int>>& present) {
  json manifest;
  manifest["k"] = k;
  manifest["advocates"] = advocate_ids;
  json conds = json::array();
  for (auto c : conditions) conds.push_back(condition_name(c));
  manifest["conditions"] = std::move(conds);
  json scenario_ids = json::array();
  for (const auto& s : corpus.scenarios) scenario_ids.push_back(s.id);
  manifest["scenario_ids"] = std::move(scenario_ids);

  int expected = static_cast<int>(corpus.scenarios.size() *
                                  advocate_ids.size() * 2 * conditions.size() * k);
  int present_count = 0;
  json missing = json::array();
  for (const auto& s : corpus.scenarios) {
    for (auto cond : conditions) {
      for (const auto& adv : advocate_ids) {
        for (int side = 1; side <= 2; ++side) {
          auto it = present.find(cell_key(s.id, side, adv, cond));
          json missing_reps = json::array();
          for (int rep = 1; rep <= k; ++rep) {
            if (it != present.end() && it->second.count(rep)) {
              ++present_count;
            } else {
              missing_reps.push_back(rep);
            }
          }
          if (!missing_reps.empty()) {
            missing.push_back({{"scenario_id", s.id},
                               {"side", side},
                               {"advocate", adv},
                               {"condition", condition_name(cond)},
                               {"replicates", std::move(missing_reps)}});
          }
        }
      }
    }
  }
  manifest["expected"] = expected;
  manifest["present"] = present_count;
  manifest["complete"] = (present_count == expected);
  manifest["missing"] = std::move(missing);
  jsonio::write_file(manifest_path_for(bank_path), manifest.dump(2) + "\n");
}

}  // namespace

GenerateSummary generate_bank(const Corpus& corpus,
                              const std::vector<ModelSpec>& advocates,
                              const std::vector<PromptCondition>& conditions,
                              int k, std::uint64_t seed,
                              const std::string& bank_path) {
  if (advocates.empty()) raise(ErrorCode::EmptyInput, "no advocates given");
  if (conditions.empty()) raise(ErrorCode::EmptyInput, "no conditions given");
  if (k < 1) raise(ErrorCode::Domain, "k must be >= 1");
  for (const auto& spec : advocates) {
    if (spec.kind == ProviderKind::SyntheticJudge) {
      raise(ErrorCode::Validation,
            "model '" + spec.id + "' is a judge, not an advocate");
    }
  }

  GenerateSummary summary;
  summary.expected = static_cast<int>(corpus.scenarios.size() *
                                      advocates.size() * 2 * conditions.size() * k);

  // Resume: anything already on disk stays as-is.
  std::map<std::string, std::set<int>> present;
  if (std::filesystem::exists(bank_path)) {
    ArgumentBank existing = load_bank(bank_path);
    for (const auto& r : existing.records) {
      present[cell_key(r.scenario_id, r.side, r.advocate, r.condition)].insert(
          r.replicate);
      ++summary.reused;
    }
  }

  std::ofstream out(bank_path, std::ios::binary | std::ios::app);
  if (!out) raise(ErrorCode::Io, "cannot open '" + bank_path + "' for append");

  std::vector<std::string> advocate_ids;
  for (const auto& spec : advocates) advocate_ids.push_back(spec.id);

  for (const auto& s : corpus.scenarios) {
    for (auto cond : conditions) {
      for (const auto& spec : advocates) {
        for (int side = 1; side <= 2; ++side) {
          auto& have = present[cell_key(s.id, side, spec.id, cond)];
          const std::string prompt = build_advocate_prompt(s, side, cond);
          for (int rep = 1; rep <= k; ++rep) {
            if (have.count(rep)) continue;
            std::uint64_t cell_seed =
                mix64(seed ^ hash64(cell_key(s.id, side, spec.id, cond))) +
                static_cast<std::uint64_t>(rep);
            try {
              CompletionResult result = complete(spec, prompt, cell_seed);
              ArgumentRecord r;
              r.scenario_id = s.id;
              r.side = side;
              r.advocate = spec.id;
              r.condition = cond;
              r.replicate = rep;
              r.text = std::move(result.text);
              r.generation_digest = result.request_digest;
              r.template_hash = advocate_template_hash();
              out << record_to_json(r).dump() << "\n";
              if (!out) raise(ErrorCode::Io, "write error on '" + bank_path + "'");
              have.insert(rep);
              ++summary.issued;
            } catch (const Error& e) {
              summary.failures.push_back(
                  cell_label(s.id, side, spec.id, cond) + " replicate " +
                  std::to_string(rep) + ": " + e.what());
            }
          }
        }
      }
    }
  }
  out.flush();
  write_manifest(bank_path, corpus, advocate_ids, conditions, k, present);
  return summary;
}

ArgumentBank load_bank(const std::string& bank_path) {
  ArgumentBank bank;
  std::ifstream in(bank_path, std::ios::binary);
  if (!in) raise(ErrorCode::Io, "cannot read '" + bank_path + "'");
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      raise(ErrorCode::Schema,
            bank_path + ":" + std::to_string(lineno) + ": not valid JSON");
    }
    bank.records.push_back(
        record_from_json(j, bank_path + ":" + std::to_string(lineno)));
  }

  const std::string mpath = manifest_path_for(bank_path);
  if (std::filesystem::exists(mpath)) {
    json m = jsonio::parse(jsonio::read_file(mpath), "bank manifest");
    bank.k = static_cast<int>(jsonio::get_int(m, "k", "manifest"));
    bank.advocates = jsonio::get_string_array(m, "advocates", "manifest");
    for (const auto& name :
         jsonio::get_string_array(m, "conditions", "manifest")) {
      auto c = condition_from_name(name);
      if (!c) {
        raise(ErrorCode::Schema, "manifest.conditions: unknown '" + name + "'");
      }
      bank.conditions.push_back(*c);
    }
  } else {
    // No manifest: infer the intended shape from what is present.
    int max_rep = 1;
    std::set<std::string> advs;
    std::set<std::string> conds;
    for (const auto& r : bank.records) {
      max_rep = std::max(max_rep, r.replicate);
      advs.insert(r.advocate);
      conds.insert(condition_name(r.condition));
    }
    bank.k = max_rep;
    bank.advocates.assign(advs.begin(), advs.end());
    for (const auto& name : conds) {
      bank.conditions.push_back(*condition_from_name(name));
    }
  }
  return bank;
}

std::string bank_content_digest(const ArgumentBank& bank) {
  std::string all;
  for (const auto& r : bank.records) {
    all += record_to_json(r).dump();
    all += '\n';
  }
  return sha256_hex(all);
}

std::vector<std::string> validate_bank(const ArgumentBank& bank,
                                       const Corpus& corpus) {
  std::vector<std::string> out;

  std::set<std::string> advocate_set(bank.advocates.begin(),
                                     bank.advocates.end());
  std::set<PromptCondition> condition_set(bank.conditions.begin(),
                                          bank.conditions.end());

  std::map<std::string, std::set<int>> present;
  for (const auto& r : bank.records) {
    const std::string where =
        cell_label(r.scenario_id, r.side, r.advocate, r.condition) +
        " replicate " + std::to_string(r.replicate);
    if (!corpus.find(r.scenario_id)) {
      out.push_back(where + ": scenario id does not resolve against corpus");
    }
    if (r.side != 1 && r.side != 2) out.push_back(where + ": side not 1 or 2");
    if (!advocate_set.count(r.advocate)) {
      out.push_back(where + ": advocate not declared by the bank");
    }
    if (!condition_set.count(r.condition)) {
      out.push_back(where + ": condition not declared by the bank");
    }
    if (r.replicate < 1 || r.replicate > bank.k) {
      out.push_back(where + ": replicate outside 1.." + std::to_string(bank.k));
    }
    if (r.text.empty()) out.push_back(where + ": text empty");
    if (!r.advocate.empty() && r.text.find(r.advocate) != std::string::npos) {
      out.push_back(where + ": blinding violation, text contains advocate id");
    }
    auto& have = present[cell_key(r.scenario_id, r.side, r.advocate, r.condition)];
    if (!have.insert(r.replicate).second) {
      out.push_back(where + ": duplicate replicate");
    }
  }

  for (const auto& s : corpus.scenarios) {
    for (auto cond : bank.conditions) {
      for (const auto& adv : bank.advocates) {
        for (int side = 1; side <= 2; ++side) {
          auto it = present.find(cell_key(s.id, side, adv, cond));
          for (int rep = 1; rep <= bank.k; ++rep) {
            if (it == present.end() || !it->second.count(rep)) {
              out.push_back("missing " + cell_label(s.id, side, adv, cond) +
                            " replicate " + std::to_string(rep));
            }
          }
        }
      }
    }
  }
  return out;
}

}  // namespace persuade
