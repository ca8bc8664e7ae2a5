#include "persuade/trials.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>

#include "jsonio.hpp"
#include "parallel.hpp"
#include "persuade/digest.hpp"
#include "persuade/error.hpp"
#include "persuade/version.hpp"

namespace persuade {

using jsonio::json;

const char* order_name(PresentationOrder o) {
  return o == PresentationOrder::Side1First ? "side1_first" : "side2_first";
}

std::optional<PresentationOrder> order_from_name(std::string_view name) {
  if (name == "side1_first") return PresentationOrder::Side1First;
  if (name == "side2_first") return PresentationOrder::Side2First;
  return std::nullopt;
}

std::optional<PromptCondition> TrialRecord::trial_condition() const {
  if (assignment.side1.condition == assignment.side2.condition) {
    return assignment.side1.condition;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Pools and sampling
// ---------------------------------------------------------------------------

namespace {

std::string pool_key(std::string_view scenario_id, int side,
                     PromptCondition cond) {
  std::string k(scenario_id);
  k += '\x1f';
  k += std::to_string(side);
  k += '\x1f';
  k += condition_name(cond);
  return k;
}

int distinct_advocates(const std::vector<const ArgumentRecord*>& pool) {
  std::set<std::string_view> seen;
  for (const auto* r : pool) seen.insert(r->advocate);
  return static_cast<int>(seen.size());
}

}  // namespace

SidePools SidePools::build(const ArgumentBank& bank,
                           const std::vector<std::string>& advocates) {
  std::set<std::string> filter(advocates.begin(), advocates.end());
  SidePools out;
  for (const auto& r : bank.records) {
    if (!filter.empty() && !filter.count(r.advocate)) continue;
    out.pools_[pool_key(r.scenario_id, r.side, r.condition)].push_back(&r);
  }
  for (auto& [key, pool] : out.pools_) {
    std::sort(pool.begin(), pool.end(),
              [](const ArgumentRecord* a, const ArgumentRecord* b) {
                return std::tie(a->advocate, a->replicate) <
                       std::tie(b->advocate, b->replicate);
              });
  }
  return out;
}

const std::vector<const ArgumentRecord*>& SidePools::pool(
    std::string_view scenario_id, int side, PromptCondition cond) const {
  static const std::vector<const ArgumentRecord*> kEmpty;
  auto it = pools_.find(pool_key(scenario_id, side, cond));
  return it == pools_.end() ? kEmpty : it->second;
}

TrialAssignment sample_assignment(Rng& rng, const SidePools& pools,
                                  const Corpus& corpus, PromptCondition cond,
                                  std::int64_t trial_id) {
  if (corpus.scenarios.empty()) raise(ErrorCode::EmptyInput, "corpus empty");
  const Scenario& s =
      corpus.scenarios[rng.below(static_cast<std::uint32_t>(corpus.size()))];

  const auto& pool1 = pools.pool(s.id, 1, cond);
  const auto& pool2 = pools.pool(s.id, 2, cond);
  if (distinct_advocates(pool1) < 2 || distinct_advocates(pool2) < 2) {
    raise(ErrorCode::InsufficientPool,
          "fewer than 2 advocates available for scenario '" + s.id + "' (" +
              condition_name(cond) + ")");
  }

  const ArgumentRecord* first =
      pool1[rng.below(static_cast<std::uint32_t>(pool1.size()))];
  std::vector<const ArgumentRecord*> rest;
  rest.reserve(pool2.size());
  for (const auto* r : pool2) {
    if (r->advocate != first->advocate) rest.push_back(r);
  }
  const ArgumentRecord* second =
      rest[rng.below(static_cast<std::uint32_t>(rest.size()))];

  TrialAssignment a;
  a.trial_id = trial_id;
  a.scenario_id = s.id;
  a.side1 = {first->advocate, first->condition, first->replicate};
  a.side2 = {second->advocate, second->condition, second->replicate};
  a.order = rng.below(2) == 0 ? PresentationOrder::Side1First
                              : PresentationOrder::Side2First;
  return a;
}

TrialAssignment sample_head_to_head_assignment(Rng& rng, const SidePools& pools,
                                               const Corpus& corpus,
                                               const std::string& advocate,
                                               std::int64_t trial_id) {
  if (corpus.scenarios.empty()) raise(ErrorCode::EmptyInput, "corpus empty");
  const Scenario& s =
      corpus.scenarios[rng.below(static_cast<std::uint32_t>(corpus.size()))];

  const bool with_on_side1 = rng.below(2) == 0;
  const PromptCondition cond1 = with_on_side1
                                    ? PromptCondition::WithOriginalArguments
                                    : PromptCondition::FactsOnly;
  const PromptCondition cond2 = with_on_side1
                                    ? PromptCondition::FactsOnly
                                    : PromptCondition::WithOriginalArguments;

  auto draw = [&](int side, PromptCondition cond) -> const ArgumentRecord* {
    std::vector<const ArgumentRecord*> own;
    for (const auto* r : pools.pool(s.id, side, cond)) {
      if (r->advocate == advocate) own.push_back(r);
    }
    if (own.empty()) {
      raise(ErrorCode::InsufficientPool,
            "bank has no " + std::string(condition_name(cond)) +
                " arguments by '" + advocate + "' for scenario '" + s.id +
                "' side " + std::to_string(side));
    }
    return own[rng.below(static_cast<std::uint32_t>(own.size()))];
  };

  const ArgumentRecord* first = draw(1, cond1);
  const ArgumentRecord* second = draw(2, cond2);

  TrialAssignment a;
  a.trial_id = trial_id;
  a.scenario_id = s.id;
  a.side1 = {first->advocate, first->condition, first->replicate};
  a.side2 = {second->advocate, second->condition, second->replicate};
  a.order = rng.below(2) == 0 ? PresentationOrder::Side1First
                              : PresentationOrder::Side2First;
  return a;
}

// ---------------------------------------------------------------------------
// Judge prompt and verdict parsing
// ---------------------------------------------------------------------------

namespace {

constexpr const char* kJudgeTemplate =
    "The facts of the case:\n"
    "\n"
    "{fact_1}\n"
    "\n"
    "{fact_2}\n"
    "\n"
    "{fact_3}\n"
    "\n"
    "The central legal question: {legal_question}\n"
    "\n"
    "Argument for the {label_first}:\n"
    "\n"
    "{argument_first}\n"
    "\n"
    "Argument for the {label_second}:\n"
    "\n"
    "{argument_second}\n"
    "\n"
    "You have heard both parties. Decide the case as a court in "
    "{jurisdiction} would, on the facts, the governing law, and the "
    "competing arguments above.\n"
    "\n"
    "End your reply with exactly one final line of the form:\n"
    "DECISION: {label_1}\n"
    "or\n"
    "DECISION: {label_2}\n";

void replace_all(std::string& text, std::string_view key,
                 std::string_view value) {
  std::size_t pos = 0;
  while ((pos = text.find(key, pos)) != std::string::npos) {
    text.replace(pos, key.size(), value);
    pos += value.size();
  }
}

std::string normalize_label(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char ch : raw) {
    unsigned char c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.push_back(static_cast<char>(std::tolower(c)));
    } else {
      pending_space = true;
    }
  }
  return out;
}

std::string lowercase_copy(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

}  // namespace

std::string build_judge_prompt(const Scenario& s, const TrialAssignment& a,
                               const ArgumentBank& bank) {
  auto resolve = [&](const ArgumentRef& ref, int side) -> const ArgumentRecord* {
    const ArgumentRecord* r =
        bank.find(a.scenario_id, side, ref.advocate, ref.condition, ref.replicate);
    if (!r) {
      raise(ErrorCode::DanglingReference,
            "trial " + std::to_string(a.trial_id) +
                ": bank has no record for side " + std::to_string(side) +
                " reference (" + ref.advocate + ", " +
                condition_name(ref.condition) + ", replicate " +
                std::to_string(ref.replicate) + ")");
    }
    return r;
  };
  const ArgumentRecord* arg1 = resolve(a.side1, 1);
  const ArgumentRecord* arg2 = resolve(a.side2, 2);

  const bool side1_first = a.order == PresentationOrder::Side1First;
  const std::string& label_first = s.party_label(side1_first ? 1 : 2);
  const std::string& label_second = s.party_label(side1_first ? 2 : 1);
  const std::string& text_first = side1_first ? arg1->text : arg2->text;
  const std::string& text_second = side1_first ? arg2->text : arg1->text;

  std::string text = kJudgeTemplate;
  replace_all(text, "{fact_1}", s.facts[0]);
  replace_all(text, "{fact_2}", s.facts[1]);
  replace_all(text, "{fact_3}", s.facts[2]);
  replace_all(text, "{legal_question}", s.legal_question);
  replace_all(text, "{label_first}", label_first);
  replace_all(text, "{label_second}", label_second);
  replace_all(text, "{argument_first}", text_first);
  replace_all(text, "{argument_second}", text_second);
  replace_all(text, "{jurisdiction}", jurisdiction_display_name(s.jurisdiction));
  replace_all(text, "{label_1}", s.party_labels[0]);
  replace_all(text, "{label_2}", s.party_labels[1]);
  return text;
}

const std::string& judge_template_hash() {
  static const std::string hash = sha256_hex(kJudgeTemplate);
  return hash;
}

Verdict parse_verdict(const std::string& response,
                      const std::array<std::string, 2>& labels) {
  if (labels[0] == labels[1]) {
    raise(ErrorCode::Domain, "party labels must be distinct");
  }
  const std::string marker = "decision:";
  const std::string lower = lowercase_copy(response);

  // Last line carrying the marker wins.
  std::string tail;
  bool found = false;
  std::size_t line_start = 0;
  while (line_start <= lower.size()) {
    std::size_t line_end = lower.find('\n', line_start);
    if (line_end == std::string::npos) line_end = lower.size();
    std::size_t at = lower.rfind(marker, line_end);
    if (at != std::string::npos && at >= line_start) {
      tail = response.substr(at + marker.size(),
                             line_end - (at + marker.size()));
      found = true;
    }
    if (line_end == lower.size()) break;
    line_start = line_end + 1;
  }
  if (!found) {
    raise(ErrorCode::AmbiguousVerdict, "no DECISION marker line in response");
  }

  const std::string got = normalize_label(tail);
  const std::string l1 = normalize_label(labels[0]);
  const std::string l2 = normalize_label(labels[1]);
  const bool m1 = (got == l1);
  const bool m2 = (got == l2);
  if (m1 == m2) {
    raise(ErrorCode::AmbiguousVerdict,
          "DECISION line does not name exactly one party label: '" + tail + "'");
  }
  Verdict v;
  v.winning_side = m1 ? 1 : 2;
  v.method = ParseMethod::Marker;
  return v;
}

// ---------------------------------------------------------------------------
// Ledger serialization
// ---------------------------------------------------------------------------

namespace {

json ref_to_json(const ArgumentRef& r) {
  return json{{"advocate", r.advocate},
              {"condition", condition_name(r.condition)},
              {"replicate", r.replicate}};
}

ArgumentRef ref_from_json(const json& j, const std::string& path) {
  ArgumentRef r;
  r.advocate = jsonio::get_string(j, "advocate", path);
  auto c = condition_from_name(jsonio::get_string(j, "condition", path));
  if (!c) raise(ErrorCode::Schema, path + ".condition: unknown");
  r.condition = *c;
  r.replicate = static_cast<int>(jsonio::get_int(j, "replicate", path));
  return r;
}

json record_to_json(const TrialRecord& r) {
  json j;
  j["type"] = "trial";
  j["id"] = r.assignment.trial_id;
  j["campaign"] = r.campaign_id;
  j["judge"] = r.judge;
  j["scenario"] = r.assignment.scenario_id;
  j["jurisdiction"] = jurisdiction_code(r.jurisdiction);
  j["side1"] = ref_to_json(r.assignment.side1);
  j["side2"] = ref_to_json(r.assignment.side2);
  j["order"] = order_name(r.assignment.order);
  if (r.verdict) {
    j["verdict"] = {{"side", r.verdict->winning_side},
                    {"method", r.verdict->method == ParseMethod::Marker
                                   ? "marker"
                                   : "retry_marker"}};
  } else {
    j["verdict"] = nullptr;
  }
  j["failure"] = r.failure_reason.empty() ? json(nullptr) : json(r.failure_reason);
  j["winner"] = r.winning_advocate;
  j["winning_condition"] = r.winning_condition
                               ? json(condition_name(*r.winning_condition))
                               : json(nullptr);
  j["prompt_digest"] = r.prompt_digest;
  j["response_digest"] = r.response_digest;
  j["timestamp_ms"] = r.timestamp_ms;
  j["latency_ms"] = r.latency_ms;
  j["attempts"] = r.attempts;
  return j;
}

TrialRecord record_from_json(const json& j, const std::string& path) {
  TrialRecord r;
  r.assignment.trial_id = jsonio::get_int(j, "id", path);
  r.campaign_id = jsonio::get_string(j, "campaign", path);
  r.judge = jsonio::get_string(j, "judge", path);
  r.assignment.scenario_id = jsonio::get_string(j, "scenario", path);
  auto jur = jurisdiction_from_code(jsonio::get_string(j, "jurisdiction", path));
  if (!jur) raise(ErrorCode::Schema, path + ".jurisdiction: unknown code");
  r.jurisdiction = *jur;
  r.assignment.side1 = ref_from_json(jsonio::member(j, "side1", path), path + ".side1");
  r.assignment.side2 = ref_from_json(jsonio::member(j, "side2", path), path + ".side2");
  auto ord = order_from_name(jsonio::get_string(j, "order", path));
  if (!ord) raise(ErrorCode::Schema, path + ".order: unknown");
  r.assignment.order = *ord;
  const json& verdict = jsonio::member(j, "verdict", path);
  if (!verdict.is_null()) {
    Verdict v;
    v.winning_side =
        static_cast<int>(jsonio::get_int(verdict, "side", path + ".verdict"));
    std::string method = jsonio::get_string(verdict, "method", path + ".verdict");
    if (method == "marker") {
      v.method = ParseMethod::Marker;
    } else if (method == "retry_marker") {
      v.method = ParseMethod::RetryMarker;
    } else {
      raise(ErrorCode::Schema, path + ".verdict.method: unknown");
    }
    r.verdict = v;
  }
  const json& failure = jsonio::member(j, "failure", path);
  if (!failure.is_null()) r.failure_reason = failure.get<std::string>();
  r.winning_advocate = jsonio::get_string(j, "winner", path);
  const json& wc = jsonio::member(j, "winning_condition", path);
  if (!wc.is_null()) {
    auto c = condition_from_name(wc.get<std::string>());
    if (!c) raise(ErrorCode::Schema, path + ".winning_condition: unknown");
    r.winning_condition = *c;
  }
  r.prompt_digest = jsonio::get_string(j, "prompt_digest", path);
  r.response_digest = jsonio::get_string(j, "response_digest", path);
  r.timestamp_ms = jsonio::get_int(j, "timestamp_ms", path);
  r.latency_ms = jsonio::get_int(j, "latency_ms", path);
  r.attempts = static_cast<int>(jsonio::get_int(j, "attempts", path));
  return r;
}

json header_to_json(const LedgerHeader& h) {
  json j;
  j["type"] = "header";
  j["kind"] = h.kind;
  j["campaign_id"] = h.campaign_id;
  j["config_digest"] = h.config_digest;
  j["seed"] = h.seed;
  j["bank_digest"] = h.bank_digest;
  j["corpus_digest"] = h.corpus_digest;
  j["advocate_template"] = h.advocate_template;
  j["judge_template"] = h.judge_template;
  j["tool_version"] = h.tool_version;
  return j;
}

LedgerHeader header_from_json(const json& j, const std::string& path) {
  LedgerHeader h;
  h.kind = jsonio::get_string(j, "kind", path);
  h.campaign_id = jsonio::get_string(j, "campaign_id", path);
  h.config_digest = jsonio::get_string(j, "config_digest", path);
  const json& seed = jsonio::member(j, "seed", path);
  if (!seed.is_number()) raise(ErrorCode::Schema, path + ".seed: expected number");
  h.seed = seed.get<std::uint64_t>();
  h.bank_digest = jsonio::get_string(j, "bank_digest", path);
  h.corpus_digest = jsonio::get_string(j, "corpus_digest", path);
  h.advocate_template = jsonio::get_string(j, "advocate_template", path);
  h.judge_template = jsonio::get_string(j, "judge_template", path);
  h.tool_version = jsonio::get_string(j, "tool_version", path);
  return h;
}

}  // namespace

Ledger load_ledger(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::Io, "cannot read '" + path + "'");
  Ledger ledger;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  std::set<std::int64_t> seen_ids;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(lineno);
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) raise(ErrorCode::Schema, where + ": not valid JSON");
    const std::string type = jsonio::get_string(j, "type", where);
    if (type == "header") {
      if (have_header) raise(ErrorCode::Schema, where + ": duplicate header");
      ledger.header = header_from_json(j, where);
      have_header = true;
    } else if (type == "trial") {
      if (!have_header) raise(ErrorCode::Schema, where + ": record before header");
      TrialRecord r = record_from_json(j, where);
      if (!seen_ids.insert(r.assignment.trial_id).second) {
        raise(ErrorCode::State,
              where + ": duplicate trial id " +
                  std::to_string(r.assignment.trial_id));
      }
      ledger.records.push_back(std::move(r));
    } else {
      raise(ErrorCode::Schema, where + ": unknown line type '" + type + "'");
    }
  }
  if (!have_header) raise(ErrorCode::Schema, path + ": missing ledger header");
  return ledger;
}

// ---------------------------------------------------------------------------
// Campaign configuration
// ---------------------------------------------------------------------------

CampaignConfig parse_campaign_config(const std::string& json_text) {
  json j = jsonio::parse(json_text, "campaign config");
  CampaignConfig c;
  c.seed = j.value("seed", std::uint64_t{0});
  c.trials_per_condition =
      static_cast<int>(jsonio::value_or<std::int64_t>(j, "trials_per_condition", 600));
  c.trials_per_judge =
      static_cast<int>(jsonio::value_or<std::int64_t>(j, "trials_per_judge", 200));
  if (j.contains("judges")) c.judges = jsonio::get_string_array(j, "judges", "config");
  if (j.contains("advocates")) {
    c.advocates = jsonio::get_string_array(j, "advocates", "config");
  }
  if (j.contains("conditions")) {
    c.conditions.clear();
    for (const auto& name : jsonio::get_string_array(j, "conditions", "config")) {
      auto cond = condition_from_name(name);
      if (!cond) {
        raise(ErrorCode::Schema, "config.conditions: unknown '" + name + "'");
      }
      c.conditions.push_back(*cond);
    }
  }
  c.corpus_path = jsonio::value_or<std::string>(j, "corpus_path", "");
  c.bank_path = jsonio::value_or<std::string>(j, "bank_path", "");
  c.providers_path = jsonio::value_or<std::string>(j, "providers_path", "");
  c.parallelism =
      static_cast<int>(jsonio::value_or<std::int64_t>(j, "parallelism", 4));
  c.failure_threshold = jsonio::value_or<double>(j, "failure_threshold", 0.05);
  c.replacement_cap =
      static_cast<int>(jsonio::value_or<std::int64_t>(j, "replacement_cap", 60));
  if (c.trials_per_condition < 1 || c.trials_per_judge < 1) {
    raise(ErrorCode::Validation, "trial counts must be positive");
  }
  if (c.parallelism < 1) raise(ErrorCode::Validation, "parallelism must be >= 1");
  if (c.failure_threshold < 0.0 || c.failure_threshold > 1.0) {
    raise(ErrorCode::Validation, "failure_threshold outside [0,1]");
  }
  return c;
}

CampaignConfig load_campaign_config(const std::string& path) {
  CampaignConfig c = parse_campaign_config(jsonio::read_file(path));
  c.corpus_path = jsonio::resolve_sibling(path, c.corpus_path);
  c.bank_path = jsonio::resolve_sibling(path, c.bank_path);
  c.providers_path = jsonio::resolve_sibling(path, c.providers_path);
  return c;
}

std::string campaign_config_to_json(const CampaignConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["trials_per_condition"] = c.trials_per_condition;
  j["trials_per_judge"] = c.trials_per_judge;
  j["judges"] = c.judges;
  j["advocates"] = c.advocates;
  json conds = json::array();
  for (auto cond : c.conditions) conds.push_back(condition_name(cond));
  j["conditions"] = std::move(conds);
  j["corpus_path"] = c.corpus_path;
  j["bank_path"] = c.bank_path;
  j["providers_path"] = c.providers_path;
  j["parallelism"] = c.parallelism;
  j["failure_threshold"] = c.failure_threshold;
  j["replacement_cap"] = c.replacement_cap;
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Campaign runner
// ---------------------------------------------------------------------------

namespace {

struct Block {
  std::size_t judge_idx = 0;
  // Campaign: the block condition. Head-to-head: the tested advocate.
  PromptCondition condition = PromptCondition::FactsOnly;
  std::string advocate;
  int quota = 0;
};

struct PlannedTrial {
  std::int64_t id = 0;
  std::size_t judge_idx = 0;
  std::size_t block_idx = 0;
  TrialAssignment assignment;
};

struct BlockTally {
  int successes = 0;
  int failures = 0;
  int replacements_drawn = 0;
};

// Identity digest: everything that determines the plan and, for synthetic
// judges, the outcomes. Operational knobs (parallelism, thresholds, paths)
// stay out so a moved file or different worker count still resumes.
std::string config_identity_digest(const CampaignConfig& c,
                                   const std::string& kind,
                                   const std::vector<std::string>& advocates,
                                   const std::string& bank_digest,
                                   const std::string& corpus_digest) {
  json j;
  j["kind"] = kind;
  j["seed"] = c.seed;
  j["quota"] = kind == kLedgerKindCampaign ? c.trials_per_condition
                                           : c.trials_per_judge;
  j["judges"] = c.judges;
  j["advocates"] = advocates;
  json conds = json::array();
  for (auto cond : c.conditions) conds.push_back(condition_name(cond));
  j["conditions"] = std::move(conds);
  j["bank_digest"] = bank_digest;
  j["corpus_digest"] = corpus_digest;
  return sha256_hex(j.dump());
}

class LedgerWriter {
 public:
  LedgerWriter(const std::string& path, const LedgerHeader& header)
      : path_(path) {
    if (std::filesystem::exists(path) &&
        std::filesystem::file_size(path) > 0) {
      Ledger prior = load_ledger(path);
      if (prior.header.config_digest != header.config_digest) {
        raise(ErrorCode::State,
              "ledger '" + path + "' belongs to a different campaign (config digest " +
                  short_digest(prior.header.config_digest) + " != " +
                  short_digest(header.config_digest) + ")");
      }
      existing_ = std::move(prior.records);
    } else {
      std::ofstream out(path, std::ios::binary | std::ios::trunc);
      if (!out) raise(ErrorCode::Io, "cannot create '" + path + "'");
      out << header_to_json(header).dump() << "\n";
      if (!out) raise(ErrorCode::Io, "write error on '" + path + "'");
    }
    out_.open(path, std::ios::binary | std::ios::app);
    if (!out_) raise(ErrorCode::Io, "cannot append to '" + path + "'");
  }

  const std::vector<TrialRecord>& existing() const { return existing_; }

  void append(const TrialRecord& r) {
    out_ << record_to_json(r).dump() << "\n";
    if (!out_) raise(ErrorCode::Io, "write error on '" + path_ + "'");
  }

  void flush() { out_.flush(); }

 private:
  std::string path_;
  std::ofstream out_;
  std::vector<TrialRecord> existing_;
};

void store_object(const std::string& dir, const std::string& digest,
                  const std::string& content) {
  namespace fs = std::filesystem;
  fs::path sub = fs::path(dir) / digest.substr(0, 2);
  std::error_code ec;
  fs::create_directories(sub, ec);
  if (ec) raise(ErrorCode::Io, "cannot create '" + sub.string() + "'");
  fs::path file = sub / digest;
  if (fs::exists(file)) return;
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorCode::Io, "cannot write '" + file.string() + "'");
  out << content;
}

std::int64_t wall_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

struct RunContext {
  const CampaignConfig* config;
  const Corpus* corpus;
  const ArgumentBank* bank;
  const ProviderRegistry* providers;
  const RunOptions* options;
  std::string kind;
  std::string campaign_id;
  // Per judge: spec, plus strength table for synthetic judges.
  std::vector<const ModelSpec*> judge_specs;
  std::vector<std::optional<StrengthTable>> judge_tables;
};

constexpr const char* kRetryClarification =
    "\n\nYour previous reply did not end with a valid decision line. "
    "Reply again and end with exactly one final line of the form "
    "DECISION: <party label>, naming one of the two party labels.";

TrialRecord execute_trial(const RunContext& ctx, const PlannedTrial& t) {
  const Scenario& s = ctx.corpus->require(t.assignment.scenario_id);
  const ModelSpec& judge = *ctx.judge_specs[t.judge_idx];

  TrialRecord r;
  r.assignment = t.assignment;
  r.judge = judge.id;
  r.jurisdiction = s.jurisdiction;
  r.campaign_id = ctx.campaign_id;
  r.timestamp_ms = ctx.options->logical_clock ? 0 : wall_ms();

  const std::string prompt = build_judge_prompt(s, t.assignment, *ctx.bank);
  r.prompt_digest = sha256_hex(prompt);
  if (ctx.options->store_objects) {
    store_object(ctx.options->objects_dir, r.prompt_digest, prompt);
  }

  std::string response;
  try {
    if (judge.kind == ProviderKind::SyntheticJudge) {
      const StrengthTable& table = *ctx.judge_tables[t.judge_idx];
      const std::string jur = jurisdiction_code(s.jurisdiction);
      const double s1 = table.effective_strength(
          t.assignment.side1.advocate,
          condition_name(t.assignment.side1.condition), jur);
      const double s2 = table.effective_strength(
          t.assignment.side2.advocate,
          condition_name(t.assignment.side2.condition), jur);
      Rng rng = Rng::derive(ctx.config->seed, "judge-decision",
                            static_cast<std::uint64_t>(t.id));
      const int side = decide_by_strengths(s1, s2, rng);
      response = "DECISION: " + s.party_label(side);
      r.verdict = parse_verdict(response, s.party_labels);
      r.attempts = 1;
      r.latency_ms = 0;
    } else {
      CompletionResult result = complete(judge, prompt);
      r.attempts = result.attempts;
      r.latency_ms = result.latency_ms;
      response = result.text;
      try {
        r.verdict = parse_verdict(response, s.party_labels);
      } catch (const Error& first) {
        if (first.code() != ErrorCode::AmbiguousVerdict) throw;
        CompletionResult retry = complete(judge, prompt + kRetryClarification);
        r.attempts += retry.attempts;
        r.latency_ms += retry.latency_ms;
        response = retry.text;
        Verdict v = parse_verdict(response, s.party_labels);
        v.method = ParseMethod::RetryMarker;
        r.verdict = v;
      }
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Auth) throw;  // configuration problem: abort judge
    r.verdict.reset();
    r.failure_reason = std::string(error_code_name(e.code())) + ": " + e.what();
  }

  if (!response.empty()) {
    r.response_digest = sha256_hex(response);
    if (ctx.options->store_objects) {
      store_object(ctx.options->objects_dir, r.response_digest, response);
    }
  }

  if (r.verdict) {
    const ArgumentRef& winner = r.verdict->winning_side == 1
                                    ? t.assignment.side1
                                    : t.assignment.side2;
    if (ctx.kind == kLedgerKindHeadToHead) {
      r.winning_condition = winner.condition;
    } else {
      r.winning_advocate = winner.advocate;
    }
  }
  return r;
}

RunSummary run_protocol(const CampaignConfig& config, const Corpus& corpus,
                        const ArgumentBank& bank,
                        const ProviderRegistry& providers,
                        const std::string& ledger_path,
                        const RunOptions& options, const std::string& kind) {
  if (config.judges.empty()) raise(ErrorCode::EmptyInput, "no judges configured");
  {
    auto violations = validate_bank(bank, corpus);
    if (!violations.empty()) {
      std::string msg = "bank does not validate against corpus:";
      for (std::size_t i = 0; i < violations.size() && i < 10; ++i) {
        msg += "\n  - " + violations[i];
      }
      if (violations.size() > 10) {
        msg += "\n  - (" + std::to_string(violations.size() - 10) + " more)";
      }
      raise(ErrorCode::Validation, msg);
    }
  }

  std::vector<std::string> advocates =
      config.advocates.empty() ? bank.advocates : config.advocates;
  std::set<std::string> bank_advocates(bank.advocates.begin(),
                                       bank.advocates.end());
  for (const auto& a : advocates) {
    if (!bank_advocates.count(a)) {
      raise(ErrorCode::Validation, "advocate '" + a + "' not in bank");
    }
  }
  if (kind == kLedgerKindCampaign) {
    std::set<PromptCondition> bank_conditions(bank.conditions.begin(),
                                              bank.conditions.end());
    for (auto c : config.conditions) {
      if (!bank_conditions.count(c)) {
        raise(ErrorCode::MissingCondition,
              std::string("bank lacks condition ") + condition_name(c));
      }
    }
    if (config.conditions.empty()) {
      raise(ErrorCode::EmptyInput, "no conditions configured");
    }
  }

  RunContext ctx;
  ctx.config = &config;
  ctx.corpus = &corpus;
  ctx.bank = &bank;
  ctx.providers = &providers;
  ctx.options = &options;
  ctx.kind = kind;
  for (const auto& id : config.judges) {
    const ModelSpec& spec = providers.require(id);
    if (spec.kind == ProviderKind::SyntheticAdvocate) {
      raise(ErrorCode::Validation, "model '" + id + "' is an advocate, not a judge");
    }
    ctx.judge_specs.push_back(&spec);
    if (spec.kind == ProviderKind::SyntheticJudge) {
      ctx.judge_tables.push_back(load_strength_table(spec.strengths_ref));
      for (const auto& adv : advocates) {
        ctx.judge_tables.back()->strength(adv);  // throws UnknownAdvocate
      }
    } else {
      ctx.judge_tables.emplace_back();
    }
  }

  const std::string bank_digest = bank_content_digest(bank);
  const std::string corpus_digest = sha256_hex(corpus_to_json(corpus));

  LedgerHeader header;
  header.kind = kind;
  header.config_digest =
      config_identity_digest(config, kind, advocates, bank_digest, corpus_digest);
  header.campaign_id = short_digest(header.config_digest);
  header.seed = config.seed;
  header.bank_digest = bank_digest;
  header.corpus_digest = corpus_digest;
  header.advocate_template = advocate_template_hash();
  header.judge_template = judge_template_hash();
  header.tool_version = kToolVersion;
  ctx.campaign_id = header.campaign_id;

  // Blocks: judge x condition (campaign) or judge x advocate (head-to-head).
  std::vector<Block> blocks;
  for (std::size_t j = 0; j < config.judges.size(); ++j) {
    if (kind == kLedgerKindCampaign) {
      for (auto cond : config.conditions) {
        blocks.push_back({j, cond, "", config.trials_per_condition});
      }
    } else {
      for (const auto& adv : advocates) {
        blocks.push_back({j, PromptCondition::FactsOnly, adv,
                          config.trials_per_judge});
      }
    }
  }

  SidePools pools = SidePools::build(bank, advocates);

  // The whole plan is drawn sequentially from one stream before dispatch.
  Rng assign_rng = Rng::derive(config.seed, "assignments");
  auto draw_assignment = [&](const Block& b, Rng& rng,
                             std::int64_t id) -> TrialAssignment {
    if (kind == kLedgerKindCampaign) {
      return sample_assignment(rng, pools, corpus, b.condition, id);
    }
    return sample_head_to_head_assignment(rng, pools, corpus, b.advocate, id);
  };

  std::vector<PlannedTrial> plan;
  std::int64_t next_id = 1;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (int t = 0; t < blocks[b].quota; ++t) {
      PlannedTrial p;
      p.id = next_id++;
      p.judge_idx = blocks[b].judge_idx;
      p.block_idx = b;
      p.assignment = draw_assignment(blocks[b], assign_rng, p.id);
      plan.push_back(std::move(p));
    }
  }
  const std::int64_t planned_total = next_id - 1;

  LedgerWriter writer(ledger_path, header);

  // Resume bookkeeping from whatever the ledger already holds.
  std::vector<BlockTally> tallies(blocks.size());
  std::set<std::int64_t> existing_ids;
  std::int64_t max_existing_id = 0;
  auto block_of_record = [&](const TrialRecord& r) -> std::size_t {
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      if (config.judges[blocks[b].judge_idx] != r.judge) continue;
      if (kind == kLedgerKindCampaign) {
        auto cond = r.trial_condition();
        if (cond && *cond == blocks[b].condition) return b;
      } else {
        if (r.assignment.side1.advocate == blocks[b].advocate) return b;
      }
    }
    raise(ErrorCode::State, "ledger record " +
                                std::to_string(r.assignment.trial_id) +
                                " does not match any configured block");
  };
  for (const auto& r : writer.existing()) {
    existing_ids.insert(r.assignment.trial_id);
    max_existing_id = std::max(max_existing_id, r.assignment.trial_id);
    std::size_t b = block_of_record(r);
    if (r.completed()) {
      ++tallies[b].successes;
    } else {
      ++tallies[b].failures;
    }
    if (r.assignment.trial_id > planned_total) ++tallies[b].replacements_drawn;
  }

  RunSummary summary;
  summary.ledger_path = ledger_path;
  summary.campaign_id = header.campaign_id;
  std::int64_t budget = options.max_new_trials;  // 0 = unlimited
  bool budget_exhausted = false;

  std::vector<JudgeRunSummary> judge_summaries(config.judges.size());
  for (std::size_t j = 0; j < config.judges.size(); ++j) {
    judge_summaries[j].judge = config.judges[j];
  }
  std::vector<std::atomic<bool>> judge_aborted(config.judges.size());
  std::vector<std::atomic<std::int64_t>> judge_fail_counts(config.judges.size());
  std::mutex abort_mu;
  auto abort_judge = [&](std::size_t j, const std::string& reason) {
    std::lock_guard<std::mutex> lock(abort_mu);
    judge_aborted[j] = true;
    if (!judge_summaries[j].aborted) {
      judge_summaries[j].aborted = true;
      judge_summaries[j].abort_reason = reason;
    }
  };

  // Failure-rate abort: triggered once a judge's failures exceed
  // threshold x its planned trial count.
  std::vector<std::int64_t> judge_planned(config.judges.size(), 0);
  for (const auto& b : blocks) {
    judge_planned[b.judge_idx] += b.quota;
  }
  auto failure_budget = [&](std::size_t j) {
    return static_cast<std::int64_t>(config.failure_threshold *
                                     static_cast<double>(judge_planned[j]));
  };
  auto judge_failures = [&](std::size_t j) {
    std::int64_t f = 0;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      if (blocks[b].judge_idx == j) f += tallies[b].failures;
    }
    return f;
  };

  auto execute_batch = [&](std::size_t judge_idx,
                           std::vector<PlannedTrial>&& batch) {
    if (batch.empty()) return;
    if (budget > 0) {
      std::int64_t remaining = budget - summary.new_trials;
      if (remaining <= 0) {
        budget_exhausted = true;
        return;
      }
      if (static_cast<std::int64_t>(batch.size()) > remaining) {
        batch.resize(static_cast<std::size_t>(remaining));
        budget_exhausted = true;
      }
    }
    using Slot = std::optional<TrialRecord>;
    detail::ordered_parallel_for<Slot>(
        batch.size(), config.parallelism,
        [&](std::size_t i) -> Slot {
          if (judge_aborted[judge_idx].load()) return std::nullopt;
          if (judge_fail_counts[judge_idx].load() > failure_budget(judge_idx)) {
            abort_judge(judge_idx, "failure rate exceeded threshold");
            return std::nullopt;
          }
          try {
            return execute_trial(ctx, batch[i]);
          } catch (const Error& e) {
            if (e.code() == ErrorCode::Auth) {
              abort_judge(judge_idx, e.what());
              return std::nullopt;
            }
            throw;
          }
        },
        [&](std::size_t i, Slot&& slot) {
          if (!slot) return;
          writer.append(*slot);
          ++summary.new_trials;
          auto& tally = tallies[batch[i].block_idx];
          if (slot->completed()) {
            ++tally.successes;
            ++judge_summaries[judge_idx].completed;
          } else {
            ++tally.failures;
            ++judge_summaries[judge_idx].failed;
            ++judge_fail_counts[judge_idx];
          }
        });
    writer.flush();
  };

  std::int64_t next_replacement_id = std::max(planned_total, max_existing_id) + 1;

  for (std::size_t j = 0; j < config.judges.size(); ++j) {
    // Planned trials not yet in the ledger.
    std::vector<PlannedTrial> pending;
    for (auto& p : plan) {
      if (p.judge_idx == j && !existing_ids.count(p.id)) pending.push_back(p);
    }
    execute_batch(j, std::move(pending));
    if (budget_exhausted) break;
    if (judge_aborted[j].load()) continue;

    // Replacement rounds: re-sample failed trials from per-block streams so
    // per-block quotas are met.
    for (;;) {
      if (judge_failures(j) > failure_budget(j)) {
        abort_judge(j, "failure rate exceeded threshold (" +
                           std::to_string(judge_failures(j)) + " failures)");
        break;
      }
      std::vector<PlannedTrial> batch;
      bool capped = false;
      for (std::size_t b = 0; b < blocks.size() && !capped; ++b) {
        if (blocks[b].judge_idx != j) continue;
        int deficit = blocks[b].quota - tallies[b].successes;
        if (deficit <= 0) continue;
        if (tallies[b].replacements_drawn + deficit > config.replacement_cap) {
          abort_judge(j, "replacement cap exceeded");
          capped = true;
          break;
        }
        // Block stream is position-indexed: re-derive and skip draws already
        // issued (by this or an earlier invocation).
        Rng block_rng = Rng::derive(config.seed, "replacements",
                                    static_cast<std::uint64_t>(b));
        for (int skip = 0; skip < tallies[b].replacements_drawn; ++skip) {
          (void)draw_assignment(blocks[b], block_rng, 0);
        }
        for (int d = 0; d < deficit; ++d) {
          PlannedTrial p;
          p.id = next_replacement_id++;
          p.judge_idx = j;
          p.block_idx = b;
          p.assignment = draw_assignment(blocks[b], block_rng, p.id);
          ++tallies[b].replacements_drawn;
          ++judge_summaries[j].replacements;
          batch.push_back(std::move(p));
        }
      }
      if (capped || batch.empty()) break;
      execute_batch(j, std::move(batch));
      if (budget_exhausted || judge_aborted[j].load()) break;
    }
    if (budget_exhausted) break;
  }

  bool all_met = true;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (tallies[b].successes < blocks[b].quota) all_met = false;
  }
  summary.complete = all_met && !budget_exhausted;
  for (const auto& js : judge_summaries) {
    if (js.aborted) summary.complete = false;
  }
  summary.judges = std::move(judge_summaries);
  return summary;
}

}  // namespace

RunSummary run_campaign(const CampaignConfig& config, const Corpus& corpus,
                        const ArgumentBank& bank,
                        const ProviderRegistry& providers,
                        const std::string& ledger_path,
                        const RunOptions& options) {
  return run_protocol(config, corpus, bank, providers, ledger_path, options,
                      kLedgerKindCampaign);
}

RunSummary run_head_to_head(const CampaignConfig& config, const Corpus& corpus,
                            const ArgumentBank& bank,
                            const ProviderRegistry& providers,
                            const std::string& ledger_path,
                            const RunOptions& options) {
  if (config.advocates.empty()) {
    raise(ErrorCode::EmptyInput, "head-to-head requires at least one advocate");
  }
  return run_protocol(config, corpus, bank, providers, ledger_path, options,
                      kLedgerKindHeadToHead);
}

}  // namespace persuade
