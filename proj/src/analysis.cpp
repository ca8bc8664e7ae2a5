#include "persuade/analysis.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "jsonio.hpp"
#include "persuade/error.hpp"

namespace persuade {

using jsonio::json;

namespace {

void require_kind(const Ledger& ledger, const char* kind, const char* op) {
  if (ledger.header.kind != kind) {
    raise(ErrorCode::WrongLedgerKind,
          std::string(op) + " requires a " + kind + " ledger, got '" +
              ledger.header.kind + "'");
  }
}

std::vector<const TrialRecord*> completed_records(const Ledger& ledger,
                                                  const std::string& judge) {
  std::vector<const TrialRecord*> out;
  for (const auto& r : ledger.records) {
    if (r.judge == judge && r.completed()) out.push_back(&r);
  }
  return out;
}

// Pooled per-advocate win rates over every completed trial of this judge;
// the data-derived "stronger" designation used by the homogeneity tests.
std::map<std::string, double> pooled_win_rates(
    const std::vector<const TrialRecord*>& records) {
  std::map<std::string, AdvocateTally> tallies;
  for (const auto* r : records) {
    tallies[r->assignment.side1.advocate].appearances += 1;
    tallies[r->assignment.side2.advocate].appearances += 1;
    tallies[r->winning_advocate].wins += 1;
  }
  std::map<std::string, double> rates;
  for (const auto& [advocate, tally] : tallies) {
    rates[advocate] = static_cast<double>(tally.wins) /
                      static_cast<double>(tally.appearances);
  }
  return rates;
}

bool first_is_stronger(const std::map<std::string, double>& rates,
                       const std::string& a, const std::string& b) {
  const double ra = rates.count(a) ? rates.at(a) : 0.0;
  const double rb = rates.count(b) ? rates.at(b) : 0.0;
  if (ra != rb) return ra > rb;
  return a < b;  // deterministic tie-break
}

// (wins by the pair's stronger advocate, wins by the weaker) over a subset.
std::pair<std::int64_t, std::int64_t> stronger_weaker_outcomes(
    const std::vector<const TrialRecord*>& records,
    const std::map<std::string, double>& rates) {
  std::int64_t stronger = 0;
  std::int64_t weaker = 0;
  for (const auto* r : records) {
    const std::string& a = r->assignment.side1.advocate;
    const std::string& b = r->assignment.side2.advocate;
    const std::string& strong = first_is_stronger(rates, a, b) ? a : b;
    if (r->winning_advocate == strong) {
      ++stronger;
    } else {
      ++weaker;
    }
  }
  return {stronger, weaker};
}

std::vector<const TrialRecord*> with_condition(
    const std::vector<const TrialRecord*>& records, PromptCondition cond) {
  std::vector<const TrialRecord*> out;
  for (const auto* r : records) {
    auto c = r->trial_condition();
    if (c && *c == cond) out.push_back(r);
  }
  return out;
}

}  // namespace

std::vector<std::string> judges_in(const Ledger& ledger) {
  std::vector<std::string> out;
  for (const auto& r : ledger.records) {
    if (std::find(out.begin(), out.end(), r.judge) == out.end()) {
      out.push_back(r.judge);
    }
  }
  return out;
}

ConditionComparison compare_conditions(const Ledger& ledger,
                                       const std::string& judge) {
  require_kind(ledger, kLedgerKindCampaign, "compare_conditions");
  RecordFilter facts{judge, PromptCondition::FactsOnly, std::nullopt};
  RecordFilter with{judge, PromptCondition::WithOriginalArguments, std::nullopt};
  auto facts_counts = pairwise_counts(ledger.records, facts);
  auto with_counts = pairwise_counts(ledger.records, with);
  if (facts_counts.empty() || with_counts.empty()) {
    raise(ErrorCode::MissingCondition,
          "judge '" + judge + "' lacks completed trials under " +
              (facts_counts.empty() ? "facts_only" : "with_original_arguments"));
  }

  ConditionComparison cc;
  cc.facts_only = population_persuadability(facts_counts);
  cc.with_original_arguments = population_persuadability(with_counts);
  cc.delta_p_pop = cc.facts_only.p_pop - cc.with_original_arguments.p_pop;

  auto records = completed_records(ledger, judge);
  auto rates = pooled_win_rates(records);
  auto facts_records = with_condition(records, PromptCondition::FactsOnly);
  auto with_records =
      with_condition(records, PromptCondition::WithOriginalArguments);
  cc.homogeneity = chi_squared_homogeneity(
      {stronger_weaker_outcomes(facts_records, rates),
       stronger_weaker_outcomes(with_records, rates)});
  return cc;
}

JurisdictionBreakdown jurisdiction_breakdown(const Ledger& ledger,
                                             const std::string& judge) {
  require_kind(ledger, kLedgerKindCampaign, "jurisdiction_breakdown");
  auto records = completed_records(ledger, judge);
  auto rates = pooled_win_rates(records);

  JurisdictionBreakdown jb;
  std::vector<std::pair<std::int64_t, std::int64_t>> groups;
  for (Jurisdiction j : kAllJurisdictions) {
    RecordFilter filter{judge, std::nullopt, j};
    auto counts = pairwise_counts(ledger.records, filter);
    if (counts.empty()) continue;
    jb.per_jurisdiction[jurisdiction_code(j)] =
        population_persuadability(counts);
    std::vector<const TrialRecord*> subset;
    for (const auto* r : records) {
      if (r->jurisdiction == j) subset.push_back(r);
    }
    groups.push_back(stronger_weaker_outcomes(subset, rates));
  }
  if (jb.per_jurisdiction.size() < 2) {
    raise(ErrorCode::MissingJurisdiction,
          "judge '" + judge + "' has completed trials in fewer than 2 jurisdictions");
  }

  auto p_pop_of = [&](const char* code) -> std::optional<double> {
    auto it = jb.per_jurisdiction.find(code);
    if (it == jb.per_jurisdiction.end()) return std::nullopt;
    return it->second.p_pop;
  };
  auto us = p_pop_of("US");
  auto uk = p_pop_of("UK");
  auto irl = p_pop_of("IRL");
  if (uk && us) jb.uk_below_us = *uk < *us;
  if (irl && uk) jb.irl_below_uk = *irl < *uk;
  if (irl && us) jb.irl_below_us = *irl < *us;

  jb.variation = chi_squared_homogeneity(groups);
  return jb;
}

namespace {

PositionBias position_bias_of(const std::vector<const TrialRecord*>& records,
                              double confidence) {
  PositionBias pb;
  for (const auto* r : records) {
    const int first_side =
        r->assignment.order == PresentationOrder::Side1First ? 1 : 2;
    ++pb.n;
    if (r->verdict->winning_side == first_side) ++pb.first_presented_wins;
  }
  if (pb.n > 0) {
    pb.win_rate = static_cast<double>(pb.first_presented_wins) /
                  static_cast<double>(pb.n);
    auto [lo, hi] = wilson_interval(pb.first_presented_wins, pb.n, confidence);
    pb.ci_lo = lo;
    pb.ci_hi = hi;
  }
  return pb;
}

}  // namespace

CampaignReport build_campaign_report(const Ledger& ledger,
                                     const std::string& judge,
                                     const ReportOptions& options) {
  require_kind(ledger, kLedgerKindCampaign, "build_campaign_report");
  CampaignReport report;
  report.judge = judge;
  report.campaign_id = ledger.header.campaign_id;
  report.config_digest = ledger.header.config_digest;
  report.ledger_digest = options.ledger_digest;
  report.advocate_template = ledger.header.advocate_template;
  report.judge_template = ledger.header.judge_template;
  report.tool_version = ledger.header.tool_version;
  report.seed = ledger.header.seed;

  for (PromptCondition cond : kBothConditions) {
    RecordFilter filter{judge, cond, std::nullopt};
    auto counts = pairwise_counts(ledger.records, filter);
    if (counts.empty()) continue;
    ConditionSummary summary;
    summary.pop = population_persuadability(counts);
    for (const auto& c : counts) {
      summary.pairs.push_back(pairwise_stats(c, options.confidence));
    }
    for (const auto& c : counts) {
      if (c.first == summary.pop.p2max_first &&
          c.second == summary.pop.p2max_second) {
        summary.p2max_binomial =
            binomial_test(c.m1, c.n(), 0.5, Sidedness::TwoSided);
      }
    }
    summary.winrate_chi2 = winrate_null_test(summary.pop);
    summary.winrate_permutation = winrate_null_permutation(
        summary.pop, options.permutation_replications,
        mix64(ledger.header.seed ^ hash64(condition_name(cond))));
    report.per_condition[condition_name(cond)] = std::move(summary);
  }
  if (report.per_condition.empty()) {
    raise(ErrorCode::EmptyInput,
          "judge '" + judge + "' has no completed trials in this ledger");
  }

  if (report.per_condition.size() == 2) {
    report.condition_comparison = compare_conditions(ledger, judge);
  }

  auto records = completed_records(ledger, judge);
  std::set<Jurisdiction> jurisdictions_present;
  for (const auto* r : records) jurisdictions_present.insert(r->jurisdiction);
  if (jurisdictions_present.size() >= 2) {
    report.jurisdictions = jurisdiction_breakdown(ledger, judge);
  }

  report.position_bias = position_bias_of(records, options.confidence);
  return report;
}

HeadToHeadResult summarize_head_to_head(const Ledger& ledger,
                                        const std::string& ledger_digest) {
  require_kind(ledger, kLedgerKindHeadToHead, "summarize_head_to_head");
  HeadToHeadResult result;
  result.campaign_id = ledger.header.campaign_id;
  result.ledger_digest = ledger_digest;

  std::vector<std::pair<std::string, std::string>> block_order;
  std::map<std::pair<std::string, std::string>, HeadToHeadBlock> blocks;
  for (const auto& r : ledger.records) {
    if (!r.completed()) continue;
    PromptCondition winner_cond;
    if (r.winning_condition) {
      winner_cond = *r.winning_condition;
    } else {
      winner_cond = r.verdict->winning_side == 1 ? r.assignment.side1.condition
                                                 : r.assignment.side2.condition;
    }
    const std::pair<std::string, std::string> key{r.judge,
                                                  r.assignment.side1.advocate};
    auto it = blocks.find(key);
    if (it == blocks.end()) {
      block_order.push_back(key);
      it = blocks.emplace(key, HeadToHeadBlock{}).first;
      it->second.judge = key.first;
      it->second.advocate = key.second;
    }
    if (winner_cond == PromptCondition::WithOriginalArguments) {
      ++it->second.wins_with;
    } else {
      ++it->second.wins_without;
    }
  }
  if (blocks.empty()) {
    raise(ErrorCode::EmptyInput, "head-to-head ledger has no completed trials");
  }

  int untied = 0;
  int with_wins = 0;
  for (const auto& key : block_order) {
    HeadToHeadBlock block = blocks.at(key);
    block.binomial =
        binomial_test(block.wins_with, block.n(), 0.5, Sidedness::TwoSided);
    ++result.blocks_total;
    if (block.wins_with > block.wins_without) {
      ++with_wins;
      ++untied;
    } else if (block.wins_with < block.wins_without) {
      ++untied;
    } else {
      ++result.blocks_tied;
    }
    result.blocks.push_back(std::move(block));
  }
  result.blocks_won_by_with = with_wins;
  if (untied > 0) {
    result.aggregate = binomial_test(with_wins, untied, 0.5, Sidedness::OneSided);
    result.aggregate.method = "sign-test";
  } else {
    result.aggregate.method = "sign-test";
    result.aggregate.sidedness = Sidedness::OneSided;
    result.aggregate.p_value = 1.0;
  }
  return result;
}

// ---------------------------------------------------------------------------
// JSON serialization
// ---------------------------------------------------------------------------

namespace {

json test_to_json(const TestResult& t) {
  json j;
  j["statistic"] = t.statistic;
  j["p_value"] = t.p_value;
  j["df"] = t.df ? json(*t.df) : json(nullptr);
  j["sidedness"] = sidedness_name(t.sidedness);
  j["method"] = t.method;
  return j;
}

TestResult test_from_json(const json& j, const std::string& path) {
  TestResult t;
  t.statistic = jsonio::get_number(j, "statistic", path);
  t.p_value = jsonio::get_number(j, "p_value", path);
  const json& df = jsonio::member(j, "df", path);
  if (!df.is_null()) t.df = df.get<int>();
  const std::string sided = jsonio::get_string(j, "sidedness", path);
  t.sidedness = sided == "one_sided" ? Sidedness::OneSided : Sidedness::TwoSided;
  t.method = jsonio::get_string(j, "method", path);
  return t;
}

json counts_to_json(const PairwiseCounts& c) {
  json j;
  j["first"] = c.first;
  j["second"] = c.second;
  j["m1"] = c.m1;
  j["m2"] = c.m2;
  j["n"] = c.n();
  return j;
}

PairwiseCounts counts_from_json(const json& j, const std::string& path) {
  PairwiseCounts c;
  c.first = jsonio::get_string(j, "first", path);
  c.second = jsonio::get_string(j, "second", path);
  c.m1 = jsonio::get_int(j, "m1", path);
  c.m2 = jsonio::get_int(j, "m2", path);
  return c;
}

json pop_to_json(const PopulationStats& pop) {
  json pairs = json::array();
  for (const auto& p : pop.pairs) pairs.push_back(counts_to_json(p));
  json advocates;
  for (const auto& [advocate, tally] : pop.per_advocate) {
    advocates[advocate] = {{"wins", tally.wins},
                           {"appearances", tally.appearances}};
  }
  json j;
  j["pairs"] = std::move(pairs);
  j["n_pop"] = pop.n_pop;
  j["p_pop"] = pop.p_pop;
  j["p2max"] = {{"first", pop.p2max_first},
                {"second", pop.p2max_second},
                {"value", pop.p2max}};
  j["per_advocate"] = std::move(advocates);
  return j;
}

PopulationStats pop_from_json(const json& j, const std::string& path) {
  PopulationStats pop;
  const json& pairs = jsonio::member(j, "pairs", path);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    pop.pairs.push_back(
        counts_from_json(pairs[i], path + ".pairs[" + std::to_string(i) + "]"));
  }
  pop.n_pop = jsonio::get_int(j, "n_pop", path);
  pop.p_pop = jsonio::get_number(j, "p_pop", path);
  const json& p2max = jsonio::member(j, "p2max", path);
  pop.p2max_first = jsonio::get_string(p2max, "first", path + ".p2max");
  pop.p2max_second = jsonio::get_string(p2max, "second", path + ".p2max");
  pop.p2max = jsonio::get_number(p2max, "value", path + ".p2max");
  const json& advocates = jsonio::member(j, "per_advocate", path);
  for (auto it = advocates.begin(); it != advocates.end(); ++it) {
    AdvocateTally tally;
    tally.wins = jsonio::get_int(it.value(), "wins", path + ".per_advocate");
    tally.appearances =
        jsonio::get_int(it.value(), "appearances", path + ".per_advocate");
    pop.per_advocate[it.key()] = tally;
  }
  return pop;
}

json pairwise_stats_to_json(const PairwiseStats& s) {
  json j;
  j["counts"] = counts_to_json(s.counts);
  j["p2"] = s.p2;
  j["ci_lo"] = s.ci_lo;
  j["ci_hi"] = s.ci_hi;
  j["p_value"] = s.p_value;
  return j;
}

PairwiseStats pairwise_stats_from_json(const json& j, const std::string& path) {
  PairwiseStats s;
  s.counts = counts_from_json(jsonio::member(j, "counts", path), path + ".counts");
  s.p2 = jsonio::get_number(j, "p2", path);
  s.ci_lo = jsonio::get_number(j, "ci_lo", path);
  s.ci_hi = jsonio::get_number(j, "ci_hi", path);
  s.p_value = jsonio::get_number(j, "p_value", path);
  return s;
}

json condition_summary_to_json(const ConditionSummary& s) {
  json pairs = json::array();
  for (const auto& p : s.pairs) pairs.push_back(pairwise_stats_to_json(p));
  json j;
  j["pop"] = pop_to_json(s.pop);
  j["pairs"] = std::move(pairs);
  j["p2max_binomial"] = test_to_json(s.p2max_binomial);
  j["winrate_chi2"] = test_to_json(s.winrate_chi2);
  j["winrate_permutation"] = test_to_json(s.winrate_permutation);
  return j;
}

ConditionSummary condition_summary_from_json(const json& j,
                                             const std::string& path) {
  ConditionSummary s;
  s.pop = pop_from_json(jsonio::member(j, "pop", path), path + ".pop");
  const json& pairs = jsonio::member(j, "pairs", path);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    s.pairs.push_back(pairwise_stats_from_json(
        pairs[i], path + ".pairs[" + std::to_string(i) + "]"));
  }
  s.p2max_binomial =
      test_from_json(jsonio::member(j, "p2max_binomial", path), path);
  s.winrate_chi2 = test_from_json(jsonio::member(j, "winrate_chi2", path), path);
  s.winrate_permutation =
      test_from_json(jsonio::member(j, "winrate_permutation", path), path);
  return s;
}

json comparison_to_json(const ConditionComparison& c) {
  json j;
  j["facts_only"] = pop_to_json(c.facts_only);
  j["with_original_arguments"] = pop_to_json(c.with_original_arguments);
  j["delta_p_pop"] = c.delta_p_pop;
  j["homogeneity"] = test_to_json(c.homogeneity);
  return j;
}

ConditionComparison comparison_from_json(const json& j, const std::string& path) {
  ConditionComparison c;
  c.facts_only =
      pop_from_json(jsonio::member(j, "facts_only", path), path + ".facts_only");
  c.with_original_arguments =
      pop_from_json(jsonio::member(j, "with_original_arguments", path),
                    path + ".with_original_arguments");
  c.delta_p_pop = jsonio::get_number(j, "delta_p_pop", path);
  c.homogeneity = test_from_json(jsonio::member(j, "homogeneity", path), path);
  return c;
}

json flag_to_json(const std::optional<bool>& flag) {
  return flag ? json(*flag) : json(nullptr);
}

json breakdown_to_json(const JurisdictionBreakdown& b) {
  json per;
  for (const auto& [code, pop] : b.per_jurisdiction) {
    per[code] = pop_to_json(pop);
  }
  json j;
  j["per_jurisdiction"] = std::move(per);
  j["uk_below_us"] = flag_to_json(b.uk_below_us);
  j["irl_below_uk"] = flag_to_json(b.irl_below_uk);
  j["irl_below_us"] = flag_to_json(b.irl_below_us);
  j["variation"] = test_to_json(b.variation);
  return j;
}

JurisdictionBreakdown breakdown_from_json(const json& j,
                                          const std::string& path) {
  JurisdictionBreakdown b;
  const json& per = jsonio::member(j, "per_jurisdiction", path);
  for (auto it = per.begin(); it != per.end(); ++it) {
    b.per_jurisdiction[it.key()] =
        pop_from_json(it.value(), path + ".per_jurisdiction." + it.key());
  }
  auto read_flag = [&](const char* key) -> std::optional<bool> {
    const json& v = jsonio::member(j, key, path);
    if (v.is_null()) return std::nullopt;
    return v.get<bool>();
  };
  b.uk_below_us = read_flag("uk_below_us");
  b.irl_below_uk = read_flag("irl_below_uk");
  b.irl_below_us = read_flag("irl_below_us");
  b.variation = test_from_json(jsonio::member(j, "variation", path), path);
  return b;
}

json position_bias_to_json(const PositionBias& p) {
  json j;
  j["first_presented_wins"] = p.first_presented_wins;
  j["n"] = p.n;
  j["win_rate"] = p.win_rate;
  j["ci_lo"] = p.ci_lo;
  j["ci_hi"] = p.ci_hi;
  return j;
}

PositionBias position_bias_from_json(const json& j, const std::string& path) {
  PositionBias p;
  p.first_presented_wins = jsonio::get_int(j, "first_presented_wins", path);
  p.n = jsonio::get_int(j, "n", path);
  p.win_rate = jsonio::get_number(j, "win_rate", path);
  p.ci_lo = jsonio::get_number(j, "ci_lo", path);
  p.ci_hi = jsonio::get_number(j, "ci_hi", path);
  return p;
}

json report_to_json(const CampaignReport& r) {
  json per;
  for (const auto& [name, summary] : r.per_condition) {
    per[name] = condition_summary_to_json(summary);
  }
  json j;
  j["judge"] = r.judge;
  j["campaign_id"] = r.campaign_id;
  j["config_digest"] = r.config_digest;
  j["ledger_digest"] = r.ledger_digest;
  j["advocate_template"] = r.advocate_template;
  j["judge_template"] = r.judge_template;
  j["tool_version"] = r.tool_version;
  j["seed"] = r.seed;
  j["per_condition"] = std::move(per);
  j["condition_comparison"] = r.condition_comparison
                                  ? comparison_to_json(*r.condition_comparison)
                                  : json(nullptr);
  j["jurisdictions"] =
      r.jurisdictions ? breakdown_to_json(*r.jurisdictions) : json(nullptr);
  j["position_bias"] = position_bias_to_json(r.position_bias);
  return j;
}

CampaignReport report_from_json(const json& j) {
  const std::string path = "report";
  CampaignReport r;
  r.judge = jsonio::get_string(j, "judge", path);
  r.campaign_id = jsonio::get_string(j, "campaign_id", path);
  r.config_digest = jsonio::get_string(j, "config_digest", path);
  r.ledger_digest = jsonio::get_string(j, "ledger_digest", path);
  r.advocate_template = jsonio::get_string(j, "advocate_template", path);
  r.judge_template = jsonio::get_string(j, "judge_template", path);
  r.tool_version = jsonio::get_string(j, "tool_version", path);
  r.seed = jsonio::member(j, "seed", path).get<std::uint64_t>();
  const json& per = jsonio::member(j, "per_condition", path);
  for (auto it = per.begin(); it != per.end(); ++it) {
    r.per_condition[it.key()] = condition_summary_from_json(
        it.value(), path + ".per_condition." + it.key());
  }
  const json& cc = jsonio::member(j, "condition_comparison", path);
  if (!cc.is_null()) {
    r.condition_comparison =
        comparison_from_json(cc, path + ".condition_comparison");
  }
  const json& jb = jsonio::member(j, "jurisdictions", path);
  if (!jb.is_null()) {
    r.jurisdictions = breakdown_from_json(jb, path + ".jurisdictions");
  }
  r.position_bias = position_bias_from_json(
      jsonio::member(j, "position_bias", path), path + ".position_bias");
  return r;
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

std::string fmt4(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

std::string fmtg(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string csv_num(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

const char* condition_heading(const std::string& name) {
  return name == "facts_only" ? "without arguments" : "with arguments";
}

void append_condition_section(std::string& md, const std::string& cond_name,
                              const ConditionSummary& s) {
  md += "### Condition: " + cond_name + " (" + condition_heading(cond_name) +
        ")\n\n";
  md += "| pair | m1 | m2 | n | p2 | 95% CI (first's win rate) | p (binomial) "
        "|\n";
  md += "|---|---:|---:|---:|---:|---|---:|\n";
  for (const auto& p : s.pairs) {
    md += "| " + p.counts.first + " vs " + p.counts.second + " | " +
          std::to_string(p.counts.m1) + " | " + std::to_string(p.counts.m2) +
          " | " + std::to_string(p.counts.n()) + " | " + fmt4(p.p2) + " | [" +
          fmt4(p.ci_lo) + ", " + fmt4(p.ci_hi) + "] | " + fmtg(p.p_value) +
          " |\n";
  }
  md += "\n";
  md += "- p_pop = " + fmt4(s.pop.p_pop) + " over n_pop = " +
        std::to_string(s.pop.n_pop) + " trials\n";
  md += "- p2max = " + fmt4(s.pop.p2max) + " (" + s.pop.p2max_first + " vs " +
        s.pop.p2max_second + "), binomial p = " +
        fmtg(s.p2max_binomial.p_value) + "\n";
  md += "- win-rate null: chi-squared statistic " + fmtg(s.winrate_chi2.statistic) +
        " (df " + std::to_string(s.winrate_chi2.df.value_or(0)) + "), p = " +
        fmtg(s.winrate_chi2.p_value) + "; permutation p = " +
        fmtg(s.winrate_permutation.p_value) + "\n\n";
}

void append_report_section(std::string& md, const CampaignReport& r) {
  md += "## Judge: " + r.judge + "\n\n";
  for (const auto& [name, summary] : r.per_condition) {
    append_condition_section(md, name, summary);
  }
  if (r.condition_comparison) {
    const auto& cc = *r.condition_comparison;
    md += "### Condition comparison\n\n";
    md += "- delta p_pop (facts_only - with_original_arguments) = " +
          fmt4(cc.delta_p_pop) + "\n";
    md += "- homogeneity (stronger-advocate outcomes across conditions): "
          "statistic " + fmtg(cc.homogeneity.statistic) + ", p = " +
          fmtg(cc.homogeneity.p_value) + "\n\n";
  }
  if (r.jurisdictions) {
    const auto& jb = *r.jurisdictions;
    md += "### Jurisdiction breakdown\n\n";
    md += "| jurisdiction | p_pop | n_pop |\n|---|---:|---:|\n";
    for (const auto& [code, pop] : jb.per_jurisdiction) {
      md += "| " + code + " | " + fmt4(pop.p_pop) + " | " +
            std::to_string(pop.n_pop) + " |\n";
    }
    auto flag = [](const std::optional<bool>& f) {
      return !f ? "n/a" : (*f ? "yes" : "no");
    };
    md += "\n- UK below US: " + std::string(flag(jb.uk_below_us)) +
          "; IRL below UK: " + flag(jb.irl_below_uk) +
          "; IRL below US: " + flag(jb.irl_below_us) + "\n";
    md += "- variation across jurisdictions: statistic " +
          fmtg(jb.variation.statistic) + ", p = " + fmtg(jb.variation.p_value) +
          " (" + jb.variation.method + ")\n\n";
  }
  md += "### Position bias\n\n";
  md += "- first-presented argument won " +
        std::to_string(r.position_bias.first_presented_wins) + " of " +
        std::to_string(r.position_bias.n) + " (" + fmt4(r.position_bias.win_rate) +
        ", 95% CI [" + fmt4(r.position_bias.ci_lo) + ", " +
        fmt4(r.position_bias.ci_hi) + "])\n\n";
}

void append_provenance(std::string& md, const CampaignReport& r) {
  md += "---\n";
  md += "- campaign: " + r.campaign_id + " (seed " + std::to_string(r.seed) +
        ")\n";
  md += "- config digest: " + r.config_digest + "\n";
  md += "- ledger digest: " + r.ledger_digest + "\n";
  md += "- templates: advocate " + r.advocate_template.substr(0, 12) +
        ", judge " + r.judge_template.substr(0, 12) + "\n";
  md += "- tool version: " + r.tool_version + "\n";
}

std::string render_markdown(const std::vector<CampaignReport>& reports) {
  std::string md = "# Persuadability report\n\n";
  md += "| Judge Model | p2max (without arguments) | p_pop (without "
        "arguments) | p2max (with arguments) | p_pop (with arguments) |\n";
  md += "|---|---:|---:|---:|---:|\n";
  for (const auto& r : reports) {
    auto cell = [&](const char* cond, bool want_p2max) -> std::string {
      auto it = r.per_condition.find(cond);
      if (it == r.per_condition.end()) return "-";
      return fmt4(want_p2max ? it->second.pop.p2max : it->second.pop.p_pop);
    };
    md += "| " + r.judge + " | " + cell("facts_only", true) + " | " +
          cell("facts_only", false) + " | " +
          cell("with_original_arguments", true) + " | " +
          cell("with_original_arguments", false) + " |\n";
  }
  md += "\n";
  for (const auto& r : reports) append_report_section(md, r);
  if (!reports.empty()) append_provenance(md, reports.front());
  return md;
}

constexpr const char* kCsvHeader =
    "judge,condition,pair,m1,m2,n,p2,ci_lo,ci_hi,p_value,p_pop,p2max\n";

std::string render_csv(const std::vector<CampaignReport>& reports) {
  std::string csv = kCsvHeader;
  for (const auto& r : reports) {
    for (const auto& [cond, summary] : r.per_condition) {
      for (const auto& p : summary.pairs) {
        csv += r.judge + "," + cond + "," + p.counts.first + " vs " +
               p.counts.second + "," + std::to_string(p.counts.m1) + "," +
               std::to_string(p.counts.m2) + "," +
               std::to_string(p.counts.n()) + "," + csv_num(p.p2) + "," +
               csv_num(p.ci_lo) + "," + csv_num(p.ci_hi) + "," +
               csv_num(p.p_value) + ",,\n";
      }
      csv += r.judge + "," + cond + ",,,," + std::to_string(summary.pop.n_pop) +
             ",,,,," + csv_num(summary.pop.p_pop) + "," +
             csv_num(summary.pop.p2max) + "\n";
    }
  }
  return csv;
}

}  // namespace

std::string render_reports(const std::vector<CampaignReport>& reports,
                           ReportFormat format) {
  switch (format) {
    case ReportFormat::Markdown:
      return render_markdown(reports);
    case ReportFormat::Csv:
      return render_csv(reports);
    case ReportFormat::Json: {
      json arr = json::array();
      for (const auto& r : reports) arr.push_back(report_to_json(r));
      return json{{"reports", std::move(arr)}}.dump(2) + "\n";
    }
  }
  raise(ErrorCode::Internal, "unreachable report format");
}

std::string render_report(const CampaignReport& report, ReportFormat format) {
  if (format == ReportFormat::Json) {
    return report_to_json(report).dump(2) + "\n";
  }
  return render_reports({report}, format);
}

std::string render_head_to_head(const HeadToHeadResult& result,
                                ReportFormat format) {
  switch (format) {
    case ReportFormat::Markdown: {
      std::string md = "# Head-to-head report\n\n";
      md += "| Judge | Advocate | wins (with arguments) | wins (without "
            "arguments) | n | p (binomial, two-sided) |\n";
      md += "|---|---|---:|---:|---:|---:|\n";
      for (const auto& b : result.blocks) {
        md += "| " + b.judge + " | " + b.advocate + " | " +
              std::to_string(b.wins_with) + " | " +
              std::to_string(b.wins_without) + " | " + std::to_string(b.n()) +
              " | " + fmtg(b.binomial.p_value) + " |\n";
      }
      md += "\n- " + std::to_string(result.blocks_won_by_with) + " of " +
            std::to_string(result.blocks_total - result.blocks_tied) +
            " untied blocks won by the with-arguments condition";
      if (result.blocks_tied > 0) {
        md += " (" + std::to_string(result.blocks_tied) + " tied)";
      }
      md += "; one-sided sign test p = " + fmtg(result.aggregate.p_value) + "\n";
      md += "\n---\n- campaign: " + result.campaign_id + "\n";
      md += "- ledger digest: " + result.ledger_digest + "\n";
      return md;
    }
    case ReportFormat::Csv: {
      std::string csv = "judge,advocate,wins_with,wins_without,n,p_value\n";
      for (const auto& b : result.blocks) {
        csv += b.judge + "," + b.advocate + "," + std::to_string(b.wins_with) +
               "," + std::to_string(b.wins_without) + "," +
               std::to_string(b.n()) + "," + csv_num(b.binomial.p_value) + "\n";
      }
      csv += "aggregate,," + std::to_string(result.blocks_won_by_with) + "," +
             std::to_string(result.blocks_total - result.blocks_tied -
                            result.blocks_won_by_with) +
             "," + std::to_string(result.blocks_total) + "," +
             csv_num(result.aggregate.p_value) + "\n";
      return csv;
    }
    case ReportFormat::Json: {
      json blocks = json::array();
      for (const auto& b : result.blocks) {
        blocks.push_back({{"judge", b.judge},
                          {"advocate", b.advocate},
                          {"wins_with", b.wins_with},
                          {"wins_without", b.wins_without},
                          {"n", b.n()},
                          {"binomial", test_to_json(b.binomial)}});
      }
      json j;
      j["blocks"] = std::move(blocks);
      j["blocks_won_by_with"] = result.blocks_won_by_with;
      j["blocks_tied"] = result.blocks_tied;
      j["blocks_total"] = result.blocks_total;
      j["aggregate"] = test_to_json(result.aggregate);
      j["campaign_id"] = result.campaign_id;
      j["ledger_digest"] = result.ledger_digest;
      return j.dump(2) + "\n";
    }
  }
  raise(ErrorCode::Internal, "unreachable report format");
}

CampaignReport campaign_report_from_json(const std::string& json_text) {
  return report_from_json(jsonio::parse(json_text, "report"));
}

}  // namespace persuade
