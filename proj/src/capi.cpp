#include "persuade.h"

#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "jsonio.hpp"
#include "persuade/analysis.hpp"
#include "persuade/argbank.hpp"
#include "persuade/corpus.hpp"
#include "persuade/driver.hpp"
#include "persuade/error.hpp"
#include "persuade/metrics.hpp"
#include "persuade/providers.hpp"
#include "persuade/stats.hpp"
#include "persuade/version.hpp"

struct persuade_corpus {
  persuade::Corpus impl;
};

struct persuade_bank {
  persuade::ArgumentBank impl;
};

namespace {

using persuade::ErrorCode;
using persuade::jsonio::json;

thread_local std::string g_last_error;

persuade_status map_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io: return PERSUADE_ERR_IO;
    case ErrorCode::Schema: return PERSUADE_ERR_SCHEMA;
    case ErrorCode::Validation: return PERSUADE_ERR_VALIDATION;
    case ErrorCode::Domain: return PERSUADE_ERR_DOMAIN;
    case ErrorCode::Transport: return PERSUADE_ERR_TRANSPORT;
    case ErrorCode::Auth: return PERSUADE_ERR_AUTH;
    case ErrorCode::Refusal: return PERSUADE_ERR_REFUSAL;
    case ErrorCode::AmbiguousVerdict: return PERSUADE_ERR_AMBIGUOUS_VERDICT;
    case ErrorCode::InsufficientPool: return PERSUADE_ERR_INSUFFICIENT_POOL;
    case ErrorCode::DanglingReference: return PERSUADE_ERR_DANGLING_REFERENCE;
    case ErrorCode::UnknownAdvocate: return PERSUADE_ERR_UNKNOWN_ADVOCATE;
    case ErrorCode::EmptyInput: return PERSUADE_ERR_EMPTY_INPUT;
    case ErrorCode::DegenerateTable: return PERSUADE_ERR_DEGENERATE_TABLE;
    case ErrorCode::MissingCondition: return PERSUADE_ERR_MISSING_CONDITION;
    case ErrorCode::MissingJurisdiction: return PERSUADE_ERR_MISSING_JURISDICTION;
    case ErrorCode::WrongLedgerKind: return PERSUADE_ERR_WRONG_LEDGER_KIND;
    case ErrorCode::State: return PERSUADE_ERR_STATE;
    case ErrorCode::Internal: return PERSUADE_ERR_INTERNAL;
  }
  return PERSUADE_ERR_INTERNAL;
}

template <typename Fn>
persuade_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return PERSUADE_OK;
  } catch (const persuade::Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PERSUADE_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return PERSUADE_ERR_INTERNAL;
  }
}

persuade_status required(const void* arg, const char* name) {
  g_last_error = std::string(name) + " must not be null";
  return PERSUADE_ERR_DOMAIN;
}

char* dup_string(const std::string& s) {
  char* out = new (std::nothrow) char[s.size() + 1];
  if (!out) return nullptr;
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

persuade_status emit_string(const std::string& s, char** out) {
  *out = dup_string(s);
  if (!*out) {
    g_last_error = "allocation failure";
    return PERSUADE_ERR_INTERNAL;
  }
  return PERSUADE_OK;
}

json run_summary_to_json(const persuade::RunSummary& summary) {
  json judges = json::array();
  for (const auto& j : summary.judges) {
    judges.push_back({{"judge", j.judge},
                      {"completed", j.completed},
                      {"failed", j.failed},
                      {"replacements", j.replacements},
                      {"aborted", j.aborted},
                      {"abort_reason", j.abort_reason}});
  }
  return json{{"ledger_path", summary.ledger_path},
              {"campaign_id", summary.campaign_id},
              {"new_trials", summary.new_trials},
              {"complete", summary.complete},
              {"judges", std::move(judges)}};
}

persuade::RunOptions options_from_json(const char* options_json) {
  persuade::RunOptions options;
  if (!options_json || !*options_json) return options;
  json j = persuade::jsonio::parse(options_json, "run options");
  options.max_new_trials =
      persuade::jsonio::value_or<std::int64_t>(j, "max_new_trials", 0);
  options.store_objects = persuade::jsonio::value_or<bool>(j, "store_objects", false);
  options.objects_dir =
      persuade::jsonio::value_or<std::string>(j, "objects_dir", "");
  options.logical_clock =
      persuade::jsonio::value_or<bool>(j, "logical_clock", false);
  return options;
}

}  // namespace

const char* persuade_version(void) { return persuade::kToolVersion; }

const char* persuade_status_name(persuade_status status) {
  switch (status) {
    case PERSUADE_OK: return "ok";
    case PERSUADE_ERR_IO: return "io";
    case PERSUADE_ERR_SCHEMA: return "schema";
    case PERSUADE_ERR_VALIDATION: return "validation";
    case PERSUADE_ERR_DOMAIN: return "domain";
    case PERSUADE_ERR_TRANSPORT: return "transport";
    case PERSUADE_ERR_AUTH: return "auth";
    case PERSUADE_ERR_REFUSAL: return "refusal";
    case PERSUADE_ERR_AMBIGUOUS_VERDICT: return "ambiguous_verdict";
    case PERSUADE_ERR_INSUFFICIENT_POOL: return "insufficient_pool";
    case PERSUADE_ERR_DANGLING_REFERENCE: return "dangling_reference";
    case PERSUADE_ERR_UNKNOWN_ADVOCATE: return "unknown_advocate";
    case PERSUADE_ERR_EMPTY_INPUT: return "empty_input";
    case PERSUADE_ERR_DEGENERATE_TABLE: return "degenerate_table";
    case PERSUADE_ERR_MISSING_CONDITION: return "missing_condition";
    case PERSUADE_ERR_MISSING_JURISDICTION: return "missing_jurisdiction";
    case PERSUADE_ERR_WRONG_LEDGER_KIND: return "wrong_ledger_kind";
    case PERSUADE_ERR_STATE: return "state";
    case PERSUADE_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* persuade_last_error(void) { return g_last_error.c_str(); }

void persuade_string_free(char* s) { delete[] s; }

/* --------------------------------------------------------------------- */

persuade_status persuade_corpus_load(const char* path, int strict,
                                     persuade_corpus** out) {
  if (!path) return required(path, "path");
  if (!out) return required(out, "out");
  *out = nullptr;
  return guarded([&] {
    auto corpus = std::make_unique<persuade_corpus>();
    corpus->impl = persuade::load_corpus(path, strict != 0);
    *out = corpus.release();
  });
}

void persuade_corpus_free(persuade_corpus* corpus) { delete corpus; }

size_t persuade_corpus_scenario_count(const persuade_corpus* corpus) {
  return corpus ? corpus->impl.size() : 0;
}

persuade_status persuade_corpus_warnings(const persuade_corpus* corpus,
                                         char** warnings_json) {
  if (!corpus) return required(corpus, "corpus");
  if (!warnings_json) return required(warnings_json, "warnings_json");
  return guarded([&] {
    json arr = json::array();
    for (const auto& w : corpus->impl.warnings) arr.push_back(w);
    persuade_status rc = emit_string(arr.dump(), warnings_json);
    if (rc != PERSUADE_OK) persuade::raise(ErrorCode::Internal, g_last_error);
  });
}

/* --------------------------------------------------------------------- */

persuade_status persuade_bank_load(const char* path, persuade_bank** out) {
  if (!path) return required(path, "path");
  if (!out) return required(out, "out");
  *out = nullptr;
  return guarded([&] {
    auto bank = std::make_unique<persuade_bank>();
    bank->impl = persuade::load_bank(path);
    *out = bank.release();
  });
}

void persuade_bank_free(persuade_bank* bank) { delete bank; }

size_t persuade_bank_record_count(const persuade_bank* bank) {
  return bank ? bank->impl.records.size() : 0;
}

persuade_status persuade_bank_validate(const persuade_bank* bank,
                                       const persuade_corpus* corpus,
                                       char** violations_json) {
  if (!bank) return required(bank, "bank");
  if (!corpus) return required(corpus, "corpus");
  if (!violations_json) return required(violations_json, "violations_json");
  return guarded([&] {
    json arr = json::array();
    for (const auto& v : persuade::validate_bank(bank->impl, corpus->impl)) {
      arr.push_back(v);
    }
    persuade_status rc = emit_string(arr.dump(), violations_json);
    if (rc != PERSUADE_OK) persuade::raise(ErrorCode::Internal, g_last_error);
  });
}

persuade_status persuade_generate_bank(const char* config_json,
                                       char** summary_json) {
  if (!config_json) return required(config_json, "config_json");
  if (!summary_json) return required(summary_json, "summary_json");
  return guarded([&] {
    json j = persuade::jsonio::parse(config_json, "generate config");
    persuade::GenerateSpec spec;
    spec.corpus_path = persuade::jsonio::get_string(j, "corpus_path", "config");
    spec.providers_path =
        persuade::jsonio::get_string(j, "providers_path", "config");
    spec.bank_path = persuade::jsonio::get_string(j, "bank_path", "config");
    spec.advocates =
        persuade::jsonio::get_string_array(j, "advocates", "config");
    if (j.contains("conditions")) {
      spec.conditions.clear();
      for (const auto& name :
           persuade::jsonio::get_string_array(j, "conditions", "config")) {
        auto c = persuade::condition_from_name(name);
        if (!c) {
          persuade::raise(ErrorCode::Schema,
                          "config.conditions: unknown '" + name + "'");
        }
        spec.conditions.push_back(*c);
      }
    }
    spec.k = static_cast<int>(
        persuade::jsonio::value_or<std::int64_t>(j, "k", 5));
    spec.seed = persuade::jsonio::value_or<std::uint64_t>(j, "seed", 0);
    spec.strict_corpus =
        persuade::jsonio::value_or<bool>(j, "strict_corpus", true);

    persuade::GenerateSummary summary = persuade::run_generate(spec);
    json out{{"issued", summary.issued},
             {"reused", summary.reused},
             {"expected", summary.expected},
             {"failures", summary.failures}};
    persuade_status rc = emit_string(out.dump(), summary_json);
    if (rc != PERSUADE_OK) persuade::raise(ErrorCode::Internal, g_last_error);
  });
}

/* --------------------------------------------------------------------- */

namespace {

persuade_status run_protocol_c(const char* config_json, const char* ledger_path,
                               const char* options_json, char** summary_json,
                               bool head_to_head) {
  if (!config_json) return required(config_json, "config_json");
  if (!ledger_path) return required(ledger_path, "ledger_path");
  if (!summary_json) return required(summary_json, "summary_json");
  return guarded([&] {
    persuade::CampaignConfig config =
        persuade::parse_campaign_config(config_json);
    persuade::RunOptions options = options_from_json(options_json);
    persuade::RunSummary summary =
        head_to_head
            ? persuade::run_head_to_head_from_config(config, ledger_path, options)
            : persuade::run_campaign_from_config(config, ledger_path, options);
    persuade_status rc =
        emit_string(run_summary_to_json(summary).dump(), summary_json);
    if (rc != PERSUADE_OK) persuade::raise(ErrorCode::Internal, g_last_error);
  });
}

}  // namespace

persuade_status persuade_run_campaign(const char* config_json,
                                      const char* ledger_path,
                                      const char* options_json,
                                      char** summary_json) {
  return run_protocol_c(config_json, ledger_path, options_json, summary_json,
                        false);
}

persuade_status persuade_run_head_to_head(const char* config_json,
                                          const char* ledger_path,
                                          const char* options_json,
                                          char** summary_json) {
  return run_protocol_c(config_json, ledger_path, options_json, summary_json,
                        true);
}

persuade_status persuade_simulate(const char* spec_json, char** result_json) {
  if (!spec_json) return required(spec_json, "spec_json");
  if (!result_json) return required(result_json, "result_json");
  return guarded([&] {
    json j = persuade::jsonio::parse(spec_json, "simulate spec");
    persuade::SimulateSpec spec;
    spec.seed = persuade::jsonio::value_or<std::uint64_t>(j, "seed", 1);
    spec.strengths =
        persuade::jsonio::value_or<std::string>(j, "strengths", "fixture");
    spec.corpus_path =
        persuade::jsonio::value_or<std::string>(j, "corpus_path", "");
    spec.trials_per_condition = static_cast<int>(
        persuade::jsonio::value_or<std::int64_t>(j, "trials_per_condition", 600));
    spec.judges = static_cast<int>(
        persuade::jsonio::value_or<std::int64_t>(j, "judges", 1));
    spec.k =
        static_cast<int>(persuade::jsonio::value_or<std::int64_t>(j, "k", 5));
    spec.parallelism = static_cast<int>(
        persuade::jsonio::value_or<std::int64_t>(j, "parallelism", 4));
    spec.out_dir = persuade::jsonio::get_string(j, "out_dir", "spec");
    spec.max_new_trials =
        persuade::jsonio::value_or<std::int64_t>(j, "max_new_trials", 0);
    spec.store_objects =
        persuade::jsonio::value_or<bool>(j, "store_objects", false);
    spec.permutation_replications = static_cast<int>(
        persuade::jsonio::value_or<std::int64_t>(j, "permutation_replications",
                                                 2000));

    persuade::SimulateResult result = persuade::run_simulate(spec);
    json out;
    out["corpus_path"] = result.corpus_path;
    out["strengths_path"] = result.strengths_path;
    out["providers_path"] = result.providers_path;
    out["bank_path"] = result.bank_path;
    out["ledger_path"] = result.ledger_path;
    out["report_paths"] = result.report_paths;
    out["run"] = run_summary_to_json(result.run);
    persuade_status rc = emit_string(out.dump(), result_json);
    if (rc != PERSUADE_OK) persuade::raise(ErrorCode::Internal, g_last_error);
  });
}

persuade_status persuade_analyze(const char* ledger_path, const char* out_dir,
                                 int permutation_replications,
                                 char** result_json) {
  if (!ledger_path) return required(ledger_path, "ledger_path");
  if (!out_dir) return required(out_dir, "out_dir");
  if (!result_json) return required(result_json, "result_json");
  return guarded([&] {
    persuade::AnalyzeOptions options;
    if (permutation_replications > 0) {
      options.permutation_replications = permutation_replications;
    }
    persuade::AnalyzeResult result =
        persuade::run_analyze(ledger_path, out_dir, options);
    json out{{"kind", result.kind}, {"report_paths", result.report_paths}};
    persuade_status rc = emit_string(out.dump(), result_json);
    if (rc != PERSUADE_OK) persuade::raise(ErrorCode::Internal, g_last_error);
  });
}

/* --------------------------------------------------------------------- */

persuade_status persuade_bt_win_probability(double s_i, double s_j,
                                            double* out) {
  if (!out) return required(out, "out");
  return guarded([&] { *out = persuade::bt_win_probability(s_i, s_j); });
}

persuade_status persuade_expected_p2(double win_probability, double* out) {
  if (!out) return required(out, "out");
  return guarded([&] { *out = persuade::expected_p2(win_probability); });
}

persuade_status persuade_pairwise_persuadability(int64_t m1, int64_t m2,
                                                 double* out) {
  if (!out) return required(out, "out");
  return guarded([&] {
    persuade::PairwiseCounts counts;
    counts.first = "a";
    counts.second = "b";
    counts.m1 = m1;
    counts.m2 = m2;
    if (m1 < 0 || m2 < 0) {
      persuade::raise(ErrorCode::Domain, "counts must be non-negative");
    }
    *out = persuade::pairwise_persuadability(counts);
  });
}

persuade_status persuade_win_rate_from_p(double p, double* out) {
  if (!out) return required(out, "out");
  return guarded([&] { *out = persuade::win_rate_from_p(p); });
}

persuade_status persuade_binomial_test(int64_t k, int64_t n, double p0,
                                       int two_sided, double* p_value) {
  if (!p_value) return required(p_value, "p_value");
  return guarded([&] {
    *p_value = persuade::binomial_test(k, n, p0,
                                       two_sided ? persuade::Sidedness::TwoSided
                                                 : persuade::Sidedness::OneSided)
                   .p_value;
  });
}

persuade_status persuade_chi_squared_sf(double x, int df, double* out) {
  if (!out) return required(out, "out");
  return guarded([&] { *out = persuade::chi_squared_sf(x, df); });
}

persuade_status persuade_wilson_interval(int64_t k, int64_t n,
                                         double confidence, double* lo,
                                         double* hi) {
  if (!lo) return required(lo, "lo");
  if (!hi) return required(hi, "hi");
  return guarded([&] {
    auto [wlo, whi] = persuade::wilson_interval(k, n, confidence);
    *lo = wlo;
    *hi = whi;
  });
}
