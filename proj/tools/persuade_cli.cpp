// persuade — CLI over the C API in persuade.h. Subcommands: validate,
// generate, run, head2head, analyze, simulate. Exit codes: 0 success,
// 1 validation failure, 2 execution failure, 64 usage error.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "persuade.h"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitExecution = 2;
constexpr int kExitUsage = 64;

int exit_code_for(persuade_status status) {
  switch (status) {
    case PERSUADE_OK:
      return kExitOk;
    case PERSUADE_ERR_VALIDATION:
    case PERSUADE_ERR_SCHEMA:
      return kExitValidation;
    default:
      return kExitExecution;
  }
}

int fail(persuade_status status) {
  std::cerr << "error (" << persuade_status_name(status)
            << "): " << persuade_last_error() << "\n";
  return exit_code_for(status);
}

struct CString {
  char* ptr = nullptr;
  ~CString() { persuade_string_free(ptr); }
  std::string str() const { return ptr ? std::string(ptr) : std::string(); }
};

std::string read_file_or_exit(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error (io): cannot read '" << path << "'\n";
    std::exit(kExitExecution);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct RunFlags {
  std::string config_path;
  std::string ledger;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::vector<std::string> judges;
  std::vector<std::string> advocates;
  std::string condition;
  int trials = 0;
  int parallelism = 0;
  std::int64_t limit = 0;
  bool store_objects = false;
  bool logical_clock = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& flags) {
  cmd->add_option("--config", flags.config_path, "campaign config JSON")
      ->required();
  cmd->add_option("--ledger", flags.ledger, "ledger path (JSON Lines)");
  cmd->add_option("--out", flags.out, "output directory (ledger.jsonl inside)");
  cmd->add_option("--seed", flags.seed, "override config seed")
      ->each([&flags](const std::string&) { flags.seed_set = true; });
  cmd->add_option("--judges", flags.judges, "override judges")->delimiter(',');
  cmd->add_option("--advocates", flags.advocates, "override advocates")
      ->delimiter(',');
  cmd->add_option("--condition", flags.condition,
                  "restrict to one condition (facts_only | "
                  "with_original_arguments)");
  cmd->add_option("--trials", flags.trials, "override trial quota per block");
  cmd->add_option("--parallelism", flags.parallelism, "override parallelism");
  cmd->add_option("--limit", flags.limit,
                  "stop after this many new trials (resume later)");
  cmd->add_flag("--store-objects", flags.store_objects,
                "store prompts/responses in a content-addressed sidecar");
  cmd->add_flag("--logical-clock", flags.logical_clock,
                "zero timestamps (byte-stable ledgers for synthetic runs)");
}

int run_protocol(const RunFlags& flags, bool head_to_head) {
  json config = json::parse(read_file_or_exit(flags.config_path), nullptr, false);
  if (config.is_discarded()) {
    std::cerr << "error (schema): '" << flags.config_path
              << "' is not valid JSON\n";
    return kExitValidation;
  }
  // Relative paths in the config resolve against the config's directory.
  for (const char* key : {"corpus_path", "bank_path", "providers_path"}) {
    if (config.contains(key) && config[key].is_string()) {
      fs::path p(config[key].get<std::string>());
      if (!p.empty() && p.is_relative()) {
        config[key] =
            (fs::path(flags.config_path).parent_path() / p).string();
      }
    }
  }
  if (flags.seed_set) config["seed"] = flags.seed;
  if (!flags.judges.empty()) config["judges"] = flags.judges;
  if (!flags.advocates.empty()) config["advocates"] = flags.advocates;
  if (!flags.condition.empty()) {
    config["conditions"] = json::array({flags.condition});
  }
  if (flags.trials > 0) {
    config[head_to_head ? "trials_per_judge" : "trials_per_condition"] =
        flags.trials;
  }
  if (flags.parallelism > 0) config["parallelism"] = flags.parallelism;

  std::string ledger = flags.ledger;
  std::string objects_dir;
  if (ledger.empty()) {
    if (flags.out.empty()) {
      std::cerr << "error (usage): one of --ledger or --out is required\n";
      return kExitUsage;
    }
    std::error_code ec;
    fs::create_directories(flags.out, ec);
    ledger = (fs::path(flags.out) / "ledger.jsonl").string();
    objects_dir = (fs::path(flags.out) / "objects").string();
  } else {
    objects_dir = (fs::path(ledger).parent_path() / "objects").string();
  }

  json options{{"max_new_trials", flags.limit},
               {"store_objects", flags.store_objects},
               {"objects_dir", objects_dir},
               {"logical_clock", flags.logical_clock}};

  CString summary;
  persuade_status rc =
      head_to_head
          ? persuade_run_head_to_head(config.dump().c_str(), ledger.c_str(),
                                      options.dump().c_str(), &summary.ptr)
          : persuade_run_campaign(config.dump().c_str(), ledger.c_str(),
                                  options.dump().c_str(), &summary.ptr);
  if (rc != PERSUADE_OK) return fail(rc);

  json s = json::parse(summary.str());
  std::cout << "ledger: " << s["ledger_path"].get<std::string>() << "\n";
  std::cout << "campaign: " << s["campaign_id"].get<std::string>()
            << ", new trials: " << s["new_trials"].get<int>() << "\n";
  bool any_aborted = false;
  for (const auto& j : s["judges"]) {
    std::cout << "  " << j["judge"].get<std::string>() << ": completed "
              << j["completed"].get<int>() << ", failed "
              << j["failed"].get<int>();
    if (j["aborted"].get<bool>()) {
      any_aborted = true;
      std::cout << " [aborted: " << j["abort_reason"].get<std::string>() << "]";
    }
    std::cout << "\n";
  }
  if (any_aborted) return kExitExecution;
  if (!s["complete"].get<bool>()) {
    std::cout << "run paused before completion (resume with the same command)\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"persuade — measuring how far judge models are swayed by "
               "advocate identity in a two-advocates-one-judge protocol"};
  app.require_subcommand(1);

  // validate
  auto* validate = app.add_subcommand(
      "validate", "validate a corpus (and optionally a bank) against schema "
                  "and invariants");
  std::string v_corpus;
  std::string v_bank;
  bool v_strict = true;
  validate->add_option("--corpus", v_corpus, "corpus JSON path")->required();
  validate->add_option("--bank", v_bank, "argument bank JSONL path");
  validate->add_flag("--strict,!--no-strict", v_strict,
                     "require the expected per-jurisdiction scenario count");

  // generate
  auto* generate = app.add_subcommand(
      "generate", "generate (or resume) the advocate argument bank");
  std::string g_corpus;
  std::string g_providers;
  std::string g_bank;
  std::vector<std::string> g_advocates;
  std::vector<std::string> g_conditions;
  int g_k = 5;
  std::uint64_t g_seed = 0;
  bool g_strict = true;
  generate->add_option("--corpus", g_corpus, "corpus JSON path")->required();
  generate->add_option("--providers", g_providers, "provider config JSON")
      ->required();
  generate->add_option("--bank", g_bank, "bank output path (JSONL)")->required();
  generate->add_option("--advocates", g_advocates, "advocate model ids")
      ->delimiter(',')
      ->required();
  generate->add_option("--conditions", g_conditions, "conditions to generate")
      ->delimiter(',');
  generate->add_option("--k", g_k, "replicates per cell");
  generate->add_option("--seed", g_seed, "generation seed");
  generate->add_flag("--strict,!--no-strict", g_strict, "strict corpus load");

  // run / head2head
  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "run a judge campaign over the bank");
  add_run_flags(run, run_flags);
  RunFlags h2h_flags;
  auto* h2h = app.add_subcommand(
      "head2head",
      "run same-advocate condition-vs-condition trials per judge");
  add_run_flags(h2h, h2h_flags);

  // analyze
  auto* analyze = app.add_subcommand(
      "analyze", "compute metrics and write reports from a ledger (offline)");
  std::string a_ledger;
  std::string a_out;
  int a_perm = 2000;
  analyze->add_option("--ledger", a_ledger, "ledger path")->required();
  analyze->add_option("--out", a_out, "output directory")->required();
  analyze->add_option("--perm-reps", a_perm,
                      "permutation replications for the win-rate null test");

  // simulate
  auto* simulate = app.add_subcommand(
      "simulate", "synthetic end-to-end campaign under a strength table");
  std::uint64_t s_seed = 1;
  std::string s_strengths = "fixture";
  std::string s_corpus;
  int s_trials = 600;
  int s_judges = 1;
  int s_k = 5;
  int s_parallelism = 4;
  std::string s_out;
  std::int64_t s_limit = 0;
  bool s_store = false;
  int s_perm = 2000;
  simulate->add_option("--seed", s_seed, "campaign seed");
  simulate->add_option("--strengths", s_strengths,
                       "strength table path, or 'fixture'");
  simulate->add_option("--corpus", s_corpus,
                       "corpus JSON path (default: built-in fixture corpus)");
  simulate->add_option("--trials", s_trials, "trials per condition per judge");
  simulate->add_option("--judges", s_judges, "number of synthetic judges");
  simulate->add_option("--k", s_k, "replicates per bank cell");
  simulate->add_option("--parallelism", s_parallelism, "worker bound");
  simulate->add_option("--out", s_out, "output directory")->required();
  simulate->add_option("--limit", s_limit, "stop after this many new trials");
  simulate->add_flag("--store-objects", s_store, "store prompt/response objects");
  simulate->add_option("--perm-reps", s_perm, "permutation replications");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (validate->parsed()) {
    persuade_corpus* corpus = nullptr;
    persuade_status rc =
        persuade_corpus_load(v_corpus.c_str(), v_strict ? 1 : 0, &corpus);
    if (rc != PERSUADE_OK) return fail(rc);
    std::unique_ptr<persuade_corpus, decltype(&persuade_corpus_free)>
        corpus_guard(corpus, &persuade_corpus_free);
    std::cout << "corpus: " << persuade_corpus_scenario_count(corpus)
              << " scenarios\n";
    CString warnings;
    if (persuade_corpus_warnings(corpus, &warnings.ptr) == PERSUADE_OK) {
      for (const auto& w : json::parse(warnings.str())) {
        std::cout << "warning: " << w.get<std::string>() << "\n";
      }
    }
    if (!v_bank.empty()) {
      persuade_bank* bank = nullptr;
      rc = persuade_bank_load(v_bank.c_str(), &bank);
      if (rc != PERSUADE_OK) return fail(rc);
      std::unique_ptr<persuade_bank, decltype(&persuade_bank_free)> bank_guard(
          bank, &persuade_bank_free);
      CString violations;
      rc = persuade_bank_validate(bank, corpus, &violations.ptr);
      if (rc != PERSUADE_OK) return fail(rc);
      json v = json::parse(violations.str());
      std::cout << "bank: " << persuade_bank_record_count(bank) << " records, "
                << v.size() << " violations\n";
      for (const auto& item : v) {
        std::cout << "violation: " << item.get<std::string>() << "\n";
      }
      if (!v.empty()) return kExitValidation;
    }
    std::cout << "ok\n";
    return kExitOk;
  }

  if (generate->parsed()) {
    json config{{"corpus_path", g_corpus},
                {"providers_path", g_providers},
                {"bank_path", g_bank},
                {"advocates", g_advocates},
                {"k", g_k},
                {"seed", g_seed},
                {"strict_corpus", g_strict}};
    if (!g_conditions.empty()) config["conditions"] = g_conditions;
    CString summary;
    persuade_status rc =
        persuade_generate_bank(config.dump().c_str(), &summary.ptr);
    if (rc != PERSUADE_OK) return fail(rc);
    json s = json::parse(summary.str());
    std::cout << "bank: " << g_bank << "\n";
    std::cout << "issued " << s["issued"].get<int>() << ", reused "
              << s["reused"].get<int>() << ", expected "
              << s["expected"].get<int>() << "\n";
    if (!s["failures"].empty()) {
      for (const auto& f : s["failures"]) {
        std::cerr << "failure: " << f.get<std::string>() << "\n";
      }
      return kExitExecution;
    }
    return kExitOk;
  }

  if (run->parsed()) return run_protocol(run_flags, false);
  if (h2h->parsed()) return run_protocol(h2h_flags, true);

  if (analyze->parsed()) {
    CString result;
    persuade_status rc =
        persuade_analyze(a_ledger.c_str(), a_out.c_str(), a_perm, &result.ptr);
    if (rc != PERSUADE_OK) return fail(rc);
    json r = json::parse(result.str());
    std::cout << "analyzed " << r["kind"].get<std::string>() << " ledger\n";
    for (const auto& p : r["report_paths"]) {
      std::cout << "wrote " << p.get<std::string>() << "\n";
    }
    return kExitOk;
  }

  if (simulate->parsed()) {
    json spec{{"seed", s_seed},
              {"strengths", s_strengths},
              {"trials_per_condition", s_trials},
              {"judges", s_judges},
              {"k", s_k},
              {"parallelism", s_parallelism},
              {"out_dir", s_out},
              {"max_new_trials", s_limit},
              {"store_objects", s_store},
              {"permutation_replications", s_perm}};
    if (!s_corpus.empty()) spec["corpus_path"] = s_corpus;
    CString result;
    persuade_status rc = persuade_simulate(spec.dump().c_str(), &result.ptr);
    if (rc != PERSUADE_OK) return fail(rc);
    json r = json::parse(result.str());
    std::cout << "ledger: " << r["ledger_path"].get<std::string>() << "\n";
    std::cout << "campaign: " << r["run"]["campaign_id"].get<std::string>()
              << ", new trials: " << r["run"]["new_trials"].get<int>() << "\n";
    if (r["report_paths"].empty()) {
      std::cout << "run paused before completion (re-run to resume)\n";
    } else {
      for (const auto& p : r["report_paths"]) {
        std::cout << "wrote " << p.get<std::string>() << "\n";
      }
    }
    return kExitOk;
  }

  return kExitUsage;
}
