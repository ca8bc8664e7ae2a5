#include "persuade/driver.hpp"

#include <algorithm>
#include <filesystem>

#include "jsonio.hpp"
#include "persuade/digest.hpp"
#include "persuade/error.hpp"

namespace persuade {

namespace fs = std::filesystem;

GenerateSummary run_generate(const GenerateSpec& spec) {
  Corpus corpus = load_corpus(spec.corpus_path, spec.strict_corpus);
  ProviderRegistry registry = load_provider_config(spec.providers_path);
  if (spec.advocates.empty()) {
    raise(ErrorCode::EmptyInput, "no advocates selected for generation");
  }
  std::vector<ModelSpec> advocates;
  for (const auto& id : spec.advocates) {
    advocates.push_back(registry.require(id));
  }
  return generate_bank(corpus, advocates, spec.conditions, spec.k, spec.seed,
                       spec.bank_path);
}

namespace {

struct LoadedCampaign {
  Corpus corpus;
  ArgumentBank bank;
  ProviderRegistry providers;
};

LoadedCampaign load_campaign_inputs(const CampaignConfig& config) {
  if (config.corpus_path.empty() || config.bank_path.empty() ||
      config.providers_path.empty()) {
    raise(ErrorCode::Validation,
          "campaign config requires corpus_path, bank_path and providers_path");
  }
  LoadedCampaign in;
  in.corpus = load_corpus(config.corpus_path, /*strict=*/false);
  in.bank = load_bank(config.bank_path);
  in.providers = load_provider_config(config.providers_path);
  return in;
}

}  // namespace

RunSummary run_campaign_from_config(const CampaignConfig& config,
                                    const std::string& ledger_path,
                                    const RunOptions& options) {
  LoadedCampaign in = load_campaign_inputs(config);
  return run_campaign(config, in.corpus, in.bank, in.providers, ledger_path,
                      options);
}

RunSummary run_head_to_head_from_config(const CampaignConfig& config,
                                        const std::string& ledger_path,
                                        const RunOptions& options) {
  LoadedCampaign in = load_campaign_inputs(config);
  return run_head_to_head(config, in.corpus, in.bank, in.providers, ledger_path,
                          options);
}

AnalyzeResult run_analyze(const std::string& ledger_path,
                          const std::string& out_dir,
                          const AnalyzeOptions& options) {
  Ledger ledger = load_ledger(ledger_path);
  const std::string ledger_digest = sha256_file_hex(ledger_path);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) raise(ErrorCode::Io, "cannot create '" + out_dir + "': " + ec.message());

  AnalyzeResult result;
  result.kind = ledger.header.kind;
  const std::string md_path = (fs::path(out_dir) / "report.md").string();
  const std::string csv_path = (fs::path(out_dir) / "report.csv").string();
  const std::string json_path = (fs::path(out_dir) / "report.json").string();

  if (ledger.header.kind == kLedgerKindHeadToHead) {
    HeadToHeadResult h2h = summarize_head_to_head(ledger, ledger_digest);
    jsonio::write_file(md_path, render_head_to_head(h2h, ReportFormat::Markdown));
    jsonio::write_file(csv_path, render_head_to_head(h2h, ReportFormat::Csv));
    jsonio::write_file(json_path, render_head_to_head(h2h, ReportFormat::Json));
  } else {
    ReportOptions report_options;
    report_options.confidence = options.confidence;
    report_options.permutation_replications = options.permutation_replications;
    report_options.ledger_digest = ledger_digest;
    std::vector<CampaignReport> reports;
    for (const auto& judge : judges_in(ledger)) {
      reports.push_back(build_campaign_report(ledger, judge, report_options));
    }
    if (reports.empty()) {
      raise(ErrorCode::EmptyInput, "ledger has no trial records to analyze");
    }
    jsonio::write_file(md_path, render_reports(reports, ReportFormat::Markdown));
    jsonio::write_file(csv_path, render_reports(reports, ReportFormat::Csv));
    jsonio::write_file(json_path, render_reports(reports, ReportFormat::Json));
  }
  result.report_paths = {md_path, csv_path, json_path};
  return result;
}

SimulateResult run_simulate(const SimulateSpec& spec) {
  if (spec.out_dir.empty()) raise(ErrorCode::Validation, "out_dir required");
  if (spec.judges < 1) raise(ErrorCode::Validation, "judges must be >= 1");
  std::error_code ec;
  fs::create_directories(spec.out_dir, ec);
  if (ec) {
    raise(ErrorCode::Io, "cannot create '" + spec.out_dir + "': " + ec.message());
  }
  const fs::path out(spec.out_dir);

  SimulateResult result;

  // Corpus: user-supplied or the built-in fixture, re-serialized canonically.
  Corpus corpus = spec.corpus_path.empty()
                      ? make_fixture_corpus()
                      : load_corpus(spec.corpus_path, /*strict=*/false);
  result.corpus_path = (out / "corpus.json").string();
  write_corpus(corpus, result.corpus_path);

  StrengthTable table = spec.strengths == "fixture"
                            ? fixture_strength_table()
                            : load_strength_table(spec.strengths);
  result.strengths_path = (out / "strengths.json").string();
  jsonio::write_file(result.strengths_path, strength_table_to_json(table));

  // Synthetic advocates from the table entries, plus the synthetic judges.
  std::vector<std::string> advocate_ids;
  for (const auto& [id, strength] : table.advocates) advocate_ids.push_back(id);
  if (advocate_ids.size() < 2) {
    raise(ErrorCode::Validation,
          "strength table needs at least 2 advocates to pair");
  }
  std::vector<std::string> judge_ids;
  for (int i = 1; i <= spec.judges; ++i) {
    judge_ids.push_back("judge-" + std::to_string(i));
  }

  // Provenance files reference their siblings by bare name so a simulate
  // directory is byte-identical wherever it lands; loaders resolve the
  // relative references.
  jsonio::json providers = jsonio::json::array();
  for (const auto& id : advocate_ids) {
    providers.push_back({{"kind", "synthetic-advocate"},
                         {"id", id},
                         {"strengths", "strengths.json"}});
  }
  for (const auto& id : judge_ids) {
    providers.push_back({{"kind", "synthetic-judge"},
                         {"id", id},
                         {"strengths", "strengths.json"}});
  }
  result.providers_path = (out / "providers.json").string();
  jsonio::write_file(result.providers_path, providers.dump(2) + "\n");

  ProviderRegistry registry = load_provider_config(result.providers_path);

  result.bank_path = (out / "bank.jsonl").string();
  std::vector<ModelSpec> advocate_specs;
  for (const auto& id : advocate_ids) advocate_specs.push_back(registry.require(id));
  GenerateSummary generated = generate_bank(
      corpus, advocate_specs,
      {kBothConditions.begin(), kBothConditions.end()}, spec.k, spec.seed,
      result.bank_path);
  if (!generated.failures.empty()) {
    raise(ErrorCode::Internal, "synthetic bank generation failed: " +
                                   generated.failures.front());
  }

  CampaignConfig config;
  config.seed = spec.seed;
  config.trials_per_condition = spec.trials_per_condition;
  config.judges = judge_ids;
  config.advocates = advocate_ids;
  config.corpus_path = "corpus.json";
  config.bank_path = "bank.jsonl";
  config.providers_path = "providers.json";
  config.parallelism = spec.parallelism;
  jsonio::write_file((out / "config.json").string(),
                     campaign_config_to_json(config));

  ArgumentBank bank = load_bank(result.bank_path);
  result.ledger_path = (out / "ledger.jsonl").string();
  RunOptions options;
  options.max_new_trials = spec.max_new_trials;
  options.store_objects = spec.store_objects;
  options.objects_dir = (out / "objects").string();
  options.logical_clock = true;
  result.run =
      run_campaign(config, corpus, bank, registry, result.ledger_path, options);

  if (result.run.complete) {
    AnalyzeOptions analyze_options;
    analyze_options.permutation_replications = spec.permutation_replications;
    AnalyzeResult analyzed =
        run_analyze(result.ledger_path, spec.out_dir, analyze_options);
    result.report_paths = analyzed.report_paths;
  }
  return result;
}

}  // namespace persuade
