#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "persuade/rng.hpp"

namespace persuade {

enum class ProviderKind { Remote, SyntheticAdvocate, SyntheticJudge };

const char* provider_kind_name(ProviderKind k);
std::optional<ProviderKind> provider_kind_from_name(std::string_view name);

struct ModelSpec {
  ProviderKind kind = ProviderKind::SyntheticAdvocate;
  std::string id;
  std::string endpoint;         // remote: base URL of a chat-completion service
  std::string credentials_env;  // remote: env var holding the bearer token
  std::optional<std::int64_t> reasoning_budget;  // tokens; forwarded as-is
  std::optional<double> temperature;
  int max_output_tokens = 2048;
  std::string strengths_ref;  // synthetic: path of the strength table
  int max_attempts = 4;
  int retry_initial_delay_ms = 250;
};

// Empty iff the spec satisfies the per-kind field requirements.
std::vector<std::string> validate_model_spec(const ModelSpec& spec);

struct CompletionResult {
  std::string text;
  std::string request_digest;
  std::int64_t latency_ms = 0;
  int attempts = 1;
};

// Advocate strengths on a log-odds scale, plus the two optional modifiers the
// synthetic oracle uses: an additive per-condition bonus and a multiplicative
// per-jurisdiction scale applied to strength differences.
struct StrengthTable {
  std::map<std::string, double> advocates;
  std::map<std::string, double> condition_bonus;      // keyed by condition name
  std::map<std::string, double> jurisdiction_scale;   // keyed by code

  double strength(const std::string& advocate) const;  // throws UnknownAdvocate
  double effective_strength(const std::string& advocate,
                            const std::string& condition_name,
                            const std::string& jurisdiction_code) const;
};

StrengthTable parse_strength_table(const std::string& json_text);
StrengthTable load_strength_table(const std::string& path);
// Four advocates at strengths {0, 0.4, 0.8, 1.6}; the table behind
// `--strengths fixture`.
StrengthTable fixture_strength_table();
std::string strength_table_to_json(const StrengthTable& t);

// P(i beats j) = 1 / (1 + exp(-(s_i - s_j))).
double bt_win_probability(double s_i, double s_j);

// Asymptotic pairwise persuadability |2P - 1| / 2 when one advocate wins each
// trial with probability P. Throws Domain outside [0, 1].
double expected_p2(double win_probability);

// Returns 1 with probability bt_win_probability(s1, s2), else 2.
int decide_by_strengths(double s1, double s2, Rng& rng);
int synthetic_judge_decide(const StrengthTable& table,
                           const std::string& advocate_1,
                           const std::string& advocate_2, Rng& rng);

// Text generation. Remote specs go over HTTP with exponential-backoff retries
// up to spec.max_attempts; synthetic advocates produce deterministic
// templated text from (seed, prompt, id) and never touch the network.
CompletionResult complete(const ModelSpec& spec, const std::string& prompt,
                          std::optional<std::uint64_t> seed = std::nullopt);

struct ProviderRegistry {
  std::map<std::string, ModelSpec> specs;

  const ModelSpec& require(const std::string& id) const;
  bool contains(const std::string& id) const { return specs.count(id) > 0; }
};

ProviderRegistry parse_provider_config(const std::string& json_text);
ProviderRegistry load_provider_config(const std::string& path);

}  // namespace persuade
