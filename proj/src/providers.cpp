#include "persuade/providers.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "jsonio.hpp"
#include "persuade/digest.hpp"
#include "persuade/error.hpp"

namespace persuade {

using jsonio::json;

const char* provider_kind_name(ProviderKind k) {
  switch (k) {
    case ProviderKind::Remote: return "remote";
    case ProviderKind::SyntheticAdvocate: return "synthetic-advocate";
    case ProviderKind::SyntheticJudge: return "synthetic-judge";
  }
  return "remote";
}

std::optional<ProviderKind> provider_kind_from_name(std::string_view name) {
  if (name == "remote") return ProviderKind::Remote;
  if (name == "synthetic-advocate") return ProviderKind::SyntheticAdvocate;
  if (name == "synthetic-judge") return ProviderKind::SyntheticJudge;
  return std::nullopt;
}

std::vector<std::string> validate_model_spec(const ModelSpec& spec) {
  std::vector<std::string> out;
  auto add = [&](const std::string& msg) {
    out.push_back("model '" + spec.id + "': " + msg);
  };
  if (spec.id.empty()) out.push_back("model spec: id empty");
  if (spec.kind == ProviderKind::Remote) {
    if (spec.endpoint.empty()) add("remote spec requires endpoint");
    if (spec.credentials_env.empty()) add("remote spec requires credentials_env");
    if (!spec.strengths_ref.empty()) {
      add("remote spec must not carry a strength table");
    }
  } else {
    if (!spec.endpoint.empty()) add("synthetic spec must not carry endpoint");
    if (!spec.credentials_env.empty()) {
      add("synthetic spec must not carry credentials_env");
    }
    if (spec.kind == ProviderKind::SyntheticJudge && spec.strengths_ref.empty()) {
      add("synthetic-judge spec requires a strength table reference");
    }
  }
  if (spec.max_output_tokens <= 0) add("max_output_tokens must be positive");
  if (spec.max_attempts < 1) add("max_attempts must be >= 1");
  if (spec.retry_initial_delay_ms < 0) add("retry_initial_delay_ms negative");
  if (spec.reasoning_budget && *spec.reasoning_budget < 0) {
    add("reasoning_budget negative");
  }
  return out;
}

double StrengthTable::strength(const std::string& advocate) const {
  auto it = advocates.find(advocate);
  if (it == advocates.end()) {
    raise(ErrorCode::UnknownAdvocate,
          "advocate '" + advocate + "' not in strength table");
  }
  return it->second;
}

double StrengthTable::effective_strength(
    const std::string& advocate, const std::string& condition_name,
    const std::string& jurisdiction_code) const {
  double s = strength(advocate);
  if (auto it = condition_bonus.find(condition_name); it != condition_bonus.end()) {
    s += it->second;
  }
  if (auto it = jurisdiction_scale.find(jurisdiction_code);
      it != jurisdiction_scale.end()) {
    s *= it->second;
  }
  return s;
}

StrengthTable parse_strength_table(const std::string& json_text) {
  json root = jsonio::parse(json_text, "strength table");
  const json& adv = jsonio::member(root, "advocates", "strength_table");
  if (!adv.is_object() || adv.empty()) {
    raise(ErrorCode::Schema,
          "strength_table.advocates: expected non-empty object");
  }
  StrengthTable t;
  for (auto it = adv.begin(); it != adv.end(); ++it) {
    if (!it.value().is_number()) {
      raise(ErrorCode::Schema,
            "strength_table.advocates." + it.key() + ": expected number");
    }
    t.advocates[it.key()] = it.value().get<double>();
  }
  auto read_map = [&](const char* key, std::map<std::string, double>& dst) {
    if (!root.contains(key)) return;
    const json& m = root[key];
    if (!m.is_object()) {
      raise(ErrorCode::Schema,
            std::string("strength_table.") + key + ": expected object");
    }
    for (auto it = m.begin(); it != m.end(); ++it) {
      if (!it.value().is_number()) {
        raise(ErrorCode::Schema, std::string("strength_table.") + key + "." +
                                     it.key() + ": expected number");
      }
      dst[it.key()] = it.value().get<double>();
    }
  };
  read_map("condition_bonus", t.condition_bonus);
  read_map("jurisdiction_scale", t.jurisdiction_scale);
  return t;
}

StrengthTable load_strength_table(const std::string& path) {
  return parse_strength_table(jsonio::read_file(path));
}

StrengthTable fixture_strength_table() {
  StrengthTable t;
  t.advocates = {{"advocate-a", 0.0},
                 {"advocate-b", 0.4},
                 {"advocate-c", 0.8},
                 {"advocate-d", 1.6}};
  return t;
}

std::string strength_table_to_json(const StrengthTable& t) {
  json root;
  root["advocates"] = t.advocates;
  if (!t.condition_bonus.empty()) root["condition_bonus"] = t.condition_bonus;
  if (!t.jurisdiction_scale.empty()) {
    root["jurisdiction_scale"] = t.jurisdiction_scale;
  }
  return root.dump(2) + "\n";
}

double bt_win_probability(double s_i, double s_j) {
  return 1.0 / (1.0 + std::exp(-(s_i - s_j)));
}

double expected_p2(double win_probability) {
  if (!(win_probability >= 0.0 && win_probability <= 1.0)) {
    raise(ErrorCode::Domain, "win probability outside [0,1]");
  }
  return std::abs(2.0 * win_probability - 1.0) / 2.0;
}

int decide_by_strengths(double s1, double s2, Rng& rng) {
  return rng.bernoulli(bt_win_probability(s1, s2)) ? 1 : 2;
}

int synthetic_judge_decide(const StrengthTable& table,
                           const std::string& advocate_1,
                           const std::string& advocate_2, Rng& rng) {
  double s1 = table.strength(advocate_1);
  double s2 = table.strength(advocate_2);
  return decide_by_strengths(s1, s2, rng);
}

namespace {

// --------------------------------------------------------------------------
// Synthetic advocate text
// --------------------------------------------------------------------------

constexpr const char* kOpeners[] = {
    "The appeal should be resolved in our client's favour for three "
    "connected reasons.",
    "On a fair reading of the record, only one outcome is open to the court.",
    "The submissions for the other side cannot survive contact with the "
    "governing authorities.",
    "This case is narrower than it first appears, and the narrow question "
    "admits of one answer.",
};

constexpr const char* kSubjects[] = {
    "The settled line of authority", "The statutory language",
    "The purpose underlying the rule", "The weight of appellate precedent",
    "First principle",               "The structure of the governing scheme",
};

constexpr const char* kVerbs[] = {
    "compels", "strongly favours", "points unmistakably toward", "supports",
    "requires",
};

constexpr const char* kObjects[] = {
    "judgment for our client",
    "the construction we advance",
    "rejection of the contrary reading",
    "the narrower interpretation adopted below",
    "the conclusion that liability is established",
};

constexpr const char* kQualifiers[] = {
    "and nothing in the opposing submissions displaces that conclusion",
    "a point the other side does not seriously engage",
    "as the first-instance findings make plain",
    "and the exceptions relied upon have no purchase on these facts",
    "which is dispositive of the question presented",
};

constexpr const char* kClosers[] = {
    "For these reasons the court should decide the question in our client's "
    "favour.",
    "The only principled disposition is judgment for our client.",
    "Accordingly, the appeal resolves in our client's favour.",
};

template <std::size_t N>
const char* pick(Rng& rng, const char* const (&arr)[N]) {
  return arr[rng.below(static_cast<std::uint32_t>(N))];
}

std::string synthetic_argument_text(const ModelSpec& spec,
                                    const std::string& prompt,
                                    std::uint64_t seed) {
  Rng rng = Rng::derive(seed, "synthetic-advocate-text", hash64(prompt),
                        hash64(spec.id));
  std::string text = pick(rng, kOpeners);
  int sentences = 3 + static_cast<int>(rng.below(3));
  for (int i = 0; i < sentences; ++i) {
    text += " ";
    text += pick(rng, kSubjects);
    text += " ";
    text += pick(rng, kVerbs);
    text += " ";
    text += pick(rng, kObjects);
    text += ", ";
    text += pick(rng, kQualifiers);
    text += ".";
  }
  text += " ";
  text += pick(rng, kClosers);
  return text;
}

// --------------------------------------------------------------------------
// Remote chat-completion client
// --------------------------------------------------------------------------

struct SplitUrl {
  std::string base;  // scheme://host[:port]
  std::string path;  // leading path prefix, may be empty
};

SplitUrl split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    raise(ErrorCode::Validation, "endpoint '" + url + "' missing scheme");
  }
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, ""};
  return {url.substr(0, path_start), url.substr(path_start)};
}

bool retryable_status(int status) {
  return status == 408 || status == 429 || status >= 500;
}

CompletionResult complete_remote(const ModelSpec& spec,
                                 const std::string& prompt,
                                 std::optional<std::uint64_t> seed) {
  const char* token =
      spec.credentials_env.empty() ? nullptr : std::getenv(spec.credentials_env.c_str());
  if (!token || !*token) {
    raise(ErrorCode::Auth, "credential env var '" + spec.credentials_env +
                               "' not set for model '" + spec.id + "'");
  }

  json body;
  body["model"] = spec.id;
  body["messages"] = json::array({{{"role", "user"}, {"content", prompt}}});
  body["max_tokens"] = spec.max_output_tokens;
  if (spec.temperature) body["temperature"] = *spec.temperature;
  if (spec.reasoning_budget) body["reasoning_budget"] = *spec.reasoning_budget;
  if (seed) body["seed"] = *seed;
  const std::string payload = body.dump();

  SplitUrl url = split_url(spec.endpoint);
  std::string path = url.path;
  const std::string suffix = "/chat/completions";
  if (path.size() < suffix.size() ||
      path.compare(path.size() - suffix.size(), suffix.size(), suffix) != 0) {
    path += suffix;
  }

  CompletionResult result;
  result.request_digest = sha256_hex(payload);

  auto t0 = std::chrono::steady_clock::now();
  std::string last_error;
  for (int attempt = 1; attempt <= spec.max_attempts; ++attempt) {
    result.attempts = attempt;
    if (attempt > 1) {
      auto delay = std::chrono::milliseconds(
          spec.retry_initial_delay_ms * (1LL << (attempt - 2)));
      std::this_thread::sleep_for(delay);
    }

    httplib::Client client(url.base);
    client.set_connection_timeout(30);
    client.set_read_timeout(300);
    httplib::Headers headers = {
        {"Authorization", std::string("Bearer ") + token}};
    auto res = client.Post(path, headers, payload, "application/json");

    if (!res) {
      last_error = "transport failure: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 401 || res->status == 403) {
      raise(ErrorCode::Auth, "model '" + spec.id + "': HTTP " +
                                 std::to_string(res->status) + " from provider");
    }
    if (retryable_status(res->status)) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      raise(ErrorCode::Transport, "model '" + spec.id + "': HTTP " +
                                      std::to_string(res->status) + ": " +
                                      res->body);
    }

    json reply = json::parse(res->body, nullptr, false);
    if (reply.is_discarded() || !reply.contains("choices") ||
        !reply["choices"].is_array() || reply["choices"].empty()) {
      raise(ErrorCode::Transport,
            "model '" + spec.id + "': malformed completion response");
    }
    const json& msg = reply["choices"][0];
    std::string text;
    if (msg.contains("message") && msg["message"].contains("content") &&
        msg["message"]["content"].is_string()) {
      text = msg["message"]["content"].get<std::string>();
    }
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
      raise(ErrorCode::Refusal,
            "model '" + spec.id + "': empty or blocked completion");
    }
    result.text = std::move(text);
    result.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
    return result;
  }
  raise(ErrorCode::Transport, "model '" + spec.id + "': retries exhausted (" +
                                  std::to_string(spec.max_attempts) +
                                  " attempts): " + last_error);
}

}  // namespace

CompletionResult complete(const ModelSpec& spec, const std::string& prompt,
                          std::optional<std::uint64_t> seed) {
  if (prompt.empty()) raise(ErrorCode::Domain, "prompt empty");
  switch (spec.kind) {
    case ProviderKind::Remote:
      return complete_remote(spec, prompt, seed);
    case ProviderKind::SyntheticAdvocate: {
      CompletionResult r;
      r.text = synthetic_argument_text(spec, prompt, seed.value_or(0));
      r.request_digest =
          sha256_hex(prompt + "\x1f" + spec.id + "\x1f" +
                     std::to_string(seed.value_or(0)));
      r.latency_ms = 0;
      r.attempts = 1;
      return r;
    }
    case ProviderKind::SyntheticJudge:
      raise(ErrorCode::Validation,
            "synthetic-judge '" + spec.id +
                "' decides trials via its strength table, not text completion");
  }
  raise(ErrorCode::Internal, "unreachable provider kind");
}

const ModelSpec& ProviderRegistry::require(const std::string& id) const {
  auto it = specs.find(id);
  if (it == specs.end()) {
    raise(ErrorCode::Validation,
          "model id '" + id + "' not present in provider config");
  }
  return it->second;
}

ProviderRegistry parse_provider_config(const std::string& json_text) {
  json root = jsonio::parse(json_text, "provider config");
  if (!root.is_array()) {
    raise(ErrorCode::Schema, "provider config: expected top-level array");
  }
  ProviderRegistry reg;
  std::vector<std::string> violations;
  for (std::size_t i = 0; i < root.size(); ++i) {
    const std::string path = "providers[" + std::to_string(i) + "]";
    const json& j = root[i];
    ModelSpec spec;
    std::string kind = jsonio::get_string(j, "kind", path);
    auto k = provider_kind_from_name(kind);
    if (!k) {
      raise(ErrorCode::Schema, path + ".kind: unknown provider kind '" + kind +
                                   "'");
    }
    spec.kind = *k;
    spec.id = jsonio::get_string(j, "id", path);
    spec.endpoint = jsonio::value_or<std::string>(j, "endpoint", "");
    spec.credentials_env = jsonio::value_or<std::string>(j, "credentials_env", "");
    if (j.contains("reasoning_budget") && !j["reasoning_budget"].is_null()) {
      spec.reasoning_budget = jsonio::get_int(j, "reasoning_budget", path);
    }
    if (j.contains("temperature") && !j["temperature"].is_null()) {
      spec.temperature = jsonio::get_number(j, "temperature", path);
    }
    spec.max_output_tokens =
        static_cast<int>(jsonio::value_or<std::int64_t>(j, "max_output_tokens", 2048));
    spec.strengths_ref = jsonio::value_or<std::string>(j, "strengths", "");
    spec.max_attempts =
        static_cast<int>(jsonio::value_or<std::int64_t>(j, "max_attempts", 4));
    spec.retry_initial_delay_ms = static_cast<int>(
        jsonio::value_or<std::int64_t>(j, "retry_initial_delay_ms", 250));

    auto v = validate_model_spec(spec);
    violations.insert(violations.end(), v.begin(), v.end());
    if (reg.specs.count(spec.id)) {
      violations.push_back("model '" + spec.id + "': duplicate id");
    }
    reg.specs[spec.id] = std::move(spec);
  }
  if (!violations.empty()) {
    std::string msg = "provider config invalid:";
    for (const auto& v : violations) msg += "\n  - " + v;
    raise(ErrorCode::Validation, msg);
  }
  return reg;
}

ProviderRegistry load_provider_config(const std::string& path) {
  ProviderRegistry reg = parse_provider_config(jsonio::read_file(path));
  for (auto& [id, spec] : reg.specs) {
    spec.strengths_ref = jsonio::resolve_sibling(path, spec.strengths_ref);
  }
  return reg;
}

}  // namespace persuade
