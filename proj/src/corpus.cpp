#include "persuade/corpus.hpp"

#include <cctype>
#include <set>

#include "jsonio.hpp"
#include "persuade/error.hpp"

namespace persuade {

using jsonio::json;

const char* jurisdiction_code(Jurisdiction j) {
  switch (j) {
    case Jurisdiction::US: return "US";
    case Jurisdiction::UK: return "UK";
    case Jurisdiction::IRL: return "IRL";
  }
  return "US";
}

const char* jurisdiction_display_name(Jurisdiction j) {
  switch (j) {
    case Jurisdiction::US: return "United States";
    case Jurisdiction::UK: return "England and Wales";
    case Jurisdiction::IRL: return "Ireland";
  }
  return "United States";
}

std::optional<Jurisdiction> jurisdiction_from_code(std::string_view code) {
  if (code == "US") return Jurisdiction::US;
  if (code == "UK") return Jurisdiction::UK;
  if (code == "IRL") return Jurisdiction::IRL;
  return std::nullopt;
}

const std::string& Scenario::party_label(int side) const {
  if (side != 1 && side != 2) {
    raise(ErrorCode::Domain, "side must be 1 or 2, got " + std::to_string(side));
  }
  return party_labels[static_cast<std::size_t>(side - 1)];
}

std::vector<std::string> validate_scenario(const Scenario& s) {
  std::vector<std::string> out;
  auto add = [&](const std::string& msg) {
    out.push_back("scenario '" + s.id + "': " + msg);
  };
  if (s.id.empty()) out.push_back("scenario: id empty");
  if (s.facts.size() != 3) {
    add("facts must have exactly 3 paragraphs, got " +
        std::to_string(s.facts.size()));
  }
  for (std::size_t i = 0; i < s.facts.size(); ++i) {
    if (s.facts[i].empty()) add("facts[" + std::to_string(i) + "] empty");
  }
  if (s.original_arguments.size() != 2) {
    add("original_arguments must have exactly 2 paragraphs, got " +
        std::to_string(s.original_arguments.size()));
  }
  for (std::size_t i = 0; i < s.original_arguments.size(); ++i) {
    if (s.original_arguments[i].empty()) {
      add("original_arguments[" + std::to_string(i) + "] empty");
    }
  }
  if (s.legal_question.empty()) add("legal_question empty");
  if (s.party_labels[0].empty() || s.party_labels[1].empty()) {
    add("party_labels must both be non-empty");
  }
  if (!s.party_labels[0].empty() && s.party_labels[0] == s.party_labels[1]) {
    add("party_labels not distinct");
  }
  return out;
}

const Scenario* Corpus::find(std::string_view id) const {
  for (const auto& s : scenarios) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

const Scenario& Corpus::require(std::string_view id) const {
  const Scenario* s = find(id);
  if (!s) {
    raise(ErrorCode::DanglingReference,
          "scenario '" + std::string(id) + "' not in corpus");
  }
  return *s;
}

namespace {

Scenario scenario_from_json(const json& j, const std::string& path) {
  Scenario s;
  s.id = jsonio::get_string(j, "id", path);
  std::string code = jsonio::get_string(j, "jurisdiction", path);
  auto jur = jurisdiction_from_code(code);
  if (!jur) {
    raise(ErrorCode::Schema,
          path + ".jurisdiction: expected one of US|UK|IRL, got '" + code + "'");
  }
  s.jurisdiction = *jur;
  s.facts = jsonio::get_string_array(j, "facts", path);
  s.original_arguments = jsonio::get_string_array(j, "original_arguments", path);
  s.legal_question = jsonio::get_string(j, "legal_question", path);
  auto labels = jsonio::get_string_array(j, "party_labels", path);
  if (labels.size() != 2) {
    raise(ErrorCode::Schema, path + ".party_labels: expected 2 entries, got " +
                                 std::to_string(labels.size()));
  }
  s.party_labels = {labels[0], labels[1]};
  return s;
}

json scenario_to_json(const Scenario& s) {
  json j;
  j["id"] = s.id;
  j["jurisdiction"] = jurisdiction_code(s.jurisdiction);
  j["facts"] = s.facts;
  j["original_arguments"] = s.original_arguments;
  j["legal_question"] = s.legal_question;
  j["party_labels"] = {s.party_labels[0], s.party_labels[1]};
  return j;
}

}  // namespace

Corpus parse_corpus(const std::string& json_text, bool strict,
                    int expected_per_jurisdiction) {
  json root = jsonio::parse(json_text, "corpus");
  const json& arr = jsonio::member(root, "scenarios", "corpus");
  if (!arr.is_array()) {
    raise(ErrorCode::Schema, "corpus.scenarios: expected array");
  }

  Corpus c;
  c.expected_per_jurisdiction = expected_per_jurisdiction;
  c.scenarios.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    c.scenarios.push_back(
        scenario_from_json(arr[i], "scenarios[" + std::to_string(i) + "]"));
  }

  std::vector<std::string> violations;
  std::set<std::string> seen;
  for (const auto& s : c.scenarios) {
    auto v = validate_scenario(s);
    violations.insert(violations.end(), v.begin(), v.end());
    if (!seen.insert(s.id).second) {
      violations.push_back("scenario '" + s.id + "': duplicate id");
    }
  }
  if (!violations.empty()) {
    std::string msg = "corpus invalid:";
    for (const auto& v : violations) msg += "\n  - " + v;
    raise(ErrorCode::Validation, msg);
  }

  for (Jurisdiction j : kAllJurisdictions) {
    int count = 0;
    for (const auto& s : c.scenarios) {
      if (s.jurisdiction == j) ++count;
    }
    if (count != expected_per_jurisdiction) {
      std::string note = std::string(jurisdiction_code(j)) + ": expected " +
                         std::to_string(expected_per_jurisdiction) +
                         " scenarios, got " + std::to_string(count);
      if (strict) {
        raise(ErrorCode::Validation, "corpus invalid (strict): " + note);
      }
      c.warnings.push_back(note);
    }
  }
  return c;
}

Corpus load_corpus(const std::string& path, bool strict,
                   int expected_per_jurisdiction) {
  return parse_corpus(jsonio::read_file(path), strict,
                      expected_per_jurisdiction);
}

std::string corpus_to_json(const Corpus& c) {
  json root;
  json arr = json::array();
  for (const auto& s : c.scenarios) arr.push_back(scenario_to_json(s));
  root["scenarios"] = std::move(arr);
  return root.dump(2) + "\n";
}

void write_corpus(const Corpus& c, const std::string& path) {
  jsonio::write_file(path, corpus_to_json(c));
}

namespace {

struct FixtureTheme {
  const char* topic;
  const char* question;
  const char* label1;
  const char* label2;
};

constexpr FixtureTheme kThemes[5] = {
    {"a disputed exclusion clause in a long-term supply contract",
     "whether the exclusion clause extends to losses caused by deliberate "
     "non-performance",
     "Appellant", "Respondent"},
    {"an employer's liability for an injury sustained during an off-site "
     "training exercise",
     "whether the employer owed a non-delegable duty of care in the "
     "circumstances",
     "Plaintiff", "Defendant"},
    {"the retrospective application of an amended licensing statute",
     "whether the amended statute applies to applications lodged before its "
     "commencement",
     "Applicant", "Licensing Authority"},
    {"a planning authority's refusal to grant permission after an earlier "
     "favourable screening decision",
     "whether the refusal frustrated a legitimate expectation created by the "
     "screening decision",
     "Developer", "Planning Authority"},
    {"competing claims to a right of way acquired by long use over registered "
     "land",
     "whether the claimed user was sufficiently continuous and as of right to "
     "establish the easement",
     "Claimant", "Registered Owner"},
};

std::string lower_copy(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

Scenario make_fixture_scenario(Jurisdiction jur, int index) {
  const FixtureTheme& t = kThemes[index % 5];
  const std::string jname = jurisdiction_display_name(jur);
  const std::string code = lower_copy(jurisdiction_code(jur));
  const std::string n = std::to_string(index + 1);

  Scenario s;
  s.id = code + "-" + std::string(index + 1 < 10 ? "00" : "0") + n;
  s.jurisdiction = jur;
  s.facts = {
      "The parties came before the courts of " + jname +
          " in a dispute concerning " + t.topic +
          ". The proceedings below produced a divided court, with the "
          "majority and the dissent reading the governing authorities in "
          "materially different ways.",
      "The first instance court made detailed findings of fact which neither "
      "party now challenges. Those findings establish the sequence of events "
      "in file " + s.id + " and frame the single contested issue that "
      "remains live on appeal.",
      "Both sides accept that the outcome turns on a question of law rather "
      "than on any further factual inquiry, and each points to a line of "
      "authority said to compel judgment in its favour.",
  };
  s.original_arguments = {
      "The " + std::string(t.label1) + " argued that the better view of the "
      "authorities, read with the purpose of the governing rule, resolves "
      "the issue in its favour, and that the contrary reading would produce "
      "consequences the rule was designed to avoid.",
      "The " + std::string(t.label2) + " argued that the settled line of "
      "authority forecloses that reading, that certainty in this area of law "
      "is of particular importance, and that any change of course is a "
      "matter for the legislature.",
  };
  s.legal_question = "The question is " + std::string(t.question) + ".";
  s.party_labels = {t.label1, t.label2};
  return s;
}

}  // namespace

Corpus make_fixture_corpus(int per_jurisdiction) {
  Corpus c;
  c.expected_per_jurisdiction = per_jurisdiction;
  for (Jurisdiction j : kAllJurisdictions) {
    for (int i = 0; i < per_jurisdiction; ++i) {
      c.scenarios.push_back(make_fixture_scenario(j, i));
    }
  }
  return c;
}

}  // namespace persuade
