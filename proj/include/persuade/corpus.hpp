#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace persuade {

enum class Jurisdiction { US, UK, IRL };

inline constexpr std::array<Jurisdiction, 3> kAllJurisdictions = {
    Jurisdiction::US, Jurisdiction::UK, Jurisdiction::IRL};

const char* jurisdiction_code(Jurisdiction j);  // "US" | "UK" | "IRL"
const char* jurisdiction_display_name(Jurisdiction j);
std::optional<Jurisdiction> jurisdiction_from_code(std::string_view code);

// One hard legal case: the unit the whole protocol samples from.
struct Scenario {
  std::string id;
  Jurisdiction jurisdiction = Jurisdiction::US;
  std::vector<std::string> facts;               // exactly 3 paragraphs
  std::vector<std::string> original_arguments;  // exactly 2 paragraphs
  std::string legal_question;
  std::array<std::string, 2> party_labels;      // distinct, side 1 then side 2

  // side is 1 or 2.
  const std::string& party_label(int side) const;

  bool operator==(const Scenario&) const = default;
};

// Empty iff every Scenario invariant holds; each entry names field and rule.
std::vector<std::string> validate_scenario(const Scenario& s);

struct Corpus {
  std::vector<Scenario> scenarios;
  int expected_per_jurisdiction = 5;
  // Non-strict load notes (count shortfalls etc.). Not serialized.
  std::vector<std::string> warnings;

  const Scenario* find(std::string_view id) const;
  const Scenario& require(std::string_view id) const;  // throws DanglingReference
  std::size_t size() const { return scenarios.size(); }
};

// Parses and validates corpus JSON. Strict mode additionally requires
// expected_per_jurisdiction scenarios for every jurisdiction; non-strict
// records shortfalls as warnings. Scenario-level invariant violations are
// always errors.
Corpus parse_corpus(const std::string& json_text, bool strict,
                    int expected_per_jurisdiction = 5);
Corpus load_corpus(const std::string& path, bool strict,
                   int expected_per_jurisdiction = 5);

std::string corpus_to_json(const Corpus& c);
void write_corpus(const Corpus& c, const std::string& path);

// Deterministic built-in corpus (per_jurisdiction scenarios for each of the
// three jurisdictions) used by `simulate` and the test suites.
Corpus make_fixture_corpus(int per_jurisdiction = 5);

}  // namespace persuade
