// The bundled permutation programs, their diagnosis cases and the behaviour
// catalogue the bug variants are checked against.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flounder/diagnoser.hpp"
#include "flounder/engine.hpp"
#include "flounder/reader.hpp"

namespace flounder {

// FLOUNDER_CORPUS overrides the directory compiled in.
std::string corpus_dir();
std::string corpus_file(const std::string& name);

struct ExpectedAnswer {
  OutcomeKind kind = OutcomeKind::Success;
  // format_atom text of the goal instance.
  std::string atom;
};

struct CorpusCase {
  std::string name;
  std::string program;   // file names relative to corpus_dir()
  std::string goal;
  std::string intent;
  std::string answers;
  std::string golden;
  std::size_t first_answer = 1;
  // Empty when only the transcript is pinned.
  std::vector<ExpectedAnswer> expected;
  OutcomeKind end = OutcomeKind::Exhausted;
  BugCategory category = BugCategory::IncorrectClause;
};

const std::vector<CorpusCase>& diagnosis_cases();

struct CorpusPair {
  std::string program;
  std::string goal;
};

// Program/goal pairs used by the property checks.
std::vector<CorpusPair> corpus_pairs();

// Distinct atoms (up to renaming) at the nodes of the proof trees of the
// corpus pairs, the sample pool for intent closure checks.
std::vector<Term> corpus_atoms(std::size_t max_steps = 20'000);

std::string answer_text(const Outcome& o);
std::vector<ExpectedAnswer> answer_sequence(const std::vector<Outcome>& outcomes);
std::string read_file(const std::string& path);
// Lines of a golden transcript, trailing whitespace dropped.
std::vector<std::string> read_lines(const std::string& path);

struct CatalogueCheck {
  std::string what;
  bool ok = false;
  std::string detail;
};

// Observable behaviour each bug variant must show. Later checks are
// skipped once an earlier one fails.
std::vector<CatalogueCheck> bug1_catalogue(const Program& p);
std::vector<CatalogueCheck> bug2_catalogue(const Program& p);
std::vector<CatalogueCheck> bug3_catalogue(const Program& p);
// Bug 3 in the forward direction: counts only, not part of the catalogue.
struct ForwardCounts {
  std::size_t successes = 0;
  std::size_t floundered = 0;
  // Floundered answers whose residue mentions a goal variable.
  std::size_t floundered_visible = 0;
  OutcomeKind end = OutcomeKind::Exhausted;
  std::vector<ExpectedAnswer> answers;
};
ForwardCounts bug3_forward(const Program& p);

bool all_ok(const std::vector<CatalogueCheck>& checks);

struct Candidate {
  std::string edit;
  Program program;
};

// Single edits of the recursive inserted/3 call in the correct program.
std::vector<Candidate> delay_condition_edits(const Program& correct);
std::vector<Candidate> variable_edits(const Program& correct);

// Candidates passing the catalogue, in generation order.
std::vector<Candidate> reconstruct(const std::vector<Candidate>& candidates,
                                   std::vector<CatalogueCheck> (*catalogue)(const Program&));

// Replays a case with its scripted answers, falling back to the intent rules.
struct Replay {
  std::vector<std::string> transcript;
  std::optional<Diagnosis> diagnosis;
};
Replay replay_case(const CorpusCase& c, const Program& program);
Replay replay_case(const CorpusCase& c);

}  // namespace flounder
