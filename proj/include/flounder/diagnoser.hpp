// Top-down search of a partial proof tree for a buggy node: an erroneous
// node with no erroneous children.

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "flounder/engine.hpp"
#include "flounder/intent.hpp"
#include "flounder/prooftree.hpp"

namespace flounder {

enum class BugCategory : std::uint8_t { IncorrectDelayAnnotation, IncorrectModesTypes, IncorrectClause };

const char* to_string(BugCategory c);

struct Diagnosis {
  BugCategory category = BugCategory::IncorrectClause;
  NodeId node = 0;
  std::size_t answer_index = 0;
  AnnotatedAtom buggy;
  // The buggy node's own clause instance (modes/types and clause bugs).
  std::optional<ClauseInstance> clause_instance;
  // Instance of the clause containing the buggy call, if it has a parent.
  std::optional<ClauseInstance> parent_instance;
  std::vector<NodeId> inadmissible_children;
  std::vector<Term> inadmissible_atoms;
  // Clause used at the node, or the call site for a delayed leaf.
  SourceLocation location;
  // A successful inadmissible child suggests a type error rather than a
  // control error.
  bool succeeded_inadmissible_child = false;
};

// The report block exactly as printed in transcripts.
std::string render_diagnosis(const Diagnosis& d);
// Extra lines: location, parent clause instance, inadmissible calls.
std::string render_details(const Diagnosis& d);

struct QuestionRecord {
  std::string text;
  NodeStatus status = NodeStatus::Succeeded;
  Verdict verdict = Verdict::Valid;
  NodeId node = 0;
  std::size_t answer_index = 0;
};

// One debugging session: asks the oracle, caches its answers up to variable
// renaming and keeps the transcript.
class DiagnosisSession {
 public:
  using Sink = std::function<void(const std::string&)>;

  explicit DiagnosisSession(Oracle& oracle, Sink sink = {}) : oracle_(oracle), sink_(std::move(sink)) {}

  TruthValue truth(const PartialProofTree& tree, NodeId id, std::size_t answer_index = 0);
  // Nullopt when the root is not erroneous.
  std::optional<Diagnosis> diagnose(const PartialProofTree& tree, std::size_t answer_index = 0);

  // Emits a transcript line (also used for the "..." skip marker).
  void emit(const std::string& line);

  const std::vector<std::string>& transcript() const { return transcript_; }
  const std::vector<QuestionRecord>& questions() const { return questions_; }

 private:
  Verdict verdict(const PartialProofTree& tree, NodeId id, std::size_t answer_index);

  Oracle& oracle_;
  Sink sink_;
  std::unordered_map<std::string, Verdict> cache_;
  std::vector<std::string> transcript_;
  std::vector<QuestionRecord> questions_;
};

struct AnswerReport {
  std::size_t index = 0;  // 1-based
  OutcomeKind kind = OutcomeKind::Success;
  std::string atom;
  enum class Result : std::uint8_t { Skipped, Valid, Inadmissible, Diagnosed, NotAsked } result = Result::NotAsked;
};

struct WrongReport {
  std::vector<AnswerReport> answers;
  std::optional<Diagnosis> diagnosis;
  // Terminal outcome of the enumeration when no diagnosis was found.
  OutcomeKind end = OutcomeKind::Exhausted;
};

struct WrongOptions {
  EngineOptions engine;
  // Diagnose from this 1-based answer on; earlier answers are skipped
  // without questions and a "..." line is emitted.
  std::size_t first_answer = 1;
};

// Diagnoses the answers of an atomic goal in order until one yields a bug.
WrongReport diagnose_wrong(const Program& program, const Goal& goal, DiagnosisSession& session,
                           const WrongOptions& options = {});

}  // namespace flounder
