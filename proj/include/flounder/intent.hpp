// Intended interpretation of a program: which atoms are admissible, which
// are valid, and the oracles that answer diagnosis questions from it.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "flounder/prooftree.hpp"
#include "flounder/reader.hpp"
#include "flounder/term.hpp"

namespace flounder {

class IntentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The user gave up (q or end of input).
class OracleAbort : public OracleError {
 public:
  OracleAbort() : OracleError("diagnosis aborted by the user") {}
};

enum class Verdict : std::uint8_t { Valid, Erroneous, Inadmissible };
enum class TruthValue : std::uint8_t { Correct, Erroneous, Inadmissible };

char verdict_char(Verdict v);
std::optional<Verdict> parse_verdict(std::string_view text);
const char* to_string(TruthValue t);

// Node truth from the oracle's verdict on its atom and the subtree status.
// A floundered node is never correct.
TruthValue truth_value(Verdict verdict, NodeStatus status);

class Interpretation {
 public:
  static Interpretation parse(std::string_view text, const std::string& file = "<intent>",
                              const std::string& base_dir = ".");
  static Interpretation load(const std::string& path);

  bool covers(const Term& atom) const;
  // Throws IntentError for predicates without a rule.
  bool admissible(const Term& atom) const;
  // Nullopt when the reference run hit its step bound.
  std::optional<bool> valid(const Term& atom) const;
  std::optional<Verdict> classify(const Term& atom) const;

  std::size_t depth_bound() const { return depth_bound_; }
  const Program* reference() const { return reference_.get(); }
  const std::string& reference_path() const { return reference_path_; }

 private:
  struct Rule {
    Term head;        // predicate with distinct variable arguments
    Term condition;   // instantiation test expression over the head variables
  };

  std::unordered_map<std::string, Rule> rules_;
  std::vector<Term> valid_atoms_;
  std::shared_ptr<const Program> reference_;
  std::string reference_path_;
  std::size_t depth_bound_ = 10'000;
};

// Distinct free variables replaced by $1, $2, ... in first-occurrence order.
Term encode_variables(const Term& t);

struct ClosureReport {
  std::size_t samples = 0;
  std::size_t instances = 0;
  std::size_t unknown = 0;
  std::vector<std::string> violations;

  bool clean() const { return violations.empty(); }
};

// Checks that admissible and valid atoms stay so under `instances` random
// instantiations spread over `samples`.
ClosureReport check_closure(const Interpretation& interp, const std::vector<Term>& samples,
                            std::size_t instances, std::uint64_t seed = 1);

struct Question {
  Term atom;
  NodeStatus status = NodeStatus::Succeeded;
  NodeId node = 0;
  std::size_t answer_index = 0;
  const PartialProofTree* tree = nullptr;
  // Canonical atom text, also the cache key.
  std::string text;

  // "(succeeded)  atom ...? " / "(floundered) atom ...? "
  std::string prompt() const;
};

std::string question_prompt(NodeStatus status, const std::string& atom_text);

class Oracle {
 public:
  virtual ~Oracle() = default;
  virtual Verdict ask(const Question& q) = 0;
  // True when the oracle writes the prompt and answer itself.
  virtual bool echoes() const { return false; }
};

class RuleOracle : public Oracle {
 public:
  explicit RuleOracle(const Interpretation& interp, Oracle* fallback = nullptr)
      : interp_(interp), fallback_(fallback) {}
  Verdict ask(const Question& q) override;

 private:
  const Interpretation& interp_;
  Oracle* fallback_;
};

// Answers from a file of `atom -> v|e|i` lines or a replayed transcript.
class ScriptedOracle : public Oracle {
 public:
  static ScriptedOracle parse(std::string_view text, const std::string& file = "<answers>");
  static ScriptedOracle load(const std::string& path);

  void set_fallback(Oracle* fallback) { fallback_ = fallback; }
  Verdict ask(const Question& q) override;
  std::optional<Verdict> lookup(const std::string& atom_text) const;
  std::size_t size() const { return answers_.size(); }

 private:
  std::unordered_map<std::string, Verdict> answers_;
  Oracle* fallback_ = nullptr;
};

class InteractiveOracle : public Oracle {
 public:
  // With `echo_answers`, the verdict read is written back so the output
  // stream holds full transcript lines even when input is not a terminal.
  InteractiveOracle(std::istream& in, std::ostream& out, bool echo_answers)
      : in_(in), out_(out), echo_(echo_answers) {}
  Verdict ask(const Question& q) override;
  bool echoes() const override { return true; }

 private:
  std::istream& in_;
  std::ostream& out_;
  bool echo_;
};

}  // namespace flounder
