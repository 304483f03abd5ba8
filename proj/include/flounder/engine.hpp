// SLD resolution with when/2 coroutining. Delayed calls resume as soon as a
// unification makes their condition true; a derivation that ends with
// delayed calls left over is reported as a floundered answer.

#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "flounder/prooftree.hpp"
#include "flounder/reader.hpp"
#include "flounder/term.hpp"

namespace flounder {

class EngineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OutcomeKind : std::uint8_t { Success, Floundered, Exhausted, StepLimit, AnswerLimit };

const char* to_string(OutcomeKind k);

struct Binding {
  std::string name;
  Term value;
};

struct Outcome {
  OutcomeKind kind = OutcomeKind::Exhausted;
  // Goal variables in source order, resolved in the final store.
  std::vector<Binding> bindings;
  // Goal atoms in their final instantiation, conditions kept.
  std::vector<AnnotatedAtom> goal_instance;
  // Delayed calls left at the end (Floundered only).
  std::vector<AnnotatedAtom> residue;
  std::optional<PartialProofTree> tree;
  // Steps consumed since the start of the run.
  std::size_t steps = 0;
  // Successful calls of the encoding test builtins in this derivation.
  std::size_t extraneous_uses = 0;
  // Root accumulator pair agrees with the pending-delay count.
  bool accumulators_agree = true;

  bool is_answer() const { return kind == OutcomeKind::Success || kind == OutcomeKind::Floundered; }
  // The goal instance as one term (a `,` chain for conjunctions).
  Term answer_term() const;
  // "A = [1, 2, _A|_B], B = x" style text; "true" without goal variables.
  std::string bindings_text() const;
};

struct SelectionStrategy {
  enum class Kind : std::uint8_t { Leftmost, Random };
  Kind kind = Kind::Leftmost;
  std::uint64_t seed = 0;

  static SelectionStrategy leftmost() { return {}; }
  static SelectionStrategy random(std::uint64_t seed) { return {Kind::Random, seed}; }
};

struct Limits {
  std::size_t max_steps = 1'000'000;
  std::size_t max_answers = std::numeric_limits<std::size_t>::max();
};

struct EngineOptions {
  SelectionStrategy strategy;
  Limits limits;
  bool build_tree = false;
  // Extraneous constants count as unbound in when-conditions.
  ConditionMode mode = ConditionMode::Host;
  bool occurs_check = false;
};

// Enumerates the outcomes of one goal lazily. Each call to next() returns
// the next answer; the last outcome is Exhausted, StepLimit or AnswerLimit
// and after it next() returns nullopt. The program must outlive the engine.
class Engine {
 public:
  Engine(const Program& program, const Goal& goal, EngineOptions options = {});
  ~Engine();
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  std::optional<Outcome> next();
  std::size_t steps() const;

 private:
  struct State;
  std::unique_ptr<State> state_;
};

// All outcomes including the terminal one.
std::vector<Outcome> solve(const Program& program, const Goal& goal, EngineOptions options = {});
std::vector<Outcome> solve_with_tree(const Program& program, const Goal& goal, EngineOptions options = {});

}  // namespace flounder
