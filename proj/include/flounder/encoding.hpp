// Reading when(C, G) as the disjunction "G, or C fails because some tested
// variable still is a variable", with variables encoded as extraneous `$`
// constants. A goal flounders iff its encoded form succeeds through an
// added disjunct; equivalence_check uses this as an independent oracle.

#pragma once

#include <string>
#include <vector>

#include "flounder/engine.hpp"
#include "flounder/reader.hpp"

namespace flounder {

struct EncodeOptions {
  // Keep when(C, G) in the G branch; run with ConditionMode::ExtraneousAsVar.
  // This preserves the coroutining schedule of the original program.
  bool guarded = false;
};

struct Encoded {
  Program program;
  Goal goal;
  // Some condition uses `,` or ground/1, so one floundered derivation may
  // map to several encoded derivations.
  bool multi_disjunct = false;
};

// Encodes every annotated body atom (and goal atom) as a call to a fresh
// `$or_<k>` predicate over the atom's variables.
Encoded encode(const Program& program, const Goal& goal, EncodeOptions options = {});
Program encode_program(const Program& program, EncodeOptions options = {});

// Extraneous constants turned back into distinct fresh variables.
Term decode_extraneous(const Term& t);

struct AnswerCheck {
  std::string answer;
  enum class Result : std::uint8_t { Confirmed, Refuted, Inconclusive } result = Result::Inconclusive;
};

struct EquivalenceReport {
  bool conclusive = true;
  std::string reason;  // why inconclusive
  bool set_comparison = false;
  std::vector<std::string> floundered;          // delay semantics, canonical text
  std::vector<std::string> successes;
  std::vector<std::string> encoded_floundered;  // encoded successes through an added disjunct
  std::vector<std::string> encoded_successes;   // encoded successes without one
  std::vector<AnswerCheck> direct;              // per floundered answer, plain left-to-right run
  std::vector<std::string> disagreements;

  bool agree() const { return conclusive && disagreements.empty(); }
  std::string render() const;
};

EquivalenceReport equivalence_check(const Program& program, const Goal& goal, Limits limits = {});

}  // namespace flounder
