// Helpers shared by the unit and property tests.

#pragma once

#include <random>
#include <string>
#include <vector>

#include "flounder/corpus.hpp"
#include "flounder/engine.hpp"
#include "flounder/reader.hpp"
#include "flounder/term.hpp"

namespace flounder::testing {

inline Program corpus_program(const std::string& name) { return load_program(corpus_file(name)); }

inline std::vector<std::string> answer_atoms(const std::vector<Outcome>& os, OutcomeKind kind) {
  std::vector<std::string> out;
  for (const Outcome& o : os)
    if (o.kind == kind) out.push_back(format_atom(o.answer_term()));
  return out;
}

// Terms over a, b, f/1, g/2, lists and the variables 0..vars-1.
inline Term random_term(std::mt19937_64& rng, int depth, VarId vars) {
  int choices = depth > 0 ? 7 : 4;
  switch (std::uniform_int_distribution<int>(0, choices - 1)(rng)) {
    case 0: return Term::var(std::uniform_int_distribution<VarId>(0, vars - 1)(rng));
    case 1: return Term::constant(std::bernoulli_distribution(0.5)(rng) ? "a" : "b");
    case 2: return Term::integer(std::uniform_int_distribution<int>(1, 3)(rng));
    case 3: return Term::nil();
    case 4: return Term::compound("f", {random_term(rng, depth - 1, vars)});
    case 5: return Term::compound("g", {random_term(rng, depth - 1, vars), random_term(rng, depth - 1, vars)});
    default: return Term::cons(random_term(rng, depth - 1, vars), random_term(rng, depth - 1, vars));
  }
}

}  // namespace flounder::testing
