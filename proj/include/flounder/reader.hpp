// Reader and printer for the pure Prolog subset with when/2 delays.

#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "flounder/term.hpp"

namespace flounder {

struct SourceLocation {
  std::string file;
  int line = 0;
  int column = 0;

  std::string str() const { return file + ":" + std::to_string(line); }
};

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(const std::string& message, SourceLocation where);
  const SourceLocation& where() const { return where_; }
  const std::string& detail() const { return detail_; }

 private:
  SourceLocation where_;
  std::string detail_;
};

// A program clause. Variables are numbered 0..var_count-1 locally; the
// engine renames them apart on every use.
struct Clause {
  Term head;
  std::vector<AnnotatedAtom> body;
  SourceLocation location;
  VarId var_count = 0;

  bool is_unit() const { return body.empty(); }
};

class Program {
 public:
  void add(Clause clause);

  const std::vector<Clause>& clauses() const { return clauses_; }
  const Clause& clause(std::size_t index) const { return clauses_[index]; }
  // Clause indices for a predicate, in source order. Null if undefined.
  const std::vector<std::size_t>* lookup(const std::string& key) const;
  bool defines(const std::string& key) const { return lookup(key) != nullptr; }
  // Predicate keys in order of first definition.
  const std::vector<std::string>& predicates() const { return order_; }

 private:
  std::vector<Clause> clauses_;
  std::unordered_map<std::string, std::vector<std::size_t>> index_;
  std::vector<std::string> order_;
};

struct ParseOptions {
  std::string file = "<input>";
  // Accept `$`-prefixed names (encoded programs only).
  bool allow_reserved = false;
};

struct GoalVariable {
  std::string name;
  Term var;
};

struct Goal {
  std::vector<AnnotatedAtom> atoms;
  // Named goal variables in order of first occurrence; ids 0..var_count-1.
  std::vector<GoalVariable> variables;
  VarId var_count = 0;
};

Program parse_program(std::string_view text, const ParseOptions& options = {});
Program load_program(const std::string& path, bool allow_reserved = false);
// A `?-`-style conjunction; the leading `?-` and trailing `.` are optional.
Goal parse_goal(std::string_view text, const ParseOptions& options = {});
// A single term, variables numbered from 0 by first occurrence.
Term parse_term(std::string_view text, const ParseOptions& options = {});

// Names for the variables of a printed unit.
class VarNames {
 public:
  // A, B, ..., Z, A1, ... assigned in first-occurrence order over `terms`.
  // With `anonymous_singletons`, variables occurring once print as `_`.
  static VarNames letters(const std::vector<Term>& terms, bool anonymous_singletons = false);
  // First-occurrence lettering over `order`, singleton detection over `scope`.
  static VarNames letters(const std::vector<Term>& order, const std::vector<Term>& scope,
                          bool anonymous_singletons);

  void set(VarId id, std::string name) { names_[id] = std::move(name); }
  // Null when the variable was never named.
  const std::string* find(VarId id) const;

 private:
  std::map<VarId, std::string> names_;
};

std::string letter_name(std::size_t index);

// Unnamed variables print as `_G<id>`.
std::string format_term(const Term& t, const VarNames& names);
std::string format_term(const Term& t);
std::string format_condition(const WhenCondition& c, const VarNames& names);
std::string format_annotated(const AnnotatedAtom& a, const VarNames& names);

// Canonical rendering used in transcripts: `[a, b|T]` lists, variables
// renamed A, B, C... by first occurrence.
std::string format_atom(const Term& atom);
// when(C, A) form renamed as a unit.
std::string format_annotated(const AnnotatedAtom& a);

// Clause instance block:
//   head :-
//           body1,
//           body2.
// Variables are lettered over the body atoms, then the head, then the
// conditions; variables occurring once in the instance print as `_`.
std::string format_clause_instance(const Term& head, const std::vector<AnnotatedAtom>& body);

// Source-style rendering of a clause or program (the reader's format).
std::string format_clause(const Clause& clause);
std::string format_program(const Program& program);

}  // namespace flounder
