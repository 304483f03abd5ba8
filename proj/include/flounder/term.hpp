// Logic terms, binding store with trail, unification and the when-condition
// language used by delayed calls.

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace flounder {

using VarId = std::uint32_t;

enum class TermKind : std::uint8_t { None, Var, Constant, Integer, Compound };

// Immutable logic term. Variables and integers are stored inline; constants
// and compounds share an immutable node, so copies are cheap and ground
// subterms are shared freely between clause templates and renamed instances.
class Term {
 public:
  Term() = default;

  static Term var(VarId id, std::string_view display_name = {});
  static Term constant(std::string_view name);
  static Term integer(std::int64_t value);
  static Term compound(std::string_view functor, std::vector<Term> args);
  static Term nil();
  static Term cons(Term head, Term tail);
  static Term list(std::vector<Term> items, Term tail = nil());

  TermKind kind() const { return kind_; }
  bool is_null() const { return kind_ == TermKind::None; }
  bool is_var() const { return kind_ == TermKind::Var; }
  bool is_constant() const { return kind_ == TermKind::Constant; }
  bool is_integer() const { return kind_ == TermKind::Integer; }
  bool is_compound() const { return kind_ == TermKind::Compound; }
  bool is_callable() const { return is_constant() || is_compound(); }
  bool is_nil() const;
  bool is_cons() const;
  // Constants with the reserved `$` prefix encode variables.
  bool is_extraneous() const;

  VarId var_id() const { return var_; }
  std::int64_t int_value() const { return int_; }
  // Functor of a compound, name of a constant, display name of a variable
  // (empty when the variable has none).
  const std::string& name() const;
  std::span<const Term> args() const;
  std::size_t arity() const;
  const Term& arg(std::size_t i) const { return args()[i]; }
  // No variables occur syntactically (bindings are not consulted).
  bool ground() const;

  // Structural identity; variables compare by id.
  friend bool operator==(const Term& a, const Term& b);

  struct Node;

 private:
  TermKind kind_ = TermKind::None;
  VarId var_ = 0;
  std::int64_t int_ = 0;
  std::shared_ptr<const Node> node_;
};

// Variable bindings plus the trail needed to undo them on backtracking.
// Variable ids index the binding vector; undoing to a mark releases the
// variables created after it, so ids are unique among live variables.
class BindingStore {
 public:
  struct Mark {
    std::size_t trail = 0;
    VarId next_var = 0;
  };

  Term fresh_var(std::string_view display_name = {});
  // Makes sure ids below `count` exist (for terms built outside the store).
  void reserve_vars(VarId count);
  VarId var_count() const { return static_cast<VarId>(bindings_.size()); }

  bool is_bound(VarId id) const { return id < bindings_.size() && !bindings_[id].is_null(); }
  void bind(VarId id, const Term& value);
  Term deref(Term t) const;
  // Deep copy with every bound variable replaced by its value.
  Term resolve(const Term& t) const;

  Mark mark() const { return {trail_.size(), var_count()}; }
  void undo(const Mark& m);
  std::size_t trail_size() const { return trail_.size(); }
  // Variable bound by the i-th trail entry.
  VarId trailed(std::size_t i) const { return trail_[i]; }

 private:
  std::vector<Term> bindings_;
  std::vector<VarId> trail_;
};

// Unifies under `store`. On failure every binding made by this call has
// already been undone.
bool unify(const Term& a, const Term& b, BindingStore& store, bool occurs_check = false);

// One-way matching: true iff some substitution of `general`'s variables
// yields `specific`. Variables of `specific` are treated as constants.
bool is_instance(const Term& general, const Term& specific);
// Equal up to consistent variable renaming.
bool is_variant(const Term& a, const Term& b);

// Distinct variables of `t` in first-occurrence (depth-first, left-to-right) order.
std::vector<Term> variables_of(const Term& t);
void collect_variables(const Term& t, std::vector<Term>& out);
bool occurs_in(VarId id, const Term& t);
bool contains_extraneous(const Term& t);

// Applies a variable -> term substitution (unmapped variables are kept).
Term substitute(const Term& t, const std::unordered_map<VarId, Term>& subst);
// Adds `offset` to every variable id; used to rename clause templates apart.
Term offset_vars(const Term& t, VarId offset);

// The condition language of when/2: nonvar/1, ground/1, `,` and `;`.
// Stored as the condition term itself so renaming and printing are plain
// term operations.
class WhenCondition {
 public:
  enum class Kind : std::uint8_t { Nonvar, Ground, And, Or };

  static WhenCondition nonvar(Term arg);
  static WhenCondition ground(Term arg);
  static WhenCondition conj(const WhenCondition& left, const WhenCondition& right);
  static WhenCondition disj(const WhenCondition& left, const WhenCondition& right);
  // Returns nullopt when `t` is not in the condition language.
  static std::optional<WhenCondition> from_term(const Term& t);

  Kind kind() const;
  // Tested term (Nonvar/Ground only).
  const Term& arg() const { return term_.arg(0); }
  WhenCondition left() const { return WhenCondition(term_.arg(0)); }
  WhenCondition right() const { return WhenCondition(term_.arg(1)); }
  const Term& term() const { return term_; }

  WhenCondition resolved(const BindingStore& store) const { return WhenCondition(store.resolve(term_)); }
  WhenCondition offset(VarId by) const { return WhenCondition(offset_vars(term_, by)); }

  friend bool operator==(const WhenCondition& a, const WhenCondition& b) { return a.term_ == b.term_; }

 private:
  explicit WhenCondition(Term t) : term_(std::move(t)) {}
  Term term_;
};

// How instantiation tests treat extraneous constants. Under the encoded
// reading a `$` constant stands for a variable, so nonvar/ground fail on it.
enum class ConditionMode : std::uint8_t { Host, ExtraneousAsVar };

bool condition_holds(const WhenCondition& c, const BindingStore& store,
                     ConditionMode mode = ConditionMode::Host);

// An atomic goal, optionally wrapped as when(Condition, Atom).
struct AnnotatedAtom {
  Term atom;
  std::optional<WhenCondition> condition;

  bool delayed_form() const { return condition.has_value(); }
  // when(C, A) for annotated atoms, the atom itself otherwise.
  Term as_term() const;
  AnnotatedAtom resolved(const BindingStore& store) const;
  AnnotatedAtom offset(VarId by) const;

  friend bool operator==(const AnnotatedAtom& a, const AnnotatedAtom& b) = default;
};

bool callable_atom(const AnnotatedAtom& a, const BindingStore& store,
                   ConditionMode mode = ConditionMode::Host);

// "name/arity" key used to index predicates.
std::string predicate_key(const Term& atom);

}  // namespace flounder
