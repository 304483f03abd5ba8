#include "flounder/term.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>
#include <unordered_set>
#include <utility>

namespace flounder {

struct Term::Node {
  std::string name;
  std::vector<Term> args;
  bool ground = true;

  // Long lists would otherwise be freed recursively.
  ~Node() {
    std::vector<std::shared_ptr<const Node>> pending;
    auto take = [&](std::vector<Term>& as) {
      for (Term& a : as)
        if (a.node_ && a.node_.use_count() == 1 && !a.node_->args.empty()) pending.push_back(std::move(a.node_));
    };
    take(args);
    while (!pending.empty()) {
      std::shared_ptr<const Node> n = std::move(pending.back());
      pending.pop_back();
      if (n.use_count() == 1) take(const_cast<Node&>(*n).args);
    }
  }
};

namespace {

const std::string kEmpty;

const std::shared_ptr<const Term::Node>& shared_nil_node();

}  // namespace

Term Term::var(VarId id, std::string_view display_name) {
  Term t;
  t.kind_ = TermKind::Var;
  t.var_ = id;
  if (!display_name.empty()) {
    auto n = std::make_shared<Node>();
    n->name = std::string(display_name);
    n->ground = false;
    t.node_ = std::move(n);
  }
  return t;
}

Term Term::constant(std::string_view name) {
  Term t;
  t.kind_ = TermKind::Constant;
  if (name == "[]") {
    t.node_ = shared_nil_node();
  } else {
    auto n = std::make_shared<Node>();
    n->name = std::string(name);
    t.node_ = std::move(n);
  }
  return t;
}

Term Term::integer(std::int64_t value) {
  Term t;
  t.kind_ = TermKind::Integer;
  t.int_ = value;
  return t;
}

Term Term::compound(std::string_view functor, std::vector<Term> args) {
  if (args.empty()) return constant(functor);
  auto n = std::make_shared<Node>();
  n->name = std::string(functor);
  n->ground = std::all_of(args.begin(), args.end(), [](const Term& a) { return a.ground(); });
  n->args = std::move(args);
  Term t;
  t.kind_ = TermKind::Compound;
  t.node_ = std::move(n);
  return t;
}

Term Term::nil() { return constant("[]"); }

Term Term::cons(Term head, Term tail) { return compound(".", {std::move(head), std::move(tail)}); }

Term Term::list(std::vector<Term> items, Term tail) {
  Term out = std::move(tail);
  for (auto it = items.rbegin(); it != items.rend(); ++it) out = cons(std::move(*it), std::move(out));
  return out;
}

bool Term::is_nil() const { return kind_ == TermKind::Constant && node_->name == "[]"; }

bool Term::is_cons() const { return kind_ == TermKind::Compound && node_->args.size() == 2 && node_->name == "."; }

bool Term::is_extraneous() const {
  return kind_ == TermKind::Constant && !node_->name.empty() && node_->name[0] == '$';
}

const std::string& Term::name() const { return node_ ? node_->name : kEmpty; }

std::span<const Term> Term::args() const {
  if (kind_ != TermKind::Compound) return {};
  return node_->args;
}

std::size_t Term::arity() const { return kind_ == TermKind::Compound ? node_->args.size() : 0; }

bool Term::ground() const {
  switch (kind_) {
    case TermKind::Var: return false;
    case TermKind::Compound: return node_->ground;
    default: return true;
  }
}

namespace {

bool same_shallow(const Term& a, const Term& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case TermKind::None: return true;
    case TermKind::Var: return a.var_id() == b.var_id();
    case TermKind::Integer: return a.int_value() == b.int_value();
    case TermKind::Constant: return a.name() == b.name();
    case TermKind::Compound: return a.arity() == b.arity() && a.name() == b.name();
  }
  return false;
}

}  // namespace

bool operator==(const Term& a, const Term& b) {
  std::vector<std::pair<const Term*, const Term*>> todo{{&a, &b}};
  while (!todo.empty()) {
    auto [x, y] = todo.back();
    todo.pop_back();
    if (x->kind_ == TermKind::Compound && x->node_ == y->node_) continue;
    if (!same_shallow(*x, *y)) return false;
    if (x->kind_ != TermKind::Compound) continue;
    for (std::size_t i = x->node_->args.size(); i-- > 0;) todo.emplace_back(&x->node_->args[i], &y->node_->args[i]);
  }
  return true;
}

namespace {

const std::shared_ptr<const Term::Node>& shared_nil_node() {
  static const std::shared_ptr<const Term::Node> nil = [] {
    auto n = std::make_shared<Term::Node>();
    n->name = "[]";
    return std::shared_ptr<const Term::Node>(std::move(n));
  }();
  return nil;
}

}  // namespace

// ---------------------------------------------------------------------------
// BindingStore

Term BindingStore::fresh_var(std::string_view display_name) {
  VarId id = var_count();
  bindings_.emplace_back();
  return Term::var(id, display_name);
}

void BindingStore::reserve_vars(VarId count) {
  if (bindings_.size() < count) bindings_.resize(count);
}

void BindingStore::bind(VarId id, const Term& value) {
  if (id >= bindings_.size()) bindings_.resize(id + 1);
  assert(bindings_[id].is_null());
  bindings_[id] = value;
  trail_.push_back(id);
}

Term BindingStore::deref(Term t) const {
  while (t.is_var() && t.var_id() < bindings_.size() && !bindings_[t.var_id()].is_null())
    t = bindings_[t.var_id()];
  return t;
}

namespace {

// Bottom-up copy of `root` with an explicit stack. `map_var` returns the
// replacement of a variable and whether the replacement is walked again.
template <class MapVar>
Term rebuild(const Term& root, MapVar map_var) {
  struct Frame {
    Term src;
    std::vector<Term> args;
  };
  std::vector<Frame> stack;
  // The finished value, or nullopt after pushing a frame for it.
  auto start = [&](Term x) -> std::optional<Term> {
    while (x.is_var()) {
      auto [y, again] = map_var(x);
      if (!again) return y;
      x = std::move(y);
    }
    if (!x.is_compound() || x.ground()) return x;
    stack.push_back({x, {}});
    stack.back().args.reserve(x.arity());
    return std::nullopt;
  };
  if (auto v = start(root)) return *v;
  for (;;) {
    Frame& f = stack.back();
    if (f.args.size() < f.src.arity()) {
      Term a = f.src.arg(f.args.size());
      if (auto v = start(std::move(a))) stack.back().args.push_back(std::move(*v));
      continue;
    }
    Term done = Term::compound(f.src.name(), std::move(f.args));
    stack.pop_back();
    if (stack.empty()) return done;
    stack.back().args.push_back(std::move(done));
  }
}

// Visits subterms in pre-order, left to right; `visit` returns false to stop.
template <class Visit>
bool walk(const Term& root, Visit visit) {
  std::vector<const Term*> todo{&root};
  while (!todo.empty()) {
    const Term* t = todo.back();
    todo.pop_back();
    if (!visit(*t)) return false;
    if (!t->is_compound()) continue;
    std::span<const Term> as = t->args();
    for (std::size_t i = as.size(); i-- > 0;) todo.push_back(&as[i]);
  }
  return true;
}

}  // namespace

Term BindingStore::resolve(const Term& t) const {
  return rebuild(t, [&](const Term& v) {
    Term d = deref(v);
    bool again = !d.is_var();
    return std::pair<Term, bool>(std::move(d), again);
  });
}

void BindingStore::undo(const Mark& m) {
  while (trail_.size() > m.trail) {
    bindings_[trail_.back()] = Term();
    trail_.pop_back();
  }
  if (bindings_.size() > m.next_var) bindings_.resize(m.next_var);
}

// ---------------------------------------------------------------------------
// Unification and matching

namespace {

bool occurs_deref(VarId id, const Term& t, const BindingStore& store) {
  std::vector<Term> todo{t};
  while (!todo.empty()) {
    Term d = store.deref(todo.back());
    todo.pop_back();
    if (d.is_var()) {
      if (d.var_id() == id) return true;
      continue;
    }
    if (!d.is_compound() || d.ground()) continue;
    for (const Term& a : d.args()) todo.push_back(a);
  }
  return false;
}

}  // namespace

bool unify(const Term& a, const Term& b, BindingStore& store, bool occurs_check) {
  BindingStore::Mark start = store.mark();
  std::vector<std::pair<Term, Term>> todo;
  todo.emplace_back(a, b);
  while (!todo.empty()) {
    auto [x0, y0] = std::move(todo.back());
    todo.pop_back();
    Term x = store.deref(x0);
    Term y = store.deref(y0);
    if (x.is_var() && y.is_var()) {
      if (x.var_id() == y.var_id()) continue;
      // Younger variable points at the older one.
      if (x.var_id() < y.var_id()) std::swap(x, y);
      store.bind(x.var_id(), y);
      continue;
    }
    if (x.is_var() || y.is_var()) {
      if (y.is_var()) std::swap(x, y);
      if (occurs_check && occurs_deref(x.var_id(), y, store)) {
        store.undo({start.trail, store.var_count()});
        return false;
      }
      store.bind(x.var_id(), y);
      continue;
    }
    bool ok = x.kind() == y.kind();
    if (ok) {
      switch (x.kind()) {
        case TermKind::Integer: ok = x.int_value() == y.int_value(); break;
        case TermKind::Constant: ok = x.name() == y.name(); break;
        case TermKind::Compound:
          ok = x.arity() == y.arity() && x.name() == y.name();
          if (ok)
            for (std::size_t i = x.arity(); i-- > 0;) todo.emplace_back(x.arg(i), y.arg(i));
          break;
        default: ok = false;
      }
    }
    if (!ok) {
      store.undo({start.trail, store.var_count()});
      return false;
    }
  }
  return true;
}

namespace {

bool match(const Term& general, const Term& specific, std::unordered_map<VarId, Term>& subst) {
  std::vector<std::pair<const Term*, const Term*>> todo{{&general, &specific}};
  while (!todo.empty()) {
    auto [g, s] = todo.back();
    todo.pop_back();
    if (g->is_var()) {
      auto [it, inserted] = subst.try_emplace(g->var_id(), *s);
      if (!inserted && !(it->second == *s)) return false;
      continue;
    }
    if (!same_shallow(*g, *s)) return false;
    for (std::size_t i = g->arity(); i-- > 0;) todo.emplace_back(&g->arg(i), &s->arg(i));
  }
  return true;
}

bool variant_walk(const Term& a0, const Term& b0, std::unordered_map<VarId, VarId>& ab,
                  std::unordered_map<VarId, VarId>& ba) {
  std::vector<std::pair<const Term*, const Term*>> todo{{&a0, &b0}};
  while (!todo.empty()) {
    auto [a, b] = todo.back();
    todo.pop_back();
    if (a->is_var() || b->is_var()) {
      if (!a->is_var() || !b->is_var()) return false;
      auto [i1, n1] = ab.try_emplace(a->var_id(), b->var_id());
      auto [i2, n2] = ba.try_emplace(b->var_id(), a->var_id());
      if (i1->second != b->var_id() || i2->second != a->var_id()) return false;
      continue;
    }
    if (!same_shallow(*a, *b)) return false;
    for (std::size_t i = a->arity(); i-- > 0;) todo.emplace_back(&a->arg(i), &b->arg(i));
  }
  return true;
}

}  // namespace

bool is_instance(const Term& general, const Term& specific) {
  std::unordered_map<VarId, Term> subst;
  return match(general, specific, subst);
}

bool is_variant(const Term& a, const Term& b) {
  std::unordered_map<VarId, VarId> ab, ba;
  return variant_walk(a, b, ab, ba);
}

void collect_variables(const Term& t, std::vector<Term>& out) {
  std::unordered_set<VarId> seen;
  for (const Term& v : out) seen.insert(v.var_id());
  walk(t, [&](const Term& x) {
    if (x.is_var() && seen.insert(x.var_id()).second) out.push_back(x);
    return true;
  });
}

std::vector<Term> variables_of(const Term& t) {
  std::vector<Term> out;
  collect_variables(t, out);
  return out;
}

bool occurs_in(VarId id, const Term& t) {
  return !walk(t, [&](const Term& x) { return !(x.is_var() && x.var_id() == id); });
}

bool contains_extraneous(const Term& t) {
  return !walk(t, [](const Term& x) { return !x.is_extraneous(); });
}

Term substitute(const Term& t, const std::unordered_map<VarId, Term>& subst) {
  return rebuild(t, [&](const Term& v) {
    auto it = subst.find(v.var_id());
    return std::pair<Term, bool>(it == subst.end() ? v : it->second, false);
  });
}

Term offset_vars(const Term& t, VarId offset) {
  return rebuild(t, [&](const Term& v) { return std::pair<Term, bool>(Term::var(v.var_id() + offset, v.name()), false); });
}

// ---------------------------------------------------------------------------
// When conditions

WhenCondition WhenCondition::nonvar(Term arg) { return WhenCondition(Term::compound("nonvar", {std::move(arg)})); }

WhenCondition WhenCondition::ground(Term arg) { return WhenCondition(Term::compound("ground", {std::move(arg)})); }

WhenCondition WhenCondition::conj(const WhenCondition& l, const WhenCondition& r) {
  return WhenCondition(Term::compound(",", {l.term_, r.term_}));
}

WhenCondition WhenCondition::disj(const WhenCondition& l, const WhenCondition& r) {
  return WhenCondition(Term::compound(";", {l.term_, r.term_}));
}

std::optional<WhenCondition> WhenCondition::from_term(const Term& t) {
  if (!t.is_compound()) return std::nullopt;
  if (t.arity() == 1 && (t.name() == "nonvar" || t.name() == "ground")) return WhenCondition(t);
  if (t.arity() == 2 && (t.name() == "," || t.name() == ";")) {
    if (!from_term(t.arg(0)) || !from_term(t.arg(1))) return std::nullopt;
    return WhenCondition(t);
  }
  return std::nullopt;
}

WhenCondition::Kind WhenCondition::kind() const {
  const std::string& n = term_.name();
  if (n == "nonvar") return Kind::Nonvar;
  if (n == "ground") return Kind::Ground;
  if (n == ",") return Kind::And;
  return Kind::Or;
}

namespace {

bool ground_under(const Term& t, const BindingStore& store, ConditionMode mode) {
  std::vector<Term> todo{t};
  while (!todo.empty()) {
    Term d = store.deref(todo.back());
    todo.pop_back();
    if (d.is_var()) return false;
    if (mode == ConditionMode::ExtraneousAsVar && d.is_extraneous()) return false;
    if (!d.is_compound()) continue;
    if (d.ground() && mode == ConditionMode::Host) continue;
    for (const Term& a : d.args()) todo.push_back(a);
  }
  return true;
}

}  // namespace

bool condition_holds(const WhenCondition& c, const BindingStore& store, ConditionMode mode) {
  switch (c.kind()) {
    case WhenCondition::Kind::Nonvar: {
      Term d = store.deref(c.arg());
      if (d.is_var()) return false;
      return !(mode == ConditionMode::ExtraneousAsVar && d.is_extraneous());
    }
    case WhenCondition::Kind::Ground: return ground_under(c.arg(), store, mode);
    case WhenCondition::Kind::And:
      return condition_holds(c.left(), store, mode) && condition_holds(c.right(), store, mode);
    case WhenCondition::Kind::Or:
      return condition_holds(c.left(), store, mode) || condition_holds(c.right(), store, mode);
  }
  return false;
}

Term AnnotatedAtom::as_term() const {
  if (!condition) return atom;
  return Term::compound("when", {condition->term(), atom});
}

AnnotatedAtom AnnotatedAtom::resolved(const BindingStore& store) const {
  AnnotatedAtom out{store.resolve(atom), std::nullopt};
  if (condition) out.condition = condition->resolved(store);
  return out;
}

AnnotatedAtom AnnotatedAtom::offset(VarId by) const {
  AnnotatedAtom out{offset_vars(atom, by), std::nullopt};
  if (condition) out.condition = condition->offset(by);
  return out;
}

bool callable_atom(const AnnotatedAtom& a, const BindingStore& store, ConditionMode mode) {
  return !a.condition || condition_holds(*a.condition, store, mode);
}

std::string predicate_key(const Term& atom) {
  return atom.name() + "/" + std::to_string(atom.arity());
}

}  // namespace flounder
