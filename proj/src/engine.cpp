#include "flounder/engine.hpp"

#include <algorithm>
#include <unordered_map>

namespace flounder {

const char* to_string(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::Success: return "success";
    case OutcomeKind::Floundered: return "floundered";
    case OutcomeKind::Exhausted: return "exhausted";
    case OutcomeKind::StepLimit: return "step-limit";
    case OutcomeKind::AnswerLimit: return "answer-limit";
  }
  return "?";
}

Term Outcome::answer_term() const {
  if (goal_instance.empty()) return Term::constant("true");
  Term t = goal_instance.back().atom;
  for (std::size_t i = goal_instance.size() - 1; i-- > 0;) t = Term::compound(",", {goal_instance[i].atom, t});
  return t;
}

std::string Outcome::bindings_text() const {
  VarNames names;
  std::vector<const Binding*> shown;
  for (const Binding& b : bindings) {
    if (b.value.is_var() && b.value.name() == b.name) {
      names.set(b.value.var_id(), b.name);
      continue;
    }
    shown.push_back(&b);
  }
  std::vector<Term> free;
  for (const Binding* b : shown) collect_variables(b->value, free);
  std::size_t next = 0;
  for (const Term& v : free)
    if (!names.find(v.var_id())) names.set(v.var_id(), "_" + letter_name(next++));
  std::string out;
  for (const Binding* b : shown) {
    if (!out.empty()) out += ", ";
    out += b->name + " = " + format_term(b->value, names);
  }
  return out.empty() ? "true" : out;
}

namespace {

struct Frame {
  AnnotatedAtom goal;
  NodeId node = 0;
  Term acc_in;
  Term acc_out;
};

struct Cont;
using ContPtr = std::shared_ptr<const Cont>;

// Persistent goal list shared between choicepoints.
struct Cont {
  Frame frame;
  mutable ContPtr next;

  Cont(Frame f, ContPtr n) : frame(std::move(f)), next(std::move(n)) {}
  // Long continuations would otherwise be freed recursively.
  ~Cont() {
    ContPtr n = std::move(next);
    while (n && n.use_count() == 1) {
      ContPtr after = std::move(n->next);
      n = std::move(after);
    }
  }
};

enum class NodeState : std::uint8_t { Pending, Delayed, Called };

struct NodeRec {
  AnnotatedAtom goal;
  Term acc_in;
  Term acc_out;
  std::optional<NodeId> parent;
  std::vector<NodeId> children;
  std::optional<std::size_t> clause;
  NodeState state = NodeState::Pending;
  bool builtin = false;
};

struct Suspension {
  Frame frame;
  bool active = true;
};

struct Saved {
  BindingStore::Mark store;
  std::size_t suspensions = 0;
  std::size_t suspension_log = 0;
  std::size_t watch_log = 0;
  std::size_t nodes = 0;
  std::size_t node_log = 0;
  std::size_t active = 0;
  std::size_t extraneous = 0;
};

struct ChoicePoint {
  Frame frame;
  ContPtr rest;
  std::size_t alternative = 0;
  Saved saved;
};

bool is_builtin(const Term& atom) {
  if (atom.arity() != 1) return false;
  return atom.name() == "$extraneous" || atom.name() == "$has_extraneous";
}

}  // namespace

struct Engine::State {
  const Program& program;
  EngineOptions options;
  BindingStore store;
  ContPtr cont;

  std::vector<Suspension> suspensions;
  // Index of a woken suspension; added ones are undone by truncation.
  std::vector<std::size_t> wake_log;
  std::unordered_map<VarId, std::vector<std::size_t>> watchers;
  std::vector<VarId> watch_log;
  std::size_t active = 0;

  std::vector<NodeRec> nodes;
  std::vector<std::pair<NodeId, NodeState>> node_log;

  std::vector<ChoicePoint> choicepoints;
  std::size_t steps = 0;
  std::size_t answers = 0;
  std::size_t extraneous = 0;
  std::size_t gensym = 0;
  std::mt19937_64 rng;

  std::vector<GoalVariable> goal_vars;
  std::vector<NodeId> roots;
  Term root_in;
  Term root_out;

  bool finished = false;
  bool need_backtrack = false;

  State(const Program& p, const Goal& goal, EngineOptions o) : program(p), options(o), rng(o.strategy.seed) {
    store.reserve_vars(goal.var_count);
    goal_vars = goal.variables;
    root_in = store.fresh_var();
    Term acc = root_in;
    std::vector<Frame> frames;
    for (const AnnotatedAtom& a : goal.atoms) {
      Term out = store.fresh_var();
      NodeId id = new_node(a, acc, out, std::nullopt);
      roots.push_back(id);
      frames.push_back({a, id, acc, out});
      acc = out;
    }
    root_out = acc;
    cont = prepend(frames, nullptr);
  }

  static ContPtr prepend(const std::vector<Frame>& frames, ContPtr rest) {
    for (auto it = frames.rbegin(); it != frames.rend(); ++it) rest = std::make_shared<const Cont>(*it, rest);
    return rest;
  }

  NodeId new_node(const AnnotatedAtom& goal, Term in, Term out, std::optional<NodeId> parent) {
    NodeRec r;
    r.goal = goal;
    r.acc_in = std::move(in);
    r.acc_out = std::move(out);
    r.parent = parent;
    nodes.push_back(std::move(r));
    return nodes.size() - 1;
  }

  void set_state(NodeId id, NodeState s) {
    node_log.emplace_back(id, nodes[id].state);
    nodes[id].state = s;
  }

  Saved save() const {
    return {store.mark(),    suspensions.size(), wake_log.size(), watch_log.size(),
            nodes.size(),    node_log.size(),    active,          extraneous};
  }

  void restore(const Saved& s) {
    while (node_log.size() > s.node_log) {
      auto [id, prev] = node_log.back();
      node_log.pop_back();
      if (id < s.nodes) {
        NodeRec& r = nodes[id];
        r.state = prev;
        if (prev != NodeState::Called) {
          r.children.clear();
          r.clause.reset();
          r.builtin = false;
        }
      }
    }
    nodes.resize(s.nodes);
    while (watch_log.size() > s.watch_log) {
      auto it = watchers.find(watch_log.back());
      it->second.pop_back();
      if (it->second.empty()) watchers.erase(it);
      watch_log.pop_back();
    }
    while (wake_log.size() > s.suspension_log) {
      suspensions[wake_log.back()].active = true;
      wake_log.pop_back();
    }
    suspensions.resize(s.suspensions);
    active = s.active;
    extraneous = s.extraneous;
    store.undo(s.store);
  }

  // Unbound variables a condition is waiting on.
  void condition_vars(const WhenCondition& c, std::vector<VarId>& out) const {
    switch (c.kind()) {
      case WhenCondition::Kind::Nonvar: {
        Term d = store.deref(c.arg());
        if (d.is_var()) out.push_back(d.var_id());
        return;
      }
      case WhenCondition::Kind::Ground: {
        std::vector<Term> vs;
        collect_variables(store.resolve(c.arg()), vs);
        for (const Term& v : vs) out.push_back(v.var_id());
        return;
      }
      case WhenCondition::Kind::And:
      case WhenCondition::Kind::Or:
        condition_vars(c.left(), out);
        condition_vars(c.right(), out);
        return;
    }
  }

  void watch(std::size_t index) {
    std::vector<VarId> vs;
    condition_vars(*suspensions[index].frame.goal.condition, vs);
    for (VarId v : vs) {
      auto& list = watchers[v];
      if (std::find(list.begin(), list.end(), index) != list.end()) continue;
      list.push_back(index);
      watch_log.push_back(v);
    }
  }

  void suspend(const Frame& f) {
    set_state(f.node, NodeState::Delayed);
    suspensions.push_back({f, true});
    ++active;
    watch(suspensions.size() - 1);
  }

  // Suspensions whose condition became true through bindings trailed since
  // `trail_mark`, oldest first.
  std::vector<Frame> wake(std::size_t trail_mark) {
    std::vector<std::size_t> candidates;
    for (std::size_t i = trail_mark; i < store.trail_size(); ++i) {
      auto it = watchers.find(store.trailed(i));
      if (it == watchers.end()) continue;
      candidates.insert(candidates.end(), it->second.begin(), it->second.end());
    }
    std::vector<Frame> woken;
    if (candidates.empty()) return woken;
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    for (std::size_t index : candidates) {
      Suspension& s = suspensions[index];
      if (!s.active) continue;
      if (condition_holds(*s.frame.goal.condition, store, options.mode)) {
        s.active = false;
        wake_log.push_back(index);
        --active;
        woken.push_back(s.frame);
      } else {
        watch(index);
      }
    }
    return woken;
  }

  void proceed(std::size_t trail_mark, const std::vector<Frame>& body, const ContPtr& rest) {
    std::vector<Frame> woken = wake(trail_mark);
    woken.insert(woken.end(), body.begin(), body.end());
    cont = prepend(woken, rest);
  }

  std::string gensym_constant() { return "$g" + std::to_string(++gensym); }

  bool call_builtin(const Frame& f, const Term& atom, const ContPtr& rest, std::size_t alternative) {
    Saved saved = save();
    std::size_t trail_mark = store.trail_size();
    if (atom.name() == "$extraneous") {
      if (alternative > 0) return false;
      Term x = store.deref(atom.arg(0));
      if (x.is_var()) {
        store.bind(x.var_id(), Term::constant(gensym_constant()));
      } else if (!x.is_extraneous()) {
        return false;
      }
    } else {
      Term x = store.resolve(atom.arg(0));
      if (contains_extraneous(x)) {
        if (alternative > 0) return false;
      } else {
        std::vector<Term> vs = variables_of(x);
        if (alternative >= vs.size()) return false;
        if (alternative + 1 < vs.size()) choicepoints.push_back({f, rest, alternative + 1, saved});
        store.bind(vs[alternative].var_id(), Term::constant(gensym_constant()));
      }
    }
    ++extraneous;
    set_state(f.node, NodeState::Called);
    nodes[f.node].builtin = true;
    unify(f.acc_in, f.acc_out, store);
    proceed(trail_mark, {}, rest);
    return true;
  }

  bool call(const Frame& f, const ContPtr& rest, std::size_t alternative) {
    const Term& atom = f.goal.atom;
    if (is_builtin(atom)) return call_builtin(f, atom, rest, alternative);
    const std::vector<std::size_t>* index = program.lookup(predicate_key(atom));
    if (!index) throw EngineError("unknown predicate " + predicate_key(atom));
    for (std::size_t i = alternative; i < index->size(); ++i) {
      Saved saved = save();
      std::size_t trail_mark = store.trail_size();
      const Clause& clause = program.clause((*index)[i]);
      VarId offset = store.var_count();
      store.reserve_vars(offset + clause.var_count);
      if (!unify(offset_vars(clause.head, offset), atom, store, options.occurs_check)) {
        restore(saved);
        continue;
      }
      if (i + 1 < index->size()) choicepoints.push_back({f, rest, i + 1, saved});

      set_state(f.node, NodeState::Called);
      nodes[f.node].clause = (*index)[i];
      std::vector<Frame> body;
      body.reserve(clause.body.size());
      Term acc = f.acc_in;
      for (std::size_t k = 0; k < clause.body.size(); ++k) {
        AnnotatedAtom b = clause.body[k].offset(offset);
        Term out = k + 1 == clause.body.size() ? f.acc_out : store.fresh_var();
        NodeId child = new_node(b, acc, out, f.node);
        nodes[f.node].children.push_back(child);
        body.push_back({std::move(b), child, acc, out});
        acc = out;
      }
      if (clause.body.empty()) unify(f.acc_in, f.acc_out, store);
      proceed(trail_mark, body, rest);
      return true;
    }
    return false;
  }

  // Runs the selected frame. False means the goal failed outright.
  bool dispatch(const Frame& f, const ContPtr& rest) {
    if (f.goal.condition && !condition_holds(*f.goal.condition, store, options.mode)) {
      suspend(f);
      cont = rest;
      return true;
    }
    return call(f, rest, 0);
  }

  bool backtrack() {
    while (!choicepoints.empty()) {
      ChoicePoint cp = std::move(choicepoints.back());
      choicepoints.pop_back();
      restore(cp.saved);
      if (call(cp.frame, cp.rest, cp.alternative)) return true;
    }
    return false;
  }

  Frame select() {
    if (options.strategy.kind == SelectionStrategy::Kind::Leftmost) {
      Frame f = cont->frame;
      cont = cont->next;
      return f;
    }
    std::size_t length = 0;
    for (const Cont* c = cont.get(); c; c = c->next.get()) ++length;
    std::size_t pick = std::uniform_int_distribution<std::size_t>(0, length - 1)(rng);
    std::vector<Frame> prefix;
    const Cont* c = cont.get();
    for (std::size_t i = 0; i < pick; ++i, c = c->next.get()) prefix.push_back(c->frame);
    Frame f = c->frame;
    cont = prepend(prefix, c->next);
    return f;
  }

  Outcome finish(OutcomeKind kind) {
    finished = true;
    Outcome o;
    o.kind = kind;
    o.steps = steps;
    cont.reset();
    choicepoints.clear();
    return o;
  }

  PartialProofTree snapshot() const {
    std::vector<ProofNode> out(nodes.size());
    for (NodeId i = 0; i < nodes.size(); ++i) {
      const NodeRec& r = nodes[i];
      ProofNode& n = out[i];
      n.id = i;
      n.parent = r.parent;
      n.annotated = r.goal.resolved(store);
      n.acc_in = store.resolve(r.acc_in);
      n.acc_out = store.resolve(r.acc_out);
      n.children = r.children;
      n.clause_index = r.clause;
      if (r.clause) n.location = program.clause(*r.clause).location;
      if (r.state == NodeState::Delayed) {
        n.kind = NodeKind::DelayedLeaf;
      } else if (r.builtin) {
        n.kind = NodeKind::Builtin;
      } else if (r.children.empty()) {
        n.kind = NodeKind::UnitLeaf;
      } else {
        n.kind = NodeKind::Internal;
      }
    }
    return PartialProofTree(std::move(out), roots);
  }

  Outcome answer() {
    Outcome o;
    o.kind = active == 0 ? OutcomeKind::Success : OutcomeKind::Floundered;
    o.steps = steps;
    o.extraneous_uses = extraneous;
    for (const GoalVariable& v : goal_vars) o.bindings.push_back({v.name, store.resolve(v.var)});
    for (NodeId r : roots) o.goal_instance.push_back(nodes[r].goal.resolved(store));
    for (const Suspension& s : suspensions)
      if (s.active) o.residue.push_back(s.frame.goal.resolved(store));
    bool closed = store.deref(root_in) == store.deref(root_out);
    o.accumulators_agree = closed == (active == 0);
    if (options.build_tree) o.tree = snapshot();
    return o;
  }

  std::optional<Outcome> next() {
    if (finished) return std::nullopt;
    if (need_backtrack) {
      if (answers >= options.limits.max_answers) return finish(OutcomeKind::AnswerLimit);
      need_backtrack = false;
      if (!backtrack()) return finish(OutcomeKind::Exhausted);
    }
    for (;;) {
      if (!cont) {
        need_backtrack = true;
        ++answers;
        return answer();
      }
      if (steps >= options.limits.max_steps) return finish(OutcomeKind::StepLimit);
      ++steps;
      Frame f = select();
      ContPtr rest = cont;
      if (!dispatch(f, rest) && !backtrack()) return finish(OutcomeKind::Exhausted);
    }
  }
};

Engine::Engine(const Program& program, const Goal& goal, EngineOptions options)
    : state_(std::make_unique<State>(program, goal, options)) {
  if (options.limits.max_answers == 0) state_->need_backtrack = true;
}

Engine::~Engine() = default;

std::optional<Outcome> Engine::next() { return state_->next(); }

std::size_t Engine::steps() const { return state_->steps; }

std::vector<Outcome> solve(const Program& program, const Goal& goal, EngineOptions options) {
  Engine engine(program, goal, options);
  std::vector<Outcome> out;
  while (auto o = engine.next()) out.push_back(std::move(*o));
  return out;
}

std::vector<Outcome> solve_with_tree(const Program& program, const Goal& goal, EngineOptions options) {
  options.build_tree = true;
  return solve(program, goal, options);
}

}  // namespace flounder
