#include "flounder/encoding.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "flounder/intent.hpp"

namespace flounder {

namespace {

using Conjunction = std::vector<Term>;

// Negation of a condition in disjunctive normal form over the two test
// builtins. nonvar(X) fails iff X is (encoded as) a variable; ground(X)
// fails iff X contains one.
std::vector<Conjunction> negate(const WhenCondition& c, bool& multi) {
  switch (c.kind()) {
    case WhenCondition::Kind::Nonvar: return {{Term::compound("$extraneous", {c.arg()})}};
    case WhenCondition::Kind::Ground:
      multi = true;
      return {{Term::compound("$has_extraneous", {c.arg()})}};
    case WhenCondition::Kind::Or: {
      std::vector<Conjunction> out;
      for (const Conjunction& l : negate(c.left(), multi))
        for (const Conjunction& r : negate(c.right(), multi)) {
          Conjunction both = l;
          both.insert(both.end(), r.begin(), r.end());
          out.push_back(std::move(both));
        }
      return out;
    }
    case WhenCondition::Kind::And: {
      multi = true;
      std::vector<Conjunction> out = negate(c.left(), multi);
      for (Conjunction& r : negate(c.right(), multi)) out.push_back(std::move(r));
      return out;
    }
  }
  return {};
}

class Encoder {
 public:
  Encoder(EncodeOptions options) : options_(options) {}

  // Replaces annotated atoms by aux calls, queueing the aux clauses.
  std::vector<AnnotatedAtom> body(const std::vector<AnnotatedAtom>& atoms, VarId var_count,
                                  const SourceLocation& where) {
    std::vector<AnnotatedAtom> out;
    for (const AnnotatedAtom& a : atoms) {
      if (!a.condition) {
        out.push_back(a);
        continue;
      }
      std::string name = "$or_" + std::to_string(++counter_);
      Term head = Term::compound(name, variables_of(a.as_term()));
      Clause g;
      g.head = head;
      g.body.push_back({a.atom, options_.guarded ? a.condition : std::nullopt});
      g.location = where;
      g.var_count = var_count;
      aux_.push_back(std::move(g));
      for (Conjunction& disjunct : negate(*a.condition, multi_)) {
        Clause d;
        d.head = head;
        for (Term& lit : disjunct) d.body.push_back({std::move(lit), std::nullopt});
        d.location = where;
        d.var_count = var_count;
        aux_.push_back(std::move(d));
      }
      out.push_back({head, std::nullopt});
    }
    return out;
  }

  std::vector<Clause>& aux() { return aux_; }
  bool multi() const { return multi_; }

 private:
  EncodeOptions options_;
  std::vector<Clause> aux_;
  std::size_t counter_ = 0;
  bool multi_ = false;
};

}  // namespace

Encoded encode(const Program& program, const Goal& goal, EncodeOptions options) {
  Encoder enc(options);
  Encoded out;
  for (const Clause& c : program.clauses()) {
    Clause e = c;
    e.body = enc.body(c.body, c.var_count, c.location);
    out.program.add(std::move(e));
  }
  out.goal = goal;
  out.goal.atoms = enc.body(goal.atoms, goal.var_count, SourceLocation{"<goal>", 0, 0});
  for (Clause& a : enc.aux()) out.program.add(std::move(a));
  out.multi_disjunct = enc.multi();
  return out;
}

Program encode_program(const Program& program, EncodeOptions options) {
  return encode(program, Goal{}, options).program;
}

Term decode_extraneous(const Term& t) {
  VarId next = 0;
  for (const Term& v : variables_of(t)) next = std::max(next, v.var_id() + 1);
  std::map<std::string, Term> vars;
  std::function<Term(const Term&)> walk = [&](const Term& x) -> Term {
    if (x.is_extraneous()) {
      auto it = vars.find(x.name());
      if (it == vars.end()) it = vars.emplace(x.name(), Term::var(next++)).first;
      return it->second;
    }
    if (!x.is_compound()) return x;
    std::vector<Term> args;
    for (const Term& a : x.args()) args.push_back(walk(a));
    return Term::compound(x.name(), std::move(args));
  };
  return walk(t);
}

std::string EquivalenceReport::render() const {
  std::string out;
  auto list = [&](const char* title, const std::vector<std::string>& items) {
    out += std::string(title) + ": " + std::to_string(items.size()) + "\n";
    for (const std::string& s : items) out += "  " + s + "\n";
  };
  list("floundered answers", floundered);
  list("encoded successes through an added disjunct", encoded_floundered);
  list("successful answers", successes);
  list("encoded successes without one", encoded_successes);
  if (!direct.empty()) {
    out += "direct checks of floundered answers:\n";
    for (const AnswerCheck& c : direct) {
      const char* r = c.result == AnswerCheck::Result::Confirmed  ? "confirmed"
                      : c.result == AnswerCheck::Result::Refuted ? "REFUTED"
                                                                 : "inconclusive (step limit)";
      out += "  " + c.answer + ": " + r + "\n";
    }
  }
  if (set_comparison) out += "compared as sets (a condition has several negated disjuncts)\n";
  if (!conclusive) {
    out += "inconclusive: " + reason + "\n";
  } else if (disagreements.empty()) {
    out += "agreement\n";
  } else {
    for (const std::string& d : disagreements) out += "disagreement: " + d + "\n";
  }
  return out;
}

namespace {

void compare(std::vector<std::string> expected, std::vector<std::string> actual, bool as_sets,
             const std::string& expected_what, const std::string& actual_what, std::vector<std::string>& out) {
  std::sort(expected.begin(), expected.end());
  std::sort(actual.begin(), actual.end());
  if (as_sets) {
    expected.erase(std::unique(expected.begin(), expected.end()), expected.end());
    actual.erase(std::unique(actual.begin(), actual.end()), actual.end());
  }
  std::vector<std::string> missing, extra;
  std::set_difference(expected.begin(), expected.end(), actual.begin(), actual.end(), std::back_inserter(missing));
  std::set_difference(actual.begin(), actual.end(), expected.begin(), expected.end(), std::back_inserter(extra));
  for (const std::string& m : missing) out.push_back(expected_what + " " + m + " has no " + actual_what);
  for (const std::string& e : extra) out.push_back(actual_what + " " + e + " has no matching " + expected_what);
}

Goal instantiated_goal(const Outcome& o) {
  std::vector<Term> parts;
  for (const AnnotatedAtom& a : o.goal_instance) parts.push_back(a.as_term());
  Term all = encode_variables(Term::compound("$goal", parts));
  Goal g;
  for (const Term& p : all.args()) {
    if (p.is_compound() && p.name() == "when" && p.arity() == 2)
      g.atoms.push_back({p.arg(1), WhenCondition::from_term(p.arg(0))});
    else
      g.atoms.push_back({p, std::nullopt});
  }
  return g;
}

}  // namespace

EquivalenceReport equivalence_check(const Program& program, const Goal& goal, Limits limits) {
  EquivalenceReport report;
  EngineOptions plain;
  plain.limits = limits;
  std::vector<Outcome> floundered_outcomes;
  for (Outcome& o : solve(program, goal, plain)) {
    if (o.kind == OutcomeKind::Success) report.successes.push_back(format_atom(o.answer_term()));
    if (o.kind == OutcomeKind::Floundered) {
      report.floundered.push_back(format_atom(o.answer_term()));
      floundered_outcomes.push_back(std::move(o));
    }
    if (o.kind == OutcomeKind::StepLimit || o.kind == OutcomeKind::AnswerLimit) {
      report.conclusive = false;
      report.reason = std::string("delay semantics stopped at ") + to_string(o.kind);
    }
  }

  Encoded twin = encode(program, goal, {true});
  report.set_comparison = twin.multi_disjunct;
  EngineOptions guarded;
  guarded.limits = limits;
  guarded.mode = ConditionMode::ExtraneousAsVar;
  for (const Outcome& o : solve(twin.program, twin.goal, guarded)) {
    if (o.kind == OutcomeKind::Success) {
      std::string text = format_atom(decode_extraneous(o.answer_term()));
      (o.extraneous_uses > 0 ? report.encoded_floundered : report.encoded_successes).push_back(text);
    }
    if ((o.kind == OutcomeKind::StepLimit || o.kind == OutcomeKind::AnswerLimit) && report.conclusive) {
      report.conclusive = false;
      report.reason = std::string("encoded program stopped at ") + to_string(o.kind);
    }
  }

  if (report.conclusive) {
    compare(report.floundered, report.encoded_floundered, report.set_comparison, "floundered answer",
            "encoded success through an added disjunct", report.disagreements);
    compare(report.successes, report.encoded_successes, report.set_comparison, "successful answer",
            "encoded success without an added disjunct", report.disagreements);
  }

  for (const Outcome& o : floundered_outcomes) {
    Encoded direct = encode(program, instantiated_goal(o), {false});
    AnswerCheck check;
    check.answer = format_atom(o.answer_term());
    EngineOptions eo;
    eo.limits.max_steps = limits.max_steps;
    Engine engine(direct.program, direct.goal, eo);
    while (auto r = engine.next()) {
      if (r->kind == OutcomeKind::Success) {
        check.result = AnswerCheck::Result::Confirmed;
        break;
      }
      if (r->kind == OutcomeKind::Exhausted) check.result = AnswerCheck::Result::Refuted;
    }
    if (check.result == AnswerCheck::Result::Refuted)
      report.disagreements.push_back("encoded instance of floundered answer " + check.answer + " fails");
    report.direct.push_back(std::move(check));
  }
  return report;
}

}  // namespace flounder
