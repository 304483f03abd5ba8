#include "flounder/corpus.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "flounder/intent.hpp"

#ifndef FLOUNDER_CORPUS_DIR
#define FLOUNDER_CORPUS_DIR "corpus"
#endif

namespace flounder {

std::string corpus_dir() {
  if (const char* env = std::getenv("FLOUNDER_CORPUS"); env && *env) return env;
  return FLOUNDER_CORPUS_DIR;
}

std::string corpus_file(const std::string& name) { return corpus_dir() + "/" + name; }

const std::vector<CorpusCase>& diagnosis_cases() {
  using K = OutcomeKind;
  static const std::vector<CorpusCase> cases = {
      {"bug1-backward", "perm_bug1.pl", "perm(A,[1,2,3])", "intent_default.txt", "answers_fig3.txt", "golden_fig3.txt", 1,
       {{K::Success, "perm([1, 2, 3], [1, 2, 3])"},
        {K::Floundered, "perm([1, 2, A, B|C], [1, 2, 3])"},
        {K::Floundered, "perm([1, A, B|C], [1, 2, 3])"},
        {K::Floundered, "perm([A, B|C], [1, 2, 3])"}},
       K::Exhausted, BugCategory::IncorrectDelayAnnotation},
      {"bug2-backward", "perm_bug2.pl", "perm(A,[1,2,3])", "intent_bug2.txt", "answers_fig4.txt", "golden_fig4.txt", 1,
       {{K::Success, "perm([1, 2, 3], [1, 2, 3])"},
        {K::Floundered, "perm([1, 2, A, B|C], [1, 2, 3])"},
        {K::Floundered, "perm([1, A, B|C], [1, 2, 3])"},
        {K::Floundered, "perm([A, B|C], [1, 2, 3])"}},
       K::Exhausted, BugCategory::IncorrectModesTypes},
      {"bug3-backward", "perm_bug3.pl", "perm(A,[1,2,3])", "intent_default.txt", "answers_fig6.txt", "golden_fig6.txt", 1,
       {}, K::Exhausted, BugCategory::IncorrectClause},
      {"bug3-forward", "perm_bug3.pl", "perm([1,2,3],A)", "intent_default.txt", "answers_fig7.txt", "golden_fig7.txt", 3,
       {}, K::Exhausted, BugCategory::IncorrectModesTypes},
  };
  return cases;
}

std::vector<CorpusPair> corpus_pairs() {
  std::vector<CorpusPair> out;
  for (const char* goal : {"perm(A,[1,2,3])", "perm([1,2,3],A)", "perm([A,1|B],[2,3])", "perm([],X)"})
    out.push_back({"perm.pl", goal});
  for (const char* goal : {"perm(A,[1,2,3])", "perm([A,1|B],[2,3])"}) out.push_back({"perm_bug1.pl", goal});
  for (const char* goal : {"perm(A,[1,2,3])", "perm([1,2,3],A)", "perm([A,1|B],[2,3])"})
    out.push_back({"perm_bug2.pl", goal});
  for (const char* goal : {"perm(A,[1,2,3])", "perm([1,2,3],A)", "perm([A,1|B],[2,3])"})
    out.push_back({"perm_bug3.pl", goal});
  return out;
}

std::vector<Term> corpus_atoms(std::size_t max_steps) {
  std::vector<Term> out;
  std::unordered_set<std::string> seen;
  for (const CorpusPair& pair : corpus_pairs()) {
    EngineOptions eo;
    eo.limits.max_steps = max_steps;
    for (const Outcome& o : solve_with_tree(load_program(corpus_file(pair.program)), parse_goal(pair.goal), eo)) {
      if (!o.tree) continue;
      for (const ProofNode& n : o.tree->nodes())
        if (seen.insert(format_atom(n.atom())).second) out.push_back(n.atom());
    }
  }
  return out;
}

std::string answer_text(const Outcome& o) { return format_atom(o.answer_term()); }

std::vector<ExpectedAnswer> answer_sequence(const std::vector<Outcome>& outcomes) {
  std::vector<ExpectedAnswer> out;
  for (const Outcome& o : outcomes)
    if (o.is_answer()) out.push_back({o.kind, answer_text(o)});
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> read_lines(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == ' ' || line.back() == '\r' || line.back() == '\t')) line.pop_back();
    out.push_back(line);
  }
  while (!out.empty() && out.back().empty()) out.pop_back();
  return out;
}

namespace {

constexpr std::size_t kCatalogueSteps = 200'000;

// Candidate edits may build cyclic terms; for the shipped programs the
// occurs check changes nothing.
EngineOptions catalogue_options(std::size_t max_answers = std::numeric_limits<std::size_t>::max()) {
  EngineOptions eo;
  eo.limits.max_steps = kCatalogueSteps;
  eo.limits.max_answers = max_answers;
  eo.occurs_check = true;
  return eo;
}

std::string describe(const std::vector<ExpectedAnswer>& answers, OutcomeKind end) {
  std::string out;
  for (const ExpectedAnswer& a : answers) out += std::string(to_string(a.kind)) + " " + a.atom + "; ";
  return out + to_string(end);
}

// One answer more than expected is enough to reject a candidate.
std::vector<Outcome> run(const Program& p, const std::string& goal, std::size_t max_answers) {
  return solve(p, parse_goal(goal), catalogue_options(max_answers));
}

bool same(const std::vector<ExpectedAnswer>& a, const std::vector<ExpectedAnswer>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].kind != b[i].kind || a[i].atom != b[i].atom) return false;
  return true;
}

CatalogueCheck exact_sequence(const Program& p, const CorpusCase& c) {
  CatalogueCheck check{c.goal + " answer sequence", false, {}};
  try {
    std::vector<Outcome> os = run(p, c.goal, c.expected.size() + 1);
    std::vector<ExpectedAnswer> got = answer_sequence(os);
    check.ok = same(got, c.expected) && os.back().kind == c.end;
    check.detail = describe(got, os.back().kind);
  } catch (const std::exception& e) {
    check.detail = e.what();
  }
  return check;
}

CatalogueCheck transcript(const Program& p, const CorpusCase& c) {
  CatalogueCheck check{c.golden + " transcript", false, {}};
  try {
    Replay r = replay_case(c, p);
    std::vector<std::string> golden = read_lines(corpus_file(c.golden));
    check.ok = r.transcript == golden && r.diagnosis && r.diagnosis->category == c.category;
    if (!check.ok) {
      std::size_t i = 0;
      while (i < r.transcript.size() && i < golden.size() && r.transcript[i] == golden[i]) ++i;
      check.detail = "first difference at line " + std::to_string(i + 1);
    }
  } catch (const std::exception& e) {
    check.detail = e.what();
  }
  return check;
}

const CorpusCase& named(const std::string& name) {
  for (const CorpusCase& c : diagnosis_cases())
    if (c.name == name) return c;
  throw std::logic_error("no corpus case " + name);
}

std::size_t count(const std::vector<ExpectedAnswer>& as, OutcomeKind k) {
  return static_cast<std::size_t>(std::count_if(as.begin(), as.end(), [&](const ExpectedAnswer& a) { return a.kind == k; }));
}

bool has(const std::vector<ExpectedAnswer>& as, OutcomeKind k, const std::string& atom) {
  return std::any_of(as.begin(), as.end(), [&](const ExpectedAnswer& a) { return a.kind == k && a.atom == atom; });
}

}  // namespace

bool all_ok(const std::vector<CatalogueCheck>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const CatalogueCheck& c) { return c.ok; });
}

std::vector<CatalogueCheck> bug1_catalogue(const Program& p) {
  std::vector<CatalogueCheck> out;
  out.push_back(exact_sequence(p, named("bug1-backward")));
  if (!out.back().ok) return out;
  CatalogueCheck fwd{"perm([1,2,3],A) succeeds twice then loops", false, {}};
  try {
    std::vector<Outcome> os = run(p, "perm([1,2,3],A)", 3);
    std::vector<ExpectedAnswer> got = answer_sequence(os);
    fwd.ok = got.size() == 2 && count(got, OutcomeKind::Success) == 2 && os.back().kind == OutcomeKind::StepLimit;
    fwd.detail = describe(got, os.back().kind);
  } catch (const std::exception& e) {
    fwd.detail = e.what();
  }
  out.push_back(fwd);
  if (!out.back().ok) return out;
  out.push_back(transcript(p, named("bug1-backward")));
  return out;
}

std::vector<CatalogueCheck> bug2_catalogue(const Program& p) {
  std::vector<CatalogueCheck> out;
  out.push_back(exact_sequence(p, named("bug2-backward")));
  if (!out.back().ok) return out;
  out.push_back(transcript(p, named("bug2-backward")));
  return out;
}

std::vector<CatalogueCheck> bug3_catalogue(const Program& p) {
  std::vector<CatalogueCheck> out;
  CatalogueCheck back{"perm(A,[1,2,3]): success [1,2,3] then 3 floundered incl. [1,3,_|_]", false, {}};
  CatalogueCheck one{"perm([A,1|B],[2,3]): exactly one floundered answer, A=3", false, {}};
  try {
    std::vector<Outcome> os = run(p, "perm(A,[1,2,3])", 5);
    std::vector<ExpectedAnswer> got = answer_sequence(os);
    back.ok = got.size() == 4 && got[0].kind == OutcomeKind::Success && got[0].atom == "perm([1, 2, 3], [1, 2, 3])" &&
              count(got, OutcomeKind::Floundered) == 3 &&
              has(got, OutcomeKind::Floundered, "perm([1, 3, A|B], [1, 2, 3])") &&
              os.back().kind == OutcomeKind::Exhausted;
    back.detail = describe(got, os.back().kind);

    os = run(p, "perm([A,1|B],[2,3])", 2);
    got = answer_sequence(os);
    one.ok = got.size() == 1 && got[0].kind == OutcomeKind::Floundered && os.back().kind == OutcomeKind::Exhausted &&
             got[0].atom.rfind("perm([3, 1|", 0) == 0;
    one.detail = describe(got, os.back().kind);
  } catch (const std::exception& e) {
    back.detail = one.detail = e.what();
  }
  out.push_back(back);
  out.push_back(one);
  if (!back.ok || !one.ok) return out;
  out.push_back(transcript(p, named("bug3-backward")));
  out.push_back(transcript(p, named("bug3-forward")));
  return out;
}

ForwardCounts bug3_forward(const Program& p) {
  ForwardCounts fc;
  for (const Outcome& o : solve(p, parse_goal("perm([1,2,3],A)"), catalogue_options())) {
    if (!o.is_answer()) {
      fc.end = o.kind;
      break;
    }
    fc.answers.push_back({o.kind, answer_text(o)});
    if (o.kind == OutcomeKind::Success) {
      ++fc.successes;
      continue;
    }
    ++fc.floundered;
    std::vector<Term> goal_vars = variables_of(o.answer_term());
    bool visible = false;
    for (const AnnotatedAtom& r : o.residue) {
      for (const Term& v : variables_of(r.condition ? r.condition->term() : r.atom))
        if (std::find(goal_vars.begin(), goal_vars.end(), v) != goal_vars.end()) visible = true;
    }
    if (visible) ++fc.floundered_visible;
  }
  return fc;
}

namespace {

// Index of `inserted(A, [A1|As0], [A1|As]) :- when(..., inserted(...))`.
std::size_t recursive_inserted(const Program& p) {
  const std::vector<std::size_t>* idx = p.lookup("inserted/3");
  if (!idx) throw std::invalid_argument("program has no inserted/3");
  for (std::size_t i : *idx)
    if (p.clause(i).body.size() == 1) return i;
  throw std::invalid_argument("program has no recursive inserted/3 clause");
}

Program replace_clause(const Program& p, std::size_t index, const Clause& c) {
  Program out;
  for (std::size_t i = 0; i < p.clauses().size(); ++i) out.add(i == index ? c : p.clause(i));
  return out;
}

std::string edit_text(const Clause& c) {
  return format_clause(c);
}

}  // namespace

std::vector<Candidate> delay_condition_edits(const Program& correct) {
  std::size_t index = recursive_inserted(correct);
  const Clause& base = correct.clause(index);
  std::vector<Term> vars = variables_of(Term::compound("$c", {base.head, base.body[0].atom}));
  std::vector<WhenCondition> conditions;
  for (const Term& v : vars) conditions.push_back(WhenCondition::nonvar(v));
  for (const Term& v : vars) conditions.push_back(WhenCondition::ground(v));
  for (std::size_t i = 0; i < vars.size(); ++i)
    for (std::size_t j = 0; j < vars.size(); ++j)
      if (i != j) conditions.push_back(WhenCondition::disj(WhenCondition::nonvar(vars[i]), WhenCondition::nonvar(vars[j])));
  for (std::size_t i = 0; i < vars.size(); ++i)
    for (std::size_t j = i + 1; j < vars.size(); ++j)
      conditions.push_back(WhenCondition::conj(WhenCondition::nonvar(vars[i]), WhenCondition::nonvar(vars[j])));

  std::vector<Candidate> out;
  for (const WhenCondition& c : conditions) {
    if (base.body[0].condition && c == *base.body[0].condition) continue;
    Clause e = base;
    e.body[0].condition = c;
    out.push_back({edit_text(e), replace_clause(correct, index, e)});
  }
  return out;
}

std::vector<Candidate> variable_edits(const Program& correct) {
  std::size_t index = recursive_inserted(correct);
  const Clause& base = correct.clause(index);
  std::vector<Term> vars = variables_of(Term::compound("$c", {base.head, base.body[0].atom}));
  vars.push_back(Term::var(base.var_count, "As1"));
  const Term& call = base.body[0].atom;

  std::vector<Candidate> out;
  for (std::size_t pos = 0; pos < call.arity(); ++pos) {
    if (!call.arg(pos).is_var()) continue;
    for (const Term& v : vars) {
      if (v == call.arg(pos)) continue;
      std::vector<Term> args(call.args().begin(), call.args().end());
      args[pos] = v;
      Clause e = base;
      e.body[0].atom = Term::compound(call.name(), std::move(args));
      e.var_count = base.var_count + 1;
      out.push_back({edit_text(e), replace_clause(correct, index, e)});
    }
  }
  return out;
}

std::vector<Candidate> reconstruct(const std::vector<Candidate>& candidates,
                                   std::vector<CatalogueCheck> (*catalogue)(const Program&)) {
  std::vector<Candidate> out;
  for (const Candidate& c : candidates)
    if (all_ok(catalogue(c.program))) out.push_back(c);
  return out;
}

Replay replay_case(const CorpusCase& c, const Program& program) {
  Interpretation interp = Interpretation::load(corpus_file(c.intent));
  RuleOracle rules(interp);
  ScriptedOracle scripted = ScriptedOracle::load(corpus_file(c.answers));
  scripted.set_fallback(&rules);
  DiagnosisSession session(scripted);
  WrongOptions wo;
  wo.engine = catalogue_options();
  wo.first_answer = c.first_answer;
  WrongReport report = diagnose_wrong(program, parse_goal(c.goal), session, wo);
  return {session.transcript(), report.diagnosis};
}

Replay replay_case(const CorpusCase& c) { return replay_case(c, load_program(corpus_file(c.program))); }

}  // namespace flounder
