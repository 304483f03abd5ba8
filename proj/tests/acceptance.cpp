// Acceptance run: one PASS/FAIL line per criterion. Exit status 1 if any
// criterion fails.

#include <chrono>
#include <functional>
#include <iomanip>
#include <iostream>

#include "flounder/encoding.hpp"
#include "properties.hpp"

using namespace flounder;
using namespace flounder::testing;

namespace {

// Tolerances.
constexpr double kBug1Seconds = 1.0;
constexpr double kBuggyNodeSeconds = 30.0;
constexpr std::size_t kRandomPrograms = 50;
constexpr std::size_t kStrategies = 100;
constexpr std::size_t kClosureInstances = 1000;
constexpr int kFactorialMax = 4;

struct Result {
  bool ok = false;
  std::string detail;
};

int failures = 0;

void report(const std::string& name, const std::function<Result()>& check) {
  auto t0 = std::chrono::steady_clock::now();
  Result r;
  try {
    r = check();
  } catch (const std::exception& e) {
    r = {false, std::string("exception: ") + e.what()};
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!r.ok) ++failures;
  std::cout << (r.ok ? "PASS " : "FAIL ") << name << " [" << std::fixed << std::setprecision(2) << secs << " s] "
            << r.detail << "\n"
            << std::flush;
}

std::vector<Outcome> run(const char* program, const char* goal) {
  return solve(load_program(corpus_file(program)), parse_goal(goal));
}

std::string show(const std::vector<ExpectedAnswer>& as) {
  std::string out;
  for (const ExpectedAnswer& a : as)
    out += std::string(a.kind == OutcomeKind::Success ? "S " : "F ") + a.atom + "; ";
  return out;
}

bool has(const std::vector<ExpectedAnswer>& as, OutcomeKind k, const std::string& atom) {
  for (const ExpectedAnswer& a : as)
    if (a.kind == k && a.atom == atom) return true;
  return false;
}

std::size_t count(const std::vector<ExpectedAnswer>& as, OutcomeKind k) {
  return static_cast<std::size_t>(std::count_if(as.begin(), as.end(), [k](const ExpectedAnswer& a) { return a.kind == k; }));
}

Result bug1_sequence() {
  auto t0 = std::chrono::steady_clock::now();
  auto os = run("perm_bug1.pl", "perm(A,[1,2,3])");
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::vector<std::string> got;
  for (const Outcome& o : os)
    if (o.is_answer()) got.push_back(std::string(o.kind == OutcomeKind::Success ? "S " : "F ") + o.bindings_text());
  std::vector<std::string> want{"S A = [1, 2, 3]", "F A = [1, 2, _A, _B|_C]", "F A = [1, _A, _B|_C]",
                                "F A = [_A, _B|_C]"};
  bool ok = got == want && os.back().kind == OutcomeKind::Exhausted && secs < kBug1Seconds;
  std::string detail = "4 answers then failure in " + std::to_string(secs) + " s (limit 1 s)";
  if (!ok) detail = "got " + show(answer_sequence(os)) + "end " + to_string(os.back().kind);
  return {ok, detail};
}

Result bug3_sets() {
  std::string detail;
  bool ok = true;

  auto fwd = answer_sequence(run("perm_bug3.pl", "perm([1,2,3],A)"));
  std::size_t s = count(fwd, OutcomeKind::Success), f = count(fwd, OutcomeKind::Floundered);
  bool fwd_ok = s == 5 && f == 4 && !fwd.empty() && fwd[0].atom == "perm([1, 2, 3], [1, 2, 3])" &&
                has(fwd, OutcomeKind::Success, "perm([1, 2, 3], [1, 2, 3|A])") &&
                has(fwd, OutcomeKind::Success, "perm([1, 2, 3], [3, 1|A])") &&
                has(fwd, OutcomeKind::Floundered, "perm([1, 2, 3], [1, 3, A|B])");
  if (!fwd_ok) {
    ok = false;
    detail += "forward: want 5 S (incl. [1,2,3|_], [3,1|_]) and 4 F (incl. [1,3,_|_]), got " + std::to_string(s) +
              " S and " + std::to_string(f) + " F: " + show(fwd) +
              "[none of the 37 single delay-condition or variable edits of the recursive inserted/3 call "
              "produces the success [1,2,3|_]; see README] ";
  }

  auto bwd = answer_sequence(run("perm_bug3.pl", "perm(A,[1,2,3])"));
  bool bwd_ok = bwd.size() == 4 && bwd[0].kind == OutcomeKind::Success && bwd[0].atom == "perm([1, 2, 3], [1, 2, 3])" &&
                count(bwd, OutcomeKind::Floundered) == 3 && has(bwd, OutcomeKind::Floundered, "perm([1, 3, A|B], [1, 2, 3])");
  if (!bwd_ok) {
    ok = false;
    detail += "backward: " + show(bwd);
  }

  auto part = run("perm_bug3.pl", "perm([A,1|B],[2,3])");
  auto pa = answer_sequence(part);
  bool part_ok = pa.size() == 1 && pa[0].kind == OutcomeKind::Floundered && !part[0].bindings.empty() &&
                 part[0].bindings[0].value == Term::integer(3);
  if (!part_ok) {
    ok = false;
    detail += "perm([A,1|B],[2,3]): " + show(pa);
  }
  if (ok) detail = "forward 5 S / 4 F, backward S + 3 F, partial list one F with A = 3";
  else if (bwd_ok && part_ok) detail += "(backward and partial-list parts hold)";
  return {ok, detail};
}

Result golden() {
  std::string detail;
  bool ok = true;
  for (const CorpusCase& c : diagnosis_cases()) {
    Replay r = replay_case(c);
    bool same = r.transcript == read_lines(corpus_file(c.golden));
    bool cat = r.diagnosis && r.diagnosis->category == c.category;
    if (!same || !cat) {
      ok = false;
      detail += c.name + (same ? "" : " transcript differs") + (cat ? "" : " wrong category") + "; ";
    } else {
      detail += c.golden + "=" + to_string(c.category) + " ";
    }
  }
  return {ok, detail};
}

Result buggy_nodes() {
  auto t0 = std::chrono::steady_clock::now();
  BuggyNodeStats s = buggy_node_property(kRandomPrograms, 2024);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool ok = s.violations.empty() && s.diagnoses == s.erroneous_roots && secs < kBuggyNodeSeconds;
  std::string detail = std::to_string(s.trees) + " trees (" + std::to_string(kRandomPrograms) +
                       " random programs plus corpus), " + std::to_string(s.erroneous_roots) +
                       " erroneous roots, " + std::to_string(s.diagnoses) + " diagnoses, " +
                       std::to_string(s.violations.size()) + " violations";
  if (!s.violations.empty()) detail += "; first: " + s.violations.front();
  return {ok, detail};
}

Result order() {
  OrderStats s = order_independence(kStrategies);
  std::string detail = std::to_string(s.pairs) + " pairs x " + std::to_string(kStrategies) + " strategies, " +
                       std::to_string(s.mismatches.size()) + " mismatches";
  if (!s.mismatches.empty()) detail += "; first: " + s.mismatches.front();
  return {s.mismatches.empty() && s.runs >= kStrategies * s.pairs, detail};
}

Result encoding() {
  std::size_t checked = 0, skipped = 0, disagreements = 0;
  std::string first;
  for (const CorpusPair& pair : corpus_pairs()) {
    Limits limits;
    limits.max_steps = 200'000;
    EquivalenceReport r = equivalence_check(load_program(corpus_file(pair.program)), parse_goal(pair.goal), limits);
    if (!r.conclusive) {
      ++skipped;
      continue;
    }
    ++checked;
    disagreements += r.disagreements.size();
    if (!r.disagreements.empty() && first.empty()) first = pair.program + " " + pair.goal + ": " + r.disagreements[0];
  }
  std::string detail = std::to_string(checked) + " pairs within step limits, " + std::to_string(skipped) +
                       " beyond them, " + std::to_string(disagreements) + " disagreements";
  if (!first.empty()) detail += "; first: " + first;
  return {disagreements == 0 && checked > 0, detail};
}

Result closure() {
  std::vector<Term> atoms = corpus_atoms();
  std::string detail;
  bool ok = true;
  for (const char* name : {"intent_default.txt", "intent_bug2.txt"}) {
    Interpretation i = Interpretation::load(corpus_file(name));
    std::vector<Term> pool;
    for (const Term& t : atoms)
      if (i.covers(t)) pool.push_back(t);
    ClosureReport r = check_closure(i, pool, kClosureInstances, 1);
    ok = ok && r.clean() && r.instances >= kClosureInstances;
    detail += std::string(name) + ": " + std::to_string(r.instances) + " instances, " +
              std::to_string(r.violations.size()) + " violations; ";
  }
  // Expected table written out from the definition of node truth.
  struct Row {
    Verdict v;
    NodeStatus s;
    TruthValue want;
  };
  const Row table[] = {
      {Verdict::Valid, NodeStatus::Succeeded, TruthValue::Correct},
      {Verdict::Valid, NodeStatus::Floundered, TruthValue::Erroneous},
      {Verdict::Erroneous, NodeStatus::Succeeded, TruthValue::Erroneous},
      {Verdict::Erroneous, NodeStatus::Floundered, TruthValue::Erroneous},
      {Verdict::Inadmissible, NodeStatus::Succeeded, TruthValue::Inadmissible},
      {Verdict::Inadmissible, NodeStatus::Floundered, TruthValue::Inadmissible},
  };
  std::size_t rows = 0;
  for (const Row& r : table) {
    bool row_ok = truth_value(r.v, r.s) == r.want;
    if (r.s == NodeStatus::Floundered) row_ok = row_ok && truth_value(r.v, r.s) != TruthValue::Correct;
    rows += row_ok;
  }
  ok = ok && rows == 6;
  detail += "truth table " + std::to_string(rows) + "/6";
  return {ok, detail};
}

Result factorial() {
  FactorialStats s = factorial_property(kFactorialMax);
  std::string detail = "n = 0.." + std::to_string(kFactorialMax) + ", both modes";
  if (!s.failures.empty()) detail += "; " + s.failures.front();
  return {s.failures.empty(), detail};
}

}  // namespace

int main() {
  report("bug-1 answer sequence", bug1_sequence);
  report("bug-3 answer sets", bug3_sets);
  report("golden transcripts", golden);
  report("buggy-node soundness and completeness", buggy_nodes);
  report("selection-order independence", order);
  report("encoding equivalence", encoding);
  report("intent closure and truth table", closure);
  report("correct program n! sanity", factorial);
  std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " failing") << "\n";
  return failures == 0 ? 0 : 1;
}
