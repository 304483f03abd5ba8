#include "doctest.h"

#include <sstream>

#include "flounder/intent.hpp"
#include "support.hpp"

using namespace flounder;

namespace {

Interpretation intent(const char* name) { return Interpretation::load(corpus_file(name)); }

std::optional<Verdict> classify(const Interpretation& i, const char* atom) { return i.classify(parse_term(atom)); }

}  // namespace

TEST_CASE("classification of perm atoms") {
  Interpretation i = intent("intent_default.txt");
  CHECK(classify(i, "perm([X],[X])") == Verdict::Valid);
  CHECK(classify(i, "perm([X],[2|Y])") == Verdict::Erroneous);
  CHECK(classify(i, "perm([2|X],[2|Y])") == Verdict::Inadmissible);
  CHECK(classify(i, "perm([1,2,3],[1,2,3])") == Verdict::Valid);
  CHECK(classify(i, "perm([1,2,A,B|C],[1,2,3])") == Verdict::Erroneous);
  CHECK(classify(i, "perm([1],[1])") == Verdict::Valid);
}

TEST_CASE("the two intents disagree on inserted(A,[3|B],[3])") {
  CHECK(classify(intent("intent_bug2.txt"), "inserted(A,[3|B],[3])") == Verdict::Inadmissible);
  CHECK(classify(intent("intent_default.txt"), "inserted(A,[3|B],[3])") == Verdict::Erroneous);
  CHECK(classify(intent("intent_default.txt"), "inserted(A,B,[])") == Verdict::Erroneous);
  CHECK(classify(intent("intent_bug2.txt"), "inserted(2,[A|B],[A|C])") == Verdict::Inadmissible);
}

TEST_CASE("truth of nodes") {
  // All verdict and status combinations.
  CHECK(truth_value(Verdict::Valid, NodeStatus::Succeeded) == TruthValue::Correct);
  CHECK(truth_value(Verdict::Valid, NodeStatus::Floundered) == TruthValue::Erroneous);
  CHECK(truth_value(Verdict::Erroneous, NodeStatus::Succeeded) == TruthValue::Erroneous);
  CHECK(truth_value(Verdict::Erroneous, NodeStatus::Floundered) == TruthValue::Erroneous);
  CHECK(truth_value(Verdict::Inadmissible, NodeStatus::Succeeded) == TruthValue::Inadmissible);
  CHECK(truth_value(Verdict::Inadmissible, NodeStatus::Floundered) == TruthValue::Inadmissible);
}

TEST_CASE("the corpus intents are closed under instantiation") {
  std::vector<Term> atoms = corpus_atoms();
  REQUIRE(atoms.size() > 20);
  for (const char* name : {"intent_default.txt", "intent_bug2.txt"}) {
    Interpretation i = intent(name);
    std::vector<Term> pool;
    for (const Term& t : atoms)
      if (i.covers(t)) pool.push_back(t);
    ClosureReport r = check_closure(i, pool, 1000, 7);
    CHECK(r.instances == 1000);
    CHECK(r.violations.empty());
  }
}

TEST_CASE("a var/1 admissibility rule is caught by the closure check") {
  Interpretation broken = Interpretation::parse(
      "admissible p(X) :- var(X).\n"
      "valid p(X).\n");
  CHECK(broken.admissible(parse_term("p(Y)")));
  CHECK_FALSE(broken.admissible(parse_term("p(a)")));
  ClosureReport r = check_closure(broken, {parse_term("p(Y)")}, 50, 3);
  CHECK_FALSE(r.clean());
}

TEST_CASE("a validity source that is not closed is caught too") {
  Interpretation broken = Interpretation::parse(
      "admissible q(X).\n"
      "valid q(_).\n");
  CHECK(check_closure(broken, {parse_term("q(Y)"), parse_term("q(a)")}, 100).clean());
}

TEST_CASE("instances of valid atoms stay valid") {
  Interpretation i = intent("intent_default.txt");
  CHECK(classify(i, "perm([X],[X])") == Verdict::Valid);
  CHECK(classify(i, "perm([1],[1])") == Verdict::Valid);
  CHECK(classify(i, "perm([f(a)],[f(a)])") == Verdict::Valid);
}

TEST_CASE("encoded variables") {
  CHECK(format_term(encode_variables(parse_term("perm([X],[X])"))) == "perm([$1], [$1])");
  CHECK(format_term(encode_variables(parse_term("perm([2|X],[2|Y])"))) == "perm([2|$1], [2|$2])");
  Term ground = parse_term("perm([1,2],[2,1])");
  CHECK(encode_variables(ground) == ground);
}

TEST_CASE("intent file errors") {
  CHECK_THROWS_AS(Interpretation::parse("admissible p(X, X)."), IntentError);
  CHECK_THROWS_AS(Interpretation::parse("admissible p(X) :- length(X, 2)."), IntentError);
  CHECK_THROWS_AS(Interpretation::parse("frobnicate p."), IntentError);
  CHECK_THROWS_AS(Interpretation::parse("admissible p(X) :- list(X)"), IntentError);
  CHECK_THROWS_AS(intent("intent_default.txt").admissible(parse_term("q(1)")), IntentError);
  CHECK_THROWS_AS(Interpretation::parse("admissible p(X).").valid(parse_term("p(1)")), IntentError);
}

TEST_CASE("scripted answers") {
  ScriptedOracle o = ScriptedOracle::parse(
      "% comment\n"
      "perm([1, 2, 3], [1, 2, 3]) -> v\n"
      "inserted(X, [3|Y], [3]) -> i\n"
      "perm([A], [2|B]) \xE2\x86\x92 e\n");
  CHECK(o.size() == 3);
  CHECK(o.lookup("perm([1, 2, 3], [1, 2, 3])") == Verdict::Valid);
  CHECK(o.lookup("inserted(A, [3|B], [3])") == Verdict::Inadmissible);
  CHECK(o.lookup("perm([A], [2|B])") == Verdict::Erroneous);
  CHECK_FALSE(o.lookup("perm([], [])"));

  Question q;
  q.text = "perm([], [])";
  CHECK_THROWS_AS(o.ask(q), OracleError);
  Interpretation i = intent("intent_default.txt");
  RuleOracle rules(i);
  o.set_fallback(&rules);
  q.atom = parse_term("perm([],[])");
  CHECK(o.ask(q) == Verdict::Valid);
}

TEST_CASE("a transcript can be replayed as an answer file") {
  ScriptedOracle o = ScriptedOracle::load(corpus_file("golden_fig4.txt"));
  CHECK(o.size() == 6);
  CHECK(o.lookup("perm([A|B], [3|C])") == Verdict::Inadmissible);
}

TEST_CASE("inconsistent scripted answers are rejected") {
  CHECK_THROWS_AS(ScriptedOracle::parse("p(X) -> v\np(Y) -> e\n"), OracleError);
  CHECK_THROWS_AS(ScriptedOracle::parse("p(X) -> maybe\n"), OracleError);
  CHECK_NOTHROW(ScriptedOracle::parse("p(X) -> v\np(Y) -> v\n"));
}

TEST_CASE("interactive answers") {
  Question q;
  q.text = "perm([1], [1])";
  q.status = NodeStatus::Succeeded;
  std::istringstream in("what\ne\n");
  std::ostringstream out;
  InteractiveOracle o(in, out, true);
  CHECK(o.ask(q) == Verdict::Erroneous);
  CHECK(out.str().rfind("(succeeded)  perm([1], [1]) ...? what\n", 0) == 0);
  CHECK(out.str().find("(succeeded)  perm([1], [1]) ...? e\n") != std::string::npos);

  std::istringstream quit("q\n");
  InteractiveOracle oq(quit, out, false);
  CHECK_THROWS_AS(oq.ask(q), OracleAbort);
  std::istringstream eof("");
  InteractiveOracle oe(eof, out, false);
  CHECK_THROWS_AS(oe.ask(q), OracleAbort);
}

TEST_CASE("question prompts") {
  CHECK(question_prompt(NodeStatus::Succeeded, "p(a)") == "(succeeded)  p(a) ...? ");
  CHECK(question_prompt(NodeStatus::Floundered, "p(a)") == "(floundered) p(a) ...? ");
}
