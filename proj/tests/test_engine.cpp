#include "doctest.h"

#include "support.hpp"

using namespace flounder;
using flounder::testing::answer_atoms;
using flounder::testing::corpus_program;

namespace {

std::vector<std::string> bindings(const std::vector<Outcome>& os) {
  std::vector<std::string> out;
  for (const Outcome& o : os)
    if (o.is_answer()) out.push_back(std::string(o.kind == OutcomeKind::Success ? "S " : "F ") + o.bindings_text());
  return out;
}

}  // namespace

TEST_CASE("bug 1 backwards: one success, three floundered answers, then failure") {
  auto os = solve(corpus_program("perm_bug1.pl"), parse_goal("perm(A,[1,2,3])"));
  CHECK(bindings(os) == std::vector<std::string>{
                            "S A = [1, 2, 3]",
                            "F A = [1, 2, _A, _B|_C]",
                            "F A = [1, _A, _B|_C]",
                            "F A = [_A, _B|_C]",
                        });
  CHECK(os.back().kind == OutcomeKind::Exhausted);
  CHECK(answer_atoms(os, OutcomeKind::Floundered)[0] == "perm([1, 2, A, B|C], [1, 2, 3])");
}

TEST_CASE("the empty permutation") {
  auto os = solve(corpus_program("perm.pl"), parse_goal("perm([],X)"));
  REQUIRE(os.size() == 2);
  CHECK(os[0].kind == OutcomeKind::Success);
  CHECK(os[0].bindings_text() == "X = []");
  CHECK(os[1].kind == OutcomeKind::Exhausted);
}

TEST_CASE("bug 3 with a partial list: a single floundered answer with A = 3") {
  auto os = solve(corpus_program("perm_bug3.pl"), parse_goal("perm([A,1|B],[2,3])"));
  REQUIRE(os.size() == 2);
  CHECK(os[0].kind == OutcomeKind::Floundered);
  REQUIRE(!os[0].bindings.empty());
  CHECK(os[0].bindings[0].name == "A");
  CHECK(os[0].bindings[0].value == Term::integer(3));
  CHECK_FALSE(os[0].residue.empty());
  CHECK(os[1].kind == OutcomeKind::Exhausted);
}

TEST_CASE("the correct program is reversible") {
  Program p = corpus_program("perm.pl");
  auto fwd = solve(p, parse_goal("perm([1,2,3],A)"));
  auto bwd = solve(p, parse_goal("perm(A,[1,2,3])"));
  CHECK(answer_atoms(fwd, OutcomeKind::Success).size() == 6);
  CHECK(answer_atoms(bwd, OutcomeKind::Success).size() == 6);
  CHECK(answer_atoms(fwd, OutcomeKind::Floundered).empty());
  CHECK(answer_atoms(bwd, OutcomeKind::Floundered).empty());
  CHECK(fwd.back().kind == OutcomeKind::Exhausted);
  CHECK(bwd.back().kind == OutcomeKind::Exhausted);
}

TEST_CASE("residue is exactly the delayed calls whose condition is still false") {
  for (const char* name : {"perm_bug1.pl", "perm_bug2.pl", "perm_bug3.pl"}) {
    Program p = corpus_program(name);
    for (const char* goal : {"perm(A,[1,2,3])", "perm([A,1|B],[2,3])"}) {
      EngineOptions eo;
      eo.limits.max_steps = 50'000;
      for (const Outcome& o : solve(p, parse_goal(goal), eo)) {
        if (o.kind == OutcomeKind::Success) CHECK(o.residue.empty());
        if (o.kind != OutcomeKind::Floundered) continue;
        REQUIRE_FALSE(o.residue.empty());
        BindingStore empty;
        for (const AnnotatedAtom& r : o.residue) {
          REQUIRE(r.condition.has_value());
          CHECK_FALSE(condition_holds(*r.condition, empty));
        }
        CHECK(o.accumulators_agree);
      }
    }
  }
}

TEST_CASE("building trees does not change the answers") {
  for (const CorpusPair& pair : corpus_pairs()) {
    Program p = load_program(corpus_file(pair.program));
    Goal g = parse_goal(pair.goal);
    EngineOptions eo;
    eo.limits.max_steps = 20'000;
    auto plain = solve(p, g, eo);
    auto treed = solve_with_tree(p, g, eo);
    CHECK(answer_sequence(plain).size() == answer_sequence(treed).size());
    for (std::size_t i = 0; i < std::min(plain.size(), treed.size()); ++i) {
      CHECK(plain[i].kind == treed[i].kind);
      CHECK(answer_text(plain[i]) == answer_text(treed[i]));
      if (treed[i].is_answer()) CHECK(treed[i].tree.has_value());
    }
  }
}

TEST_CASE("the engine is lazy and stops at the answer limit") {
  EngineOptions eo;
  eo.limits.max_answers = 2;
  auto os = solve(corpus_program("perm.pl"), parse_goal("perm([1,2,3],A)"), eo);
  REQUIRE(os.size() == 3);
  CHECK(os[2].kind == OutcomeKind::AnswerLimit);

  Program program = corpus_program("perm.pl");
  Engine e(program, parse_goal("perm([1,2],A)"));
  auto first = e.next();
  REQUIRE(first);
  CHECK(first->bindings_text() == "A = [1, 2]");
  std::size_t after_first = e.steps();
  CHECK(after_first > 0);
  while (e.next()) {
  }
  CHECK_FALSE(e.next());
  CHECK(e.steps() >= after_first);
}

TEST_CASE("a looping goal hits the step limit") {
  EngineOptions eo;
  eo.limits.max_steps = 5'000;
  auto os = solve(corpus_program("perm_bug1.pl"), parse_goal("perm([1,2,3],A)"), eo);
  CHECK(os.back().kind == OutcomeKind::StepLimit);
  CHECK(os.back().steps >= 5'000);
}

TEST_CASE("calling an undefined predicate is an error") {
  Program p = parse_program("p(X) :- q(X).");
  CHECK_THROWS_AS(solve(p, parse_goal("p(a)")), EngineError);
}

TEST_CASE("delayed calls wake as soon as their condition holds") {
  Program p = parse_program(
      "p(X, Y) :- when(nonvar(X), q(X, Y)), r(X).\n"
      "q(a, woken).\n"
      "r(a).\n");
  auto os = solve(p, parse_goal("p(X, Y)"));
  REQUIRE(os.size() == 2);
  CHECK(os[0].kind == OutcomeKind::Success);
  CHECK(os[0].bindings_text() == "X = a, Y = woken");
}

TEST_CASE("a goal with nothing to wake its delayed call flounders") {
  Program p = parse_program("p(a).");
  auto os = solve(p, parse_goal("when(nonvar(X), p(X))"));
  REQUIRE(os.size() == 2);
  CHECK(os[0].kind == OutcomeKind::Floundered);
  REQUIRE(os[0].residue.size() == 1);
  CHECK(format_annotated(os[0].residue[0]) == "when(nonvar(A), p(A))");
}

TEST_CASE("ground/1 and conjunctive conditions") {
  Program p = parse_program(
      "t(X, Y) :- when(ground(X), ok(X)), when((nonvar(X),nonvar(Y)), ok2(X, Y)), bind(X).\n"
      "bind(f(a)).\n"
      "ok(f(a)).\n"
      "ok2(f(a), b).\n");
  auto os = solve(p, parse_goal("t(X, Y)"));
  REQUIRE(os.size() == 2);
  CHECK(os[0].kind == OutcomeKind::Floundered);
  REQUIRE(os[0].residue.size() == 1);
  CHECK(format_atom(os[0].residue[0].atom) == "ok2(f(a), A)");

  auto both = solve(p, parse_goal("t(X, b)"));
  CHECK(both[0].kind == OutcomeKind::Success);
}

TEST_CASE("random selection finds the same answers") {
  Program p = corpus_program("perm_bug1.pl");
  auto base = answer_sequence(solve(p, parse_goal("perm(A,[1,2,3])")));
  std::vector<std::string> want;
  for (const auto& a : base) want.push_back(a.atom + (a.kind == OutcomeKind::Success ? " S" : " F"));
  std::sort(want.begin(), want.end());
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    EngineOptions eo;
    eo.strategy = SelectionStrategy::random(seed);
    std::vector<std::string> got;
    for (const auto& a : answer_sequence(solve(p, parse_goal("perm(A,[1,2,3])"), eo)))
      got.push_back(a.atom + (a.kind == OutcomeKind::Success ? " S" : " F"));
    std::sort(got.begin(), got.end());
    CHECK(got == want);
  }
}
