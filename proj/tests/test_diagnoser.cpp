#include "doctest.h"

#include <set>
#include <sstream>

#include "flounder/diagnoser.hpp"
#include "support.hpp"

using namespace flounder;

namespace {

std::string joined(const std::vector<std::string>& lines) {
  std::string out;
  for (const std::string& l : lines) out += l + "\n";
  return out;
}

std::vector<std::string> golden(const CorpusCase& c) { return read_lines(corpus_file(c.golden)); }

}  // namespace

TEST_CASE("each corpus case reproduces its transcript and category") {
  for (const CorpusCase& c : diagnosis_cases()) {
    CAPTURE(c.name);
    Replay r = replay_case(c);
    REQUIRE(r.diagnosis);
    CHECK(r.diagnosis->category == c.category);
    CHECK(joined(r.transcript) == joined(golden(c)));
  }
}

TEST_CASE("report blocks") {
  const auto& cases = diagnosis_cases();
  Replay bug1 = replay_case(cases[0]);
  REQUIRE(bug1.diagnosis);
  CHECK(render_diagnosis(*bug1.diagnosis) ==
        "BUG - incorrect delay annotation:\nwhen((nonvar(A);nonvar(B)), inserted(B, A, []))");
  CHECK(bug1.diagnosis->answer_index == 2);
  CHECK(bug1.diagnosis->location.line == 11);

  Replay bug2 = replay_case(cases[1]);
  REQUIRE(bug2.diagnosis);
  CHECK(render_diagnosis(*bug2.diagnosis) ==
        "BUG - incorrect modes/types in clause instance:\n"
        "perm([A, C|D], [3]) :-\n"
        "        when((nonvar([3|B]);nonvar([])), inserted(A, [3|B], [3])),\n"
        "        when((nonvar([C|D]);nonvar([3|B])), perm([C|D], [3|B])).");
  // One diagnosis naming both inadmissible calls.
  CHECK(bug2.diagnosis->inadmissible_atoms.size() == 2);

  Replay bug3 = replay_case(cases[2]);
  REQUIRE(bug3.diagnosis);
  CHECK(render_diagnosis(*bug3.diagnosis) ==
        "BUG - incorrect clause instance:\n"
        "inserted(3, [2|A], [2, 3]) :-\n"
        "        when((nonvar(A);nonvar([3])), inserted(3, [], [3])).");
  CHECK_FALSE(render_details(*bug3.diagnosis).empty());
}

TEST_CASE("the rule oracle alone finds the bug 1 diagnosis") {
  Program p = testing::corpus_program("perm_bug1.pl");
  Interpretation i = Interpretation::load(corpus_file("intent_default.txt"));
  RuleOracle o(i);
  DiagnosisSession s(o);
  WrongReport r = diagnose_wrong(p, parse_goal("perm(A,[1,2,3])"), s);
  REQUIRE(r.diagnosis);
  CHECK(r.diagnosis->category == BugCategory::IncorrectDelayAnnotation);
  CHECK(joined(s.transcript()) == joined(read_lines(corpus_file("golden_fig3.txt"))));
  REQUIRE(r.answers.size() == 2);
  CHECK(r.answers[0].result == AnswerReport::Result::Valid);
  CHECK(r.answers[1].result == AnswerReport::Result::Diagnosed);
}

TEST_CASE("no question is asked twice") {
  for (const CorpusCase& c : diagnosis_cases()) {
    Program p = load_program(corpus_file(c.program));
    Interpretation i = Interpretation::load(corpus_file(c.intent));
    RuleOracle o(i);
    DiagnosisSession s(o);
    WrongOptions wo;
    wo.first_answer = c.first_answer;
    diagnose_wrong(p, parse_goal(c.goal), s, wo);
    std::set<std::string> seen;
    for (const QuestionRecord& q : s.questions()) {
      CAPTURE(q.text);
      CHECK(seen.insert(q.text).second);
    }
  }
}

TEST_CASE("the correct program gives no diagnosis") {
  Program p = testing::corpus_program("perm.pl");
  Interpretation i = Interpretation::load(corpus_file("intent_default.txt"));
  for (const char* goal : {"perm(A,[1,2,3])", "perm([1,2,3],A)"}) {
    RuleOracle o(i);
    DiagnosisSession s(o);
    WrongReport r = diagnose_wrong(p, parse_goal(goal), s);
    CHECK_FALSE(r.diagnosis);
    CHECK(r.end == OutcomeKind::Exhausted);
    CHECK(r.answers.size() == 6);
    for (const AnswerReport& a : r.answers) CHECK(a.result == AnswerReport::Result::Valid);
  }
}

TEST_CASE("a valid root yields no diagnosis for that answer") {
  auto os = solve_with_tree(testing::corpus_program("perm_bug1.pl"), parse_goal("perm(A,[1,2,3])"));
  ScriptedOracle o = ScriptedOracle::load(corpus_file("answers_fig3.txt"));
  DiagnosisSession s(o);
  CHECK_FALSE(s.diagnose(*os[0].tree, 1));
  CHECK(s.transcript().size() == 1);
  CHECK(s.truth(*os[0].tree, os[0].tree->root(), 1) == TruthValue::Correct);
  // Answered from the cache: no new question.
  CHECK(s.questions().size() == 1);
}

TEST_CASE("interactive and scripted sessions agree") {
  const CorpusCase& c = diagnosis_cases()[1];
  Program p = load_program(corpus_file(c.program));
  std::istringstream in("v\ne\ne\ne\ni\ni\n");
  std::ostringstream out;
  InteractiveOracle o(in, out, true);
  DiagnosisSession s(o, [&](const std::string& line) { out << line << "\n"; });
  WrongReport r = diagnose_wrong(p, parse_goal(c.goal), s);
  REQUIRE(r.diagnosis);
  CHECK(r.diagnosis->category == BugCategory::IncorrectModesTypes);
  CHECK(out.str() == joined(golden(c)));
  CHECK(joined(s.transcript()) == joined(golden(c)));
}

TEST_CASE("skipping to a later answer") {
  const CorpusCase& c = diagnosis_cases()[3];
  Replay r = replay_case(c);
  REQUIRE_FALSE(r.transcript.empty());
  CHECK(r.transcript.front() == "...");
  REQUIRE(r.diagnosis);
  CHECK(r.diagnosis->answer_index == 3);
  CHECK(r.diagnosis->category == BugCategory::IncorrectModesTypes);
}

TEST_CASE("an aborted session propagates") {
  Program p = testing::corpus_program("perm_bug1.pl");
  std::istringstream in("v\nq\n");
  std::ostringstream out;
  InteractiveOracle o(in, out, false);
  DiagnosisSession s(o);
  CHECK_THROWS_AS(diagnose_wrong(p, parse_goal("perm(A,[1,2,3])"), s), OracleAbort);
}

TEST_CASE("category names") {
  CHECK(std::string(to_string(BugCategory::IncorrectDelayAnnotation)) == "IncorrectDelayAnnotation");
  CHECK(std::string(to_string(BugCategory::IncorrectModesTypes)) == "IncorrectModesTypes");
  CHECK(std::string(to_string(BugCategory::IncorrectClause)) == "IncorrectClause");
}
