#include "doctest.h"

#include "support.hpp"

using namespace flounder;
using flounder::testing::corpus_program;

namespace {

std::vector<Outcome> answers_with_trees(const char* program, const char* goal) {
  EngineOptions eo;
  eo.limits.max_steps = 50'000;
  std::vector<Outcome> out;
  for (Outcome& o : solve_with_tree(corpus_program(program), parse_goal(goal), eo))
    if (o.is_answer()) out.push_back(std::move(o));
  return out;
}

std::optional<NodeId> find_node(const PartialProofTree& t, const std::string& text) {
  for (const ProofNode& n : t.nodes()) {
    if (format_atom(n.atom()) == text) return n.id;
    if (n.annotated.condition && format_annotated(n.annotated) == text) return n.id;
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("a unit clause gives a single succeeded leaf") {
  auto os = answers_with_trees("perm.pl", "perm([],[])");
  REQUIRE(os.size() == 1);
  const PartialProofTree& t = *os[0].tree;
  REQUIRE(t.size() == 1);
  CHECK(t.node(t.root()).kind == NodeKind::UnitLeaf);
  CHECK(t.status(t.root()) == NodeStatus::Succeeded);
  CHECK(t.children_ordered(t.root()).empty());
  CHECK(t.floundered_leaves(t.root()).empty());
}

TEST_CASE("the second bug 1 answer holds the delayed inserted/3 leaf") {
  auto os = answers_with_trees("perm_bug1.pl", "perm(A,[1,2,3])");
  REQUIRE(os.size() == 4);
  const PartialProofTree& t = *os[1].tree;
  NodeId root = t.root();
  CHECK(format_atom(t.node(root).atom()) == "perm([1, 2, A, B|C], [1, 2, 3])");
  CHECK(t.status(root) == NodeStatus::Floundered);

  auto leaf = find_node(t, "when((nonvar(A);nonvar(B)), inserted(B, A, []))");
  REQUIRE(leaf);
  CHECK(t.node(*leaf).kind == NodeKind::DelayedLeaf);
  CHECK(t.status(*leaf) == NodeStatus::Floundered);
  auto leaves = t.floundered_leaves(root);
  CHECK(std::find(leaves.begin(), leaves.end(), *leaf) != leaves.end());

  // The floundered recursive call is asked first.
  auto kids = t.children_ordered(root);
  REQUIRE_FALSE(kids.empty());
  CHECK(format_atom(t.node(kids[0]).atom()) == "perm([2, A, B|C], [2, 3])");
}

TEST_CASE("children are ordered floundered first, body order within each group") {
  auto os = answers_with_trees("perm_bug1.pl", "perm(A,[1,2,3])");
  for (const Outcome& o : os) {
    const PartialProofTree& t = *o.tree;
    for (const ProofNode& n : t.nodes()) {
      auto kids = t.children_ordered(n.id);
      REQUIRE(kids.size() == n.children.size());
      bool seen_succeeded = false;
      for (NodeId c : kids) {
        if (t.status(c) == NodeStatus::Succeeded) seen_succeeded = true;
        else CHECK_FALSE(seen_succeeded);
      }
      for (std::size_t i = 1; i < kids.size(); ++i)
        if (t.status(kids[i - 1]) == t.status(kids[i])) CHECK(kids[i - 1] < kids[i]);
    }
  }
}

TEST_CASE("a succeeded subtree under a floundered parent") {
  auto os = answers_with_trees("perm_bug3.pl", "perm(A,[1,2,3])");
  bool found = false;
  for (const Outcome& o : os) {
    if (o.kind != OutcomeKind::Floundered) continue;
    auto id = find_node(*o.tree, "inserted(3, [2|A], [2, 3])");
    if (!id) continue;
    const PartialProofTree& t = *o.tree;
    CHECK(t.status(*id) == NodeStatus::Succeeded);
    REQUIRE(t.node(*id).parent);
    found = found || t.status(*t.node(*id).parent) == NodeStatus::Floundered;
  }
  CHECK(found);
}

TEST_CASE("bug 3 with a partial list floundered somewhere") {
  auto os = answers_with_trees("perm_bug3.pl", "perm([A,1|B],[2,3])");
  REQUIRE(os.size() == 1);
  CHECK_FALSE(os[0].tree->floundered_leaves(os[0].tree->root()).empty());
}

TEST_CASE("accumulator statuses agree with the leaves on every corpus tree") {
  for (const CorpusPair& pair : corpus_pairs()) {
    EngineOptions eo;
    eo.limits.max_steps = 20'000;
    for (const Outcome& o : solve_with_tree(load_program(corpus_file(pair.program)), parse_goal(pair.goal), eo)) {
      if (!o.is_answer()) continue;
      const PartialProofTree& t = *o.tree;
      CHECK(t.statuses_consistent());
      CHECK((t.status(t.root()) == NodeStatus::Floundered) == (o.kind == OutcomeKind::Floundered));
      CHECK(t.floundered_leaves(t.root()).size() == o.residue.size());
      for (const ProofNode& n : t.nodes()) {
        CHECK(t.status(n.id) == t.status_from_leaves(n.id));
        if (n.parent) CHECK(*n.parent < n.id);
      }
    }
  }
}

TEST_CASE("clause instances are instances of the program clauses") {
  Program p = corpus_program("perm_bug2.pl");
  auto os = solve_with_tree(p, parse_goal("perm(A,[1,2,3])"));
  for (const Outcome& o : os) {
    if (!o.is_answer()) continue;
    const PartialProofTree& t = *o.tree;
    for (const ProofNode& n : t.nodes()) {
      auto ci = t.clause_instance(n.id);
      if (n.kind == NodeKind::DelayedLeaf) {
        CHECK_FALSE(ci);
        continue;
      }
      REQUIRE(ci);
      REQUIRE(n.clause_index);
      const Clause& c = p.clause(*n.clause_index);
      CHECK(is_instance(c.head, ci->head));
      REQUIRE(ci->body.size() == c.body.size());
      std::vector<Term> general{c.head}, specific{ci->head};
      for (std::size_t i = 0; i < c.body.size(); ++i) {
        general.push_back(c.body[i].as_term());
        specific.push_back(ci->body[i].as_term());
      }
      CHECK(is_instance(Term::compound("c", general), Term::compound("c", specific)));
    }
  }
}

TEST_CASE("tree JSON") {
  auto os = answers_with_trees("perm_bug1.pl", "perm(A,[1,2,3])");
  nlohmann::json j = os[1].tree->to_json();
  CHECK(j["atom"] == "perm([1, 2, A, B|C], [1, 2, 3])");
  CHECK(j["status"] == "floundered");
  CHECK(j["kind"] == "internal");
  CHECK(j["clause"]["index"] == 1);
  CHECK(j["clause"]["location"].get<std::string>().find("perm_bug1.pl:4") != std::string::npos);
  REQUIRE(j["children"].is_array());
  REQUIRE(j["children"].size() == 2);
  CHECK(j["children"][0]["annotated"] == true);
  CHECK(j["children"][0].contains("when"));

  std::size_t count = 0;
  std::vector<const nlohmann::json*> stack{&j};
  while (!stack.empty()) {
    const nlohmann::json* n = stack.back();
    stack.pop_back();
    ++count;
    for (const nlohmann::json& c : (*n)["children"]) stack.push_back(&c);
    if ((*n)["kind"] == "delayed") CHECK((*n)["clause"].is_null());
  }
  CHECK(count == os[1].tree->size());

  auto leaf = answers_with_trees("perm.pl", "perm([],[])");
  nlohmann::json one = leaf[0].tree->to_json();
  CHECK(one["status"] == "succeeded");
  CHECK(one["children"].empty());
}
