#include "flounder/diagnoser.hpp"

#include <sstream>
#include <stdexcept>

namespace flounder {

const char* to_string(BugCategory c) {
  switch (c) {
    case BugCategory::IncorrectDelayAnnotation: return "IncorrectDelayAnnotation";
    case BugCategory::IncorrectModesTypes: return "IncorrectModesTypes";
    case BugCategory::IncorrectClause: return "IncorrectClause";
  }
  return "?";
}

std::string render_diagnosis(const Diagnosis& d) {
  switch (d.category) {
    case BugCategory::IncorrectDelayAnnotation:
      return "BUG - incorrect delay annotation:\n" + format_annotated(d.buggy);
    case BugCategory::IncorrectModesTypes:
      return "BUG - incorrect modes/types in clause instance:\n" + d.clause_instance->render();
    case BugCategory::IncorrectClause:
      return "BUG - incorrect clause instance:\n" + d.clause_instance->render();
  }
  return {};
}

std::string render_details(const Diagnosis& d) {
  std::string out;
  if (d.location.line > 0) out += "location: " + d.location.str() + "\n";
  if (!d.inadmissible_atoms.empty()) {
    out += "inadmissible calls:";
    for (const Term& t : d.inadmissible_atoms) out += " " + format_atom(t);
    out += "\n";
  }
  if (d.succeeded_inadmissible_child)
    out += "note: an inadmissible call succeeded, which may point to a type error in the clause\n";
  if (d.parent_instance) out += "called from:\n" + d.parent_instance->render() + "\n";
  return out;
}

void DiagnosisSession::emit(const std::string& line) {
  transcript_.push_back(line);
  if (sink_) sink_(line);
}

Verdict DiagnosisSession::verdict(const PartialProofTree& tree, NodeId id, std::size_t answer_index) {
  const ProofNode& n = tree.node(id);
  Question q;
  q.atom = n.atom();
  q.status = n.status;
  q.node = id;
  q.answer_index = answer_index;
  q.tree = &tree;
  q.text = format_atom(n.atom());
  auto cached = cache_.find(q.text);
  if (cached != cache_.end()) return cached->second;

  Verdict v = oracle_.ask(q);
  cache_.emplace(q.text, v);
  questions_.push_back({q.text, q.status, v, id, answer_index});
  std::string line = q.prompt() + verdict_char(v);
  if (oracle_.echoes()) {
    transcript_.push_back(line);
  } else {
    emit(line);
  }
  return v;
}

TruthValue DiagnosisSession::truth(const PartialProofTree& tree, NodeId id, std::size_t answer_index) {
  return truth_value(verdict(tree, id, answer_index), tree.status(id));
}

std::optional<Diagnosis> DiagnosisSession::diagnose(const PartialProofTree& tree, std::size_t answer_index) {
  NodeId current = tree.root();
  if (truth(tree, current, answer_index) != TruthValue::Erroneous) return std::nullopt;

  std::vector<NodeId> inadmissible;
  for (;;) {
    inadmissible.clear();
    std::optional<NodeId> next;
    for (NodeId c : tree.children_ordered(current)) {
      TruthValue t = truth(tree, c, answer_index);
      if (t == TruthValue::Erroneous) {
        next = c;
        break;
      }
      if (t == TruthValue::Inadmissible) inadmissible.push_back(c);
    }
    if (!next) break;
    current = *next;
  }

  const ProofNode& n = tree.node(current);
  Diagnosis d;
  d.node = current;
  d.answer_index = answer_index;
  d.buggy = n.annotated;
  if (n.parent) d.parent_instance = tree.clause_instance(*n.parent);
  for (NodeId c : inadmissible) {
    d.inadmissible_children.push_back(c);
    d.inadmissible_atoms.push_back(tree.node(c).atom());
    if (tree.status(c) == NodeStatus::Succeeded) d.succeeded_inadmissible_child = true;
  }
  if (n.kind == NodeKind::DelayedLeaf) {
    d.category = BugCategory::IncorrectDelayAnnotation;
    if (d.parent_instance) d.location = d.parent_instance->location;
  } else if (n.status == NodeStatus::Succeeded) {
    d.category = BugCategory::IncorrectClause;
    d.clause_instance = tree.clause_instance(current);
    d.location = n.location;
  } else {
    if (inadmissible.empty())
      throw OracleError("inconsistent oracle: floundered node " + format_atom(n.atom()) +
                        " has neither erroneous nor inadmissible children");
    d.category = BugCategory::IncorrectModesTypes;
    d.clause_instance = tree.clause_instance(current);
    d.location = n.location;
  }
  return d;
}

WrongReport diagnose_wrong(const Program& program, const Goal& goal, DiagnosisSession& session,
                           const WrongOptions& options) {
  if (goal.atoms.size() != 1) throw std::invalid_argument("diagnosis needs an atomic goal");
  EngineOptions eo = options.engine;
  eo.build_tree = true;
  Engine engine(program, goal, eo);
  WrongReport report;
  std::size_t index = 0;
  while (auto o = engine.next()) {
    if (!o->is_answer()) {
      report.end = o->kind;
      break;
    }
    ++index;
    AnswerReport a;
    a.index = index;
    a.kind = o->kind;
    a.atom = format_atom(o->answer_term());
    if (index < options.first_answer) {
      a.result = AnswerReport::Result::Skipped;
      report.answers.push_back(a);
      continue;
    }
    if (index == options.first_answer && index > 1) session.emit("...");
    const PartialProofTree& tree = *o->tree;
    auto d = session.diagnose(tree, index);
    if (d) {
      a.result = AnswerReport::Result::Diagnosed;
      report.answers.push_back(a);
      report.diagnosis = std::move(d);
      std::istringstream lines(render_diagnosis(*report.diagnosis));
      std::string line;
      while (std::getline(lines, line)) session.emit(line);
      return report;
    }
    TruthValue root = session.truth(tree, tree.root(), index);
    a.result = root == TruthValue::Inadmissible ? AnswerReport::Result::Inadmissible : AnswerReport::Result::Valid;
    report.answers.push_back(a);
  }
  return report;
}

}  // namespace flounder
