#include "flounder/prooftree.hpp"

#include <stdexcept>

namespace flounder {

const char* to_string(NodeStatus s) { return s == NodeStatus::Succeeded ? "succeeded" : "floundered"; }

const char* to_string(NodeKind k) {
  switch (k) {
    case NodeKind::UnitLeaf: return "unit";
    case NodeKind::Internal: return "internal";
    case NodeKind::DelayedLeaf: return "delayed";
    case NodeKind::Builtin: return "builtin";
  }
  return "?";
}

PartialProofTree::PartialProofTree(std::vector<ProofNode> nodes, std::vector<NodeId> roots)
    : nodes_(std::move(nodes)), roots_(std::move(roots)) {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].id != i) throw std::invalid_argument("proof tree node ids must be dense");
    ProofNode& n = nodes_[i];
    n.status = n.acc_in == n.acc_out ? NodeStatus::Succeeded : NodeStatus::Floundered;
  }
}

NodeId PartialProofTree::root() const {
  if (roots_.size() != 1) throw std::logic_error("proof tree has " + std::to_string(roots_.size()) + " roots");
  return roots_.front();
}

std::vector<NodeId> PartialProofTree::children_ordered(NodeId id) const {
  const ProofNode& n = node(id);
  std::vector<NodeId> out;
  out.reserve(n.children.size());
  for (NodeId c : n.children)
    if (status(c) == NodeStatus::Floundered) out.push_back(c);
  for (NodeId c : n.children)
    if (status(c) == NodeStatus::Succeeded) out.push_back(c);
  return out;
}

std::vector<NodeId> PartialProofTree::floundered_leaves(NodeId id) const {
  std::vector<NodeId> out;
  std::vector<NodeId> stack{id};
  while (!stack.empty()) {
    NodeId cur = stack.back();
    stack.pop_back();
    const ProofNode& n = node(cur);
    if (n.kind == NodeKind::DelayedLeaf) out.push_back(cur);
    for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

NodeStatus PartialProofTree::status_from_leaves(NodeId id) const {
  return floundered_leaves(id).empty() ? NodeStatus::Succeeded : NodeStatus::Floundered;
}

bool PartialProofTree::statuses_consistent() const {
  // Children come after parents, so a reverse sweep sees children first.
  std::vector<bool> floundered(nodes_.size(), false);
  for (std::size_t i = nodes_.size(); i-- > 0;) {
    const ProofNode& n = nodes_[i];
    bool f = n.kind == NodeKind::DelayedLeaf;
    for (NodeId c : n.children) f = f || floundered[c];
    floundered[i] = f;
    if (f != (n.status == NodeStatus::Floundered)) return false;
  }
  return true;
}

std::optional<ClauseInstance> PartialProofTree::clause_instance(NodeId id) const {
  const ProofNode& n = node(id);
  if (n.kind != NodeKind::Internal && n.kind != NodeKind::UnitLeaf) return std::nullopt;
  ClauseInstance ci;
  ci.head = n.atom();
  ci.location = n.location;
  for (NodeId c : n.children) ci.body.push_back(node(c).annotated);
  return ci;
}

nlohmann::json PartialProofTree::node_json(NodeId id) const {
  const ProofNode& n = node(id);
  nlohmann::json j;
  j["id"] = n.id;
  j["atom"] = format_atom(n.atom());
  j["annotated"] = n.annotated.condition.has_value();
  if (n.annotated.condition) j["when"] = format_annotated(n.annotated);
  j["status"] = to_string(n.status);
  j["kind"] = to_string(n.kind);
  if (n.clause_index) {
    j["clause"] = {{"index", *n.clause_index}, {"location", n.location.str()}};
  } else {
    j["clause"] = nullptr;
  }
  nlohmann::json kids = nlohmann::json::array();
  for (NodeId c : n.children) kids.push_back(node_json(c));
  j["children"] = std::move(kids);
  return j;
}

nlohmann::json PartialProofTree::to_json() const {
  if (roots_.size() == 1) return node_json(roots_.front());
  nlohmann::json j = nlohmann::json::array();
  for (NodeId r : roots_) j.push_back(node_json(r));
  return j;
}

}  // namespace flounder
