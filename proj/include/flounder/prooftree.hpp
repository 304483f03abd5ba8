// Partial proof trees: successful or floundered derivation trees whose extra
// leaf class is a delayed call that was never resumed.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flounder/reader.hpp"
#include "flounder/term.hpp"
#include "json.hpp"

namespace flounder {

using NodeId = std::size_t;

enum class NodeStatus : std::uint8_t { Succeeded, Floundered };

enum class NodeKind : std::uint8_t {
  UnitLeaf,     // matched a unit clause
  Internal,     // matched a clause with a body
  DelayedLeaf,  // delayed and never resumed
  Builtin,      // encoding test predicates
};

const char* to_string(NodeStatus s);
const char* to_string(NodeKind k);

struct ProofNode {
  NodeId id = 0;
  std::optional<NodeId> parent;
  // Final instantiation; when-wrapped for annotated body atoms.
  AnnotatedAtom annotated;
  // Short-circuit pair: identical at the end iff the subtree succeeded.
  Term acc_in;
  Term acc_out;
  std::vector<NodeId> children;
  std::optional<std::size_t> clause_index;
  SourceLocation location;
  NodeKind kind = NodeKind::UnitLeaf;
  NodeStatus status = NodeStatus::Succeeded;

  const Term& atom() const { return annotated.atom; }
};

struct ClauseInstance {
  Term head;
  std::vector<AnnotatedAtom> body;
  SourceLocation location;

  std::string render() const { return format_clause_instance(head, body); }
};

class PartialProofTree {
 public:
  // Nodes must be in parent-before-child order; roots have no parent.
  // Statuses are derived here from the accumulator pairs.
  PartialProofTree(std::vector<ProofNode> nodes, std::vector<NodeId> roots);
  PartialProofTree() = default;

  const std::vector<ProofNode>& nodes() const { return nodes_; }
  const ProofNode& node(NodeId id) const { return nodes_.at(id); }
  const std::vector<NodeId>& roots() const { return roots_; }
  // The single root of an atomic goal.
  NodeId root() const;
  std::size_t size() const { return nodes_.size(); }

  NodeStatus status(NodeId id) const { return nodes_.at(id).status; }
  // Floundered children first, body order within each group.
  std::vector<NodeId> children_ordered(NodeId id) const;
  // Delayed leaves in the subtree, left to right.
  std::vector<NodeId> floundered_leaves(NodeId id) const;
  // Status recomputed from the leaves instead of the accumulators.
  NodeStatus status_from_leaves(NodeId id) const;
  // True when accumulator and leaf based statuses agree on every node.
  bool statuses_consistent() const;

  // Instance of the clause used at an internal or unit node.
  std::optional<ClauseInstance> clause_instance(NodeId id) const;

  nlohmann::json to_json() const;
  nlohmann::json node_json(NodeId id) const;

 private:
  std::vector<ProofNode> nodes_;
  std::vector<NodeId> roots_;
};

}  // namespace flounder
