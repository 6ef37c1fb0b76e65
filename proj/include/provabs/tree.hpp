// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace provabs {

/// Nested description of a tree, as written by users.
struct TreeSpec {
  std::string name;
  std::vector<TreeSpec> children;
};

/// Rooted tree whose leaves are provenance variables and whose internal
/// nodes name candidate meta-variables.
///
/// Nodes are stored in preorder (document order), so the descendants of
/// node `i` are exactly the indices in `[i + 1, subtree_end(i))`. Node 0 is
/// the root.
class AbstractionTree {
 public:
  using NodeId = std::size_t;

  /// Validates unique, identifier-shaped names. Throws ValidationError.
  explicit AbstractionTree(const TreeSpec& root);

  std::size_t node_count() const noexcept { return nodes_.size(); }
  NodeId root() const noexcept { return 0; }

  const std::string& name(NodeId id) const { return nodes_.at(id).name; }
  const std::vector<NodeId>& children(NodeId id) const { return nodes_.at(id).children; }
  std::optional<NodeId> parent(NodeId id) const { return nodes_.at(id).parent; }
  bool is_leaf(NodeId id) const { return nodes_.at(id).children.empty(); }
  NodeId subtree_end(NodeId id) const { return nodes_.at(id).subtree_end; }

  std::optional<NodeId> find(std::string_view name) const;

  /// True if `ancestor` is a proper ancestor of `node`.
  bool is_ancestor(NodeId ancestor, NodeId node) const noexcept {
    return ancestor < node && node < nodes_[ancestor].subtree_end;
  }

  /// Leaves in document order.
  std::vector<NodeId> leaves() const;
  std::vector<NodeId> leaves_under(NodeId id) const;
  std::size_t leaf_count(NodeId id) const;

  TreeSpec to_spec() const;

 private:
  struct Node {
    std::string name;
    std::optional<NodeId> parent;
    std::vector<NodeId> children;
    NodeId subtree_end = 0;
  };

  NodeId add(const TreeSpec& spec, std::optional<NodeId> parent);

  std::vector<Node> nodes_;
  std::unordered_map<std::string, NodeId> index_;
};

/// Tree JSON: `{"name":"Plans","children":[{"name":"b1"}, ...]}`. A node
/// without `children` (or with an empty list) is a leaf.
AbstractionTree parse_tree(std::string_view input);
AbstractionTree tree_from_json(const nlohmann::json& doc);
nlohmann::json tree_to_json(const AbstractionTree& tree);

/// Number of valid cuts, saturating at SIZE_MAX.
std::size_t count_cuts(const AbstractionTree& tree);

}  // namespace provabs
