// SPDX-License-Identifier: Apache-2.0
#include "provabs/tree.hpp"

#include <limits>

#include "provabs/error.hpp"
#include "provabs/io.hpp"
#include "provabs/polynomial.hpp"

namespace provabs {

using nlohmann::json;

AbstractionTree::AbstractionTree(const TreeSpec& root) { add(root, std::nullopt); }

AbstractionTree::NodeId AbstractionTree::add(const TreeSpec& spec, std::optional<NodeId> parent) {
  if (!is_valid_variable_name(spec.name)) {
    throw ValidationError("invalid tree node name '" + spec.name + "'");
  }
  const NodeId id = nodes_.size();
  if (!index_.emplace(spec.name, id).second) {
    throw ValidationError("duplicate tree node name '" + spec.name + "'");
  }
  nodes_.push_back(Node{spec.name, parent, {}, 0});
  for (const auto& child : spec.children) {
    const NodeId c = add(child, id);
    nodes_[id].children.push_back(c);
  }
  nodes_[id].subtree_end = nodes_.size();
  return id;
}

std::optional<AbstractionTree::NodeId> AbstractionTree::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<AbstractionTree::NodeId> AbstractionTree::leaves_under(NodeId id) const {
  std::vector<NodeId> out;
  for (NodeId n = id; n < nodes_.at(id).subtree_end; ++n) {
    if (nodes_[n].children.empty()) out.push_back(n);
  }
  return out;
}

std::vector<AbstractionTree::NodeId> AbstractionTree::leaves() const { return leaves_under(root()); }

std::size_t AbstractionTree::leaf_count(NodeId id) const { return leaves_under(id).size(); }

TreeSpec AbstractionTree::to_spec() const {
  auto build = [this](auto&& self, NodeId id) -> TreeSpec {
    TreeSpec spec{nodes_[id].name, {}};
    for (NodeId c : nodes_[id].children) spec.children.push_back(self(self, c));
    return spec;
  };
  return build(build, root());
}

namespace {

TreeSpec spec_from_json(const json& doc, const std::string& path) {
  if (!doc.is_object()) throw ValidationError(path + ": expected an object");
  auto name = doc.find("name");
  if (name == doc.end() || !name->is_string()) throw ValidationError(path + ": missing string field 'name'");
  TreeSpec spec{name->get<std::string>(), {}};
  if (auto children = doc.find("children"); children != doc.end() && !children->is_null()) {
    if (!children->is_array()) throw ValidationError(path + ".children: expected an array");
    for (std::size_t i = 0; i < children->size(); ++i) {
      spec.children.push_back(spec_from_json((*children)[i], path + ".children[" + std::to_string(i) + "]"));
    }
  }
  return spec;
}

json spec_to_json(const TreeSpec& spec) {
  json node = {{"name", spec.name}};
  if (!spec.children.empty()) {
    json children = json::array();
    for (const auto& c : spec.children) children.push_back(spec_to_json(c));
    node["children"] = std::move(children);
  }
  return node;
}

}  // namespace

AbstractionTree tree_from_json(const json& doc) { return AbstractionTree(spec_from_json(doc, "$")); }

AbstractionTree parse_tree(std::string_view input) { return tree_from_json(parse_json(input)); }

json tree_to_json(const AbstractionTree& tree) { return spec_to_json(tree.to_spec()); }

std::size_t count_cuts(const AbstractionTree& tree) {
  constexpr std::size_t kMax = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> cuts(tree.node_count(), 1);
  for (std::size_t i = tree.node_count(); i-- > 0;) {
    if (tree.is_leaf(i)) continue;
    std::size_t product = 1;
    for (auto c : tree.children(i)) {
      product = (cuts[c] != 0 && product > kMax / cuts[c]) ? kMax : product * cuts[c];
    }
    cuts[i] = product == kMax ? kMax : product + 1;
  }
  return cuts[tree.root()];
}

}  // namespace provabs
