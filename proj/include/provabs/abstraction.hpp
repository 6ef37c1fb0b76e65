// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "provabs/polynomial.hpp"
#include "provabs/tree.hpp"
#include "provabs/valuation.hpp"

namespace provabs {

/// An antichain of tree nodes covering every leaf exactly once.
/// Nodes are held in document order.
class Cut {
 public:
  const std::vector<AbstractionTree::NodeId>& nodes() const noexcept { return nodes_; }
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::size_t size() const noexcept { return nodes_.size(); }

  friend bool operator==(const Cut&, const Cut&) = default;

 private:
  friend Cut validate_cut(const AbstractionTree&, const std::vector<std::string>&);
  friend Cut validate_cut(const AbstractionTree&, std::vector<AbstractionTree::NodeId>);

  std::vector<AbstractionTree::NodeId> nodes_;
  std::vector<std::string> names_;
};

/// Checks antichain and covering. Throws ValidationError naming the missing
/// node, the conflicting ancestor pair, or the uncovered leaf.
Cut validate_cut(const AbstractionTree& tree, const std::vector<std::string>& names);
Cut validate_cut(const AbstractionTree& tree, std::vector<AbstractionTree::NodeId> nodes);

/// The cut made of every leaf; abstracting with it changes nothing.
Cut leaf_cut(const AbstractionTree& tree);

struct MetaGroup {
  std::string meta;
  std::vector<std::string> leaves;  // document order

  friend bool operator==(const MetaGroup&, const MetaGroup&) = default;
};

/// Which meta-variable replaces each tree leaf.
class AbstractionMapping {
 public:
  AbstractionMapping() = default;

  /// Throws ValidationError if a leaf appears in two groups or a group is empty.
  explicit AbstractionMapping(std::vector<MetaGroup> groups);

  const std::vector<MetaGroup>& groups() const noexcept { return groups_; }
  const std::map<std::string, std::string, std::less<>>& leaf_to_meta() const noexcept { return leaf_to_meta_; }

  /// Meta-variable of a tree leaf; nullptr if `variable` is not a tree leaf.
  const std::string* meta_of(std::string_view variable) const;
  bool is_meta(std::string_view name) const;
  const MetaGroup* group(std::string_view meta) const;

  friend bool operator==(const AbstractionMapping&, const AbstractionMapping&) = default;

 private:
  std::vector<MetaGroup> groups_;
  std::map<std::string, std::string, std::less<>> leaf_to_meta_;
  std::map<std::string, std::size_t, std::less<>> group_index_;
};

AbstractionMapping make_mapping(const AbstractionTree& tree, const Cut& cut);

/// `{"b1":"Business", ...}`.
nlohmann::json mapping_to_json(const AbstractionMapping& mapping);

/// Rebuilds a mapping from a leaf→meta object, grouping in `cut_order`.
AbstractionMapping mapping_from_json(const nlohmann::json& leaf_to_meta, const std::vector<std::string>& cut_order);

/// Renames every tree leaf to its meta-variable and re-canonicalizes each
/// polynomial. Throws ValidationError when a monomial holds two tree leaves
/// or when a meta-variable name already occurs as a bundle variable.
ProvenanceBundle apply_abstraction(const ProvenanceBundle& bundle, const AbstractionMapping& mapping);
ProvenanceBundle apply_abstraction(const ProvenanceBundle& bundle, const AbstractionTree& tree, const Cut& cut);

/// Throws ValidationError if any monomial holds more than one leaf of `tree`,
/// or if an internal node name of `tree` occurs as a bundle variable.
void check_single_tree(const ProvenanceBundle& bundle, const AbstractionTree& tree);

/// Pushes meta-variable values down to the leaves they replace. Non-tree
/// variables keep their assignment in `meta_val`.
Valuation induced_valuation(const Valuation& meta_val, const AbstractionMapping& mapping);

/// Each meta-variable gets the mean of `base_val` over its leaves that occur
/// in `bundle`, or over all its leaves if none occur. Assignments to
/// non-tree variables pass through.
Valuation default_meta_valuation(const ProvenanceBundle& bundle, const AbstractionMapping& mapping,
                                 const Valuation& base_val);

/// Text rendering of one monomial, e.g. `208.8*m1*p1`.
std::string format_monomial(const Monomial& m);

}  // namespace provabs
