// SPDX-License-Identifier: Apache-2.0
#include "provabs/abstraction.hpp"

#include <algorithm>
#include <set>

#include "provabs/error.hpp"
#include "provabs/io.hpp"

namespace provabs {

using nlohmann::json;
using NodeId = AbstractionTree::NodeId;

Cut validate_cut(const AbstractionTree& tree, const std::vector<std::string>& names) {
  std::vector<NodeId> nodes;
  std::vector<std::string> missing;
  for (const auto& n : names) {
    if (auto id = tree.find(n)) {
      nodes.push_back(*id);
    } else {
      missing.push_back(n);
    }
  }
  if (!missing.empty()) {
    std::string msg = "cut names unknown node";
    for (const auto& m : missing) msg += " '" + m + "'";
    throw ValidationError(msg, missing);
  }
  return validate_cut(tree, std::move(nodes));
}

Cut validate_cut(const AbstractionTree& tree, std::vector<NodeId> nodes) {
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  for (auto id : nodes) {
    if (id >= tree.node_count()) throw ValidationError("cut node id out of range");
  }
  // In preorder, an ancestor conflict always shows up between neighbours:
  // if a is an ancestor of c and a < b < c, then b lies inside a's subtree.
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (tree.is_ancestor(nodes[i - 1], nodes[i])) {
      const auto& a = tree.name(nodes[i - 1]);
      const auto& d = tree.name(nodes[i]);
      throw ValidationError("cut is not an antichain: '" + a + "' is an ancestor of '" + d + "'", {a, d});
    }
  }
  std::vector<bool> covered(tree.node_count(), false);
  for (auto id : nodes) {
    for (NodeId n = id; n < tree.subtree_end(id); ++n) covered[n] = true;
  }
  for (auto leaf : tree.leaves()) {
    if (!covered[leaf]) {
      const auto& l = tree.name(leaf);
      throw ValidationError("cut does not cover leaf '" + l + "'", {l});
    }
  }
  Cut cut;
  cut.nodes_ = std::move(nodes);
  for (auto id : cut.nodes_) cut.names_.push_back(tree.name(id));
  return cut;
}

Cut leaf_cut(const AbstractionTree& tree) { return validate_cut(tree, tree.leaves()); }

AbstractionMapping::AbstractionMapping(std::vector<MetaGroup> groups) : groups_(std::move(groups)) {
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    const auto& group = groups_[g];
    if (group.leaves.empty()) throw ValidationError("meta-variable '" + group.meta + "' groups no leaves");
    if (!group_index_.emplace(group.meta, g).second) {
      throw ValidationError("meta-variable '" + group.meta + "' appears twice");
    }
    for (const auto& leaf : group.leaves) {
      if (!leaf_to_meta_.emplace(leaf, group.meta).second) {
        throw ValidationError("leaf '" + leaf + "' is mapped twice");
      }
    }
  }
}

const std::string* AbstractionMapping::meta_of(std::string_view variable) const {
  auto it = leaf_to_meta_.find(variable);
  return it == leaf_to_meta_.end() ? nullptr : &it->second;
}

bool AbstractionMapping::is_meta(std::string_view name) const { return group_index_.contains(name); }

const MetaGroup* AbstractionMapping::group(std::string_view meta) const {
  auto it = group_index_.find(meta);
  return it == group_index_.end() ? nullptr : &groups_[it->second];
}

AbstractionMapping make_mapping(const AbstractionTree& tree, const Cut& cut) {
  std::vector<MetaGroup> groups;
  groups.reserve(cut.size());
  for (auto id : cut.nodes()) {
    MetaGroup g{tree.name(id), {}};
    for (auto leaf : tree.leaves_under(id)) g.leaves.push_back(tree.name(leaf));
    groups.push_back(std::move(g));
  }
  return AbstractionMapping(std::move(groups));
}

json mapping_to_json(const AbstractionMapping& mapping) {
  json out = json::object();
  for (const auto& [leaf, meta] : mapping.leaf_to_meta()) out[leaf] = meta;
  return out;
}

AbstractionMapping mapping_from_json(const json& leaf_to_meta, const std::vector<std::string>& cut_order) {
  if (!leaf_to_meta.is_object()) throw ValidationError("mapping: expected an object");
  std::vector<MetaGroup> groups;
  for (const auto& meta : cut_order) groups.push_back({meta, {}});
  for (const auto& [leaf, meta] : leaf_to_meta.items()) {
    if (!meta.is_string()) throw ValidationError("mapping." + leaf + ": expected a string");
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const MetaGroup& g) { return g.meta == meta.get<std::string>(); });
    if (it == groups.end()) {
      throw ValidationError("mapping." + leaf + ": '" + meta.get<std::string>() + "' is not in the cut");
    }
    it->leaves.push_back(leaf);
  }
  return AbstractionMapping(std::move(groups));
}

std::string format_monomial(const Monomial& m) {
  std::string out = format_number(m.coefficient());
  for (const auto& f : m.factors()) {
    out += '*' + f.variable;
    if (f.exponent != 1) out += '^' + std::to_string(f.exponent);
  }
  return out;
}

namespace {

template <typename IsLeaf>
std::optional<std::size_t> single_tree_factor(const Polynomial& poly, const Monomial& m, IsLeaf&& is_leaf) {
  std::optional<std::size_t> found;
  for (std::size_t i = 0; i < m.factors().size(); ++i) {
    if (!is_leaf(m.factors()[i].variable)) continue;
    if (found) {
      const auto& a = m.factors()[*found].variable;
      const auto& b = m.factors()[i].variable;
      throw ValidationError("monomial " + format_monomial(m) + " of polynomial '" + poly.key() +
                                "' contains two tree leaves '" + a + "' and '" + b + "'",
                            {poly.key(), format_monomial(m), a, b});
    }
    found = i;
  }
  return found;
}

[[noreturn]] void throw_collision(const std::string& name) {
  throw ValidationError("meta-variable '" + name + "' collides with a variable of the provenance", {name});
}

}  // namespace

void check_single_tree(const ProvenanceBundle& bundle, const AbstractionTree& tree) {
  auto is_leaf = [&](const std::string& v) {
    auto id = tree.find(v);
    if (id && !tree.is_leaf(*id)) throw_collision(v);
    return id.has_value();
  };
  for (const auto& poly : bundle.polynomials()) {
    for (const auto& m : poly.monomials()) single_tree_factor(poly, m, is_leaf);
  }
}

ProvenanceBundle apply_abstraction(const ProvenanceBundle& bundle, const AbstractionMapping& mapping) {
  auto is_leaf = [&](const std::string& v) {
    const std::string* meta = mapping.meta_of(v);
    if (!meta && mapping.is_meta(v)) throw_collision(v);
    return meta != nullptr;
  };
  std::vector<Polynomial> out;
  out.reserve(bundle.polynomials().size());
  for (const auto& poly : bundle.polynomials()) {
    std::vector<Monomial> terms;
    terms.reserve(poly.size());
    for (const auto& m : poly.monomials()) {
      auto idx = single_tree_factor(poly, m, is_leaf);
      if (!idx) {
        terms.push_back(m);
        continue;
      }
      std::vector<Factor> factors = m.factors();
      factors[*idx].variable = *mapping.meta_of(factors[*idx].variable);
      terms.emplace_back(m.coefficient(), std::move(factors));
    }
    out.emplace_back(poly.key(), std::move(terms));
  }
  return ProvenanceBundle(std::move(out));
}

ProvenanceBundle apply_abstraction(const ProvenanceBundle& bundle, const AbstractionTree& tree, const Cut& cut) {
  check_single_tree(bundle, tree);
  return apply_abstraction(bundle, make_mapping(tree, cut));
}

Valuation induced_valuation(const Valuation& meta_val, const AbstractionMapping& mapping) {
  Valuation out(meta_val.default_value());
  for (const auto& [name, value] : meta_val.assignments()) {
    if (!mapping.is_meta(name) && !mapping.meta_of(name)) out.assign(name, value);
  }
  for (const auto& [leaf, meta] : mapping.leaf_to_meta()) out.assign(leaf, meta_val.value_of(meta));
  return out;
}

Valuation default_meta_valuation(const ProvenanceBundle& bundle, const AbstractionMapping& mapping,
                                 const Valuation& base_val) {
  const std::set<std::string> occurring = bundle.variables();
  Valuation out(base_val.default_value());
  for (const auto& [name, value] : base_val.assignments()) {
    if (!mapping.is_meta(name) && !mapping.meta_of(name)) out.assign(name, value);
  }
  for (const auto& group : mapping.groups()) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& leaf : group.leaves) {
      if (occurring.contains(leaf)) {
        sum += base_val.value_of(leaf);
        ++n;
      }
    }
    if (n == 0) {
      for (const auto& leaf : group.leaves) sum += base_val.value_of(leaf);
      n = group.leaves.size();
    }
    out.assign(group.meta, sum / static_cast<double>(n));
  }
  return out;
}

}  // namespace provabs
