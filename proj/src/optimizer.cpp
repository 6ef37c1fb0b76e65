// SPDX-License-Identifier: Apache-2.0
#include "provabs/optimizer.hpp"

#include <algorithm>
#include <unordered_map>

#include "provabs/error.hpp"

namespace provabs {

using nlohmann::json;
using NodeId = AbstractionTree::NodeId;

namespace {

void require_bound(std::size_t bound) {
  if (bound < 1) throw ValidationError("bound must be ≥ 1");
}

std::size_t add_sizes(std::size_t a, std::size_t b) noexcept {
  return (a == kUnreachable || b == kUnreachable) ? kUnreachable : a + b;
}

// Min-plus convolution where both operands give at least one node to each side.
std::vector<std::size_t> convolve(const std::vector<std::size_t>& left, const std::vector<std::size_t>& right) {
  std::vector<std::size_t> out(left.size() + right.size(), kUnreachable);
  for (std::size_t a = 0; a < left.size(); ++a) {
    if (left[a] == kUnreachable) continue;
    for (std::size_t b = 0; b < right.size(); ++b) {
      // (a + 1) + (b + 1) nodes live at index a + b + 1.
      const std::size_t s = add_sizes(left[a], right[b]);
      out[a + b + 1] = std::min(out[a + b + 1], s);
    }
  }
  return out;
}

std::size_t distinct_variables(const ProvenanceBundle& b) { return b.variables().size(); }

}  // namespace

NodeCounts compute_counts(const ProvenanceBundle& bundle, const AbstractionTree& tree) {
  check_single_tree(bundle, tree);

  NodeCounts out;
  out.count.assign(tree.node_count(), 0);
  std::vector<std::vector<std::uint32_t>> sigs(tree.node_count());
  std::unordered_map<std::string, std::uint32_t> interned;
  std::string sig;

  for (const auto& poly : bundle.polynomials()) {
    for (const auto& m : poly.monomials()) {
      std::optional<NodeId> leaf;
      int exponent = 0;
      sig.assign(poly.key());
      sig += '\0';
      for (const auto& f : m.factors()) {
        if (auto id = tree.find(f.variable)) {
          leaf = id;
          exponent = f.exponent;
          continue;
        }
        sig += f.variable;
        sig += '^';
        sig += std::to_string(f.exponent);
        sig += '\0';
      }
      if (!leaf) {
        ++out.base_size;
        continue;
      }
      sig += '\0';
      sig += std::to_string(exponent);
      auto [it, inserted] = interned.try_emplace(sig, static_cast<std::uint32_t>(interned.size()));
      sigs[*leaf].push_back(it->second);
    }
  }

  for (NodeId n = tree.node_count(); n-- > 0;) {
    auto& mine = sigs[n];
    if (tree.is_leaf(n)) {
      std::sort(mine.begin(), mine.end());
      mine.erase(std::unique(mine.begin(), mine.end()), mine.end());
    } else {
      for (NodeId c : tree.children(n)) {
        std::vector<std::uint32_t> merged;
        merged.reserve(mine.size() + sigs[c].size());
        std::set_union(mine.begin(), mine.end(), sigs[c].begin(), sigs[c].end(), std::back_inserter(merged));
        mine = std::move(merged);
        std::vector<std::uint32_t>().swap(sigs[c]);
      }
    }
    out.count[n] = mine.size();
  }
  return out;
}

namespace {

AbstractionResult finish(const ProvenanceBundle& bundle, const AbstractionTree& tree, std::size_t bound,
                         bool feasible, Cut cut) {
  AbstractionResult r;
  r.bound = bound;
  r.feasible = feasible;
  r.mapping = make_mapping(tree, cut);
  r.compressed = apply_abstraction(bundle, r.mapping);
  r.expressiveness = cut.size();
  r.cut = std::move(cut);
  r.original_size = bundle.size();
  r.distinct_variables = distinct_variables(r.compressed);
  return r;
}

}  // namespace

AbstractionResult optimize(const ProvenanceBundle& bundle, const AbstractionTree& tree, std::size_t bound) {
  require_bound(bound);
  const NodeCounts counts = compute_counts(bundle, tree);
  const std::size_t n = tree.node_count();

  std::vector<NodeFrontier> nodes(n);
  // suffix[n][j]: convolution of children j.. of node n, indexed by k - 1.
  std::vector<std::vector<std::vector<std::size_t>>> suffix(n);

  for (NodeId id = n; id-- > 0;) {
    auto& node = nodes[id];
    node.name = tree.name(id);
    node.children = tree.children(id);
    node.count = counts.count[id];
    node.exact = {node.count};
    if (!node.children.empty()) {
      auto& tables = suffix[id];
      tables.resize(node.children.size());
      tables.back() = nodes[node.children.back()].exact;
      for (std::size_t j = node.children.size() - 1; j-- > 0;) {
        tables[j] = convolve(nodes[node.children[j]].exact, tables[j + 1]);
      }
      for (std::size_t k = 1; k < tables[0].size(); ++k) node.exact.push_back(tables[0][k]);
    }
    node.frontier = node.exact;
    for (std::size_t k = node.frontier.size() - 1; k-- > 0;) {
      node.frontier[k] = std::min(node.frontier[k], node.frontier[k + 1]);
    }
  }

  const auto& root = nodes[tree.root()];
  const std::size_t limit = bound >= counts.base_size ? bound - counts.base_size : 0;
  std::size_t best_k = 0;
  for (std::size_t k = root.frontier.size(); k > 0; --k) {
    if (root.frontier[k - 1] <= limit && bound >= counts.base_size) {
      best_k = k;
      break;
    }
  }
  const bool feasible = best_k != 0;
  if (!feasible) best_k = 1;

  std::vector<NodeId> chosen;
  auto backtrack = [&](auto&& self, NodeId id, std::size_t k) -> void {
    auto& node = nodes[id];
    node.chosen_k = k;
    if (k == 1) {
      chosen.push_back(id);
      return;
    }
    const auto& tables = suffix[id];
    const std::size_t m = node.children.size();
    std::size_t remaining = k;
    for (std::size_t j = 0; j < m; ++j) {
      const auto& child = nodes[node.children[j]].exact;
      std::size_t share = remaining;
      if (j + 1 < m) {
        const std::size_t target = tables[j][remaining - 1];
        const std::size_t rest_min = m - j - 1;
        share = 0;
        for (std::size_t a = std::min(child.size(), remaining - rest_min); a >= 1; --a) {
          const std::size_t rest = remaining - a;
          if (rest - 1 >= tables[j + 1].size()) continue;
          if (add_sizes(child[a - 1], tables[j + 1][rest - 1]) == target) {
            share = a;
            break;
          }
        }
      }
      node.chosen_split.push_back(share);
      self(self, node.children[j], share);
      remaining -= share;
    }
  };
  backtrack(backtrack, tree.root(), best_k);

  AbstractionResult r = finish(bundle, tree, bound, feasible, validate_cut(tree, chosen));
  r.base_size = counts.base_size;
  r.size = root.exact[best_k - 1] + counts.base_size;
  r.nodes = std::move(nodes);
  return r;
}

std::vector<Cut> enumerate_cuts(const AbstractionTree& tree, std::size_t max_cuts) {
  const std::size_t total = count_cuts(tree);
  if (total > max_cuts) {
    throw ValidationError("tree has " + (total == kUnreachable ? std::string("too many") : std::to_string(total)) +
                          " cuts, more than the enumeration limit " + std::to_string(max_cuts));
  }
  auto cuts_of = [&](auto&& self, NodeId id) -> std::vector<std::vector<NodeId>> {
    std::vector<std::vector<NodeId>> out{{id}};
    if (tree.is_leaf(id)) return out;
    std::vector<std::vector<NodeId>> partial{{}};
    for (NodeId c : tree.children(id)) {
      const auto child_cuts = self(self, c);
      std::vector<std::vector<NodeId>> next;
      next.reserve(partial.size() * child_cuts.size());
      for (const auto& p : partial) {
        for (const auto& cc : child_cuts) {
          auto combined = p;
          combined.insert(combined.end(), cc.begin(), cc.end());
          next.push_back(std::move(combined));
        }
      }
      partial = std::move(next);
    }
    out.insert(out.end(), partial.begin(), partial.end());
    return out;
  };
  std::vector<Cut> cuts;
  for (auto& nodes : cuts_of(cuts_of, tree.root())) cuts.push_back(validate_cut(tree, std::move(nodes)));
  return cuts;
}

AbstractionResult brute_force_optimize(const ProvenanceBundle& bundle, const AbstractionTree& tree,
                                       std::size_t bound, std::size_t max_cuts) {
  require_bound(bound);
  check_single_tree(bundle, tree);
  const auto cuts = enumerate_cuts(tree, max_cuts);

  const Cut* best = nullptr;
  std::size_t best_size = 0;
  for (const auto& cut : cuts) {
    const std::size_t size = apply_abstraction(bundle, make_mapping(tree, cut)).size();
    if (size > bound) continue;
    if (!best || cut.size() > best->size() || (cut.size() == best->size() && size < best_size)) {
      best = &cut;
      best_size = size;
    }
  }
  const bool feasible = best != nullptr;
  AbstractionResult r = finish(bundle, tree, bound, feasible,
                               feasible ? *best : validate_cut(tree, std::vector<NodeId>{tree.root()}));
  r.size = r.compressed.size();
  std::size_t base = 0;
  for (const auto& poly : bundle.polynomials()) {
    for (const auto& m : poly.monomials()) {
      const bool has_leaf = std::any_of(m.factors().begin(), m.factors().end(),
                                        [&](const Factor& f) { return tree.find(f.variable).has_value(); });
      base += has_leaf ? 0 : 1;
    }
  }
  r.base_size = base;
  return r;
}

json result_to_json(const AbstractionResult& r) {
  return {
      {"feasible", r.feasible},
      {"bound", r.bound},
      {"cut", r.cut.names()},
      {"size", r.size},
      {"expressiveness", r.expressiveness},
      {"base_size", r.base_size},
      {"original_size", r.original_size},
      {"distinct_variables", r.distinct_variables},
      {"mapping", mapping_to_json(r.mapping)},
  };
}

json diagnostics(const AbstractionResult& r) {
  auto table = [](const std::vector<std::size_t>& values) {
    json out = json::array();
    for (auto v : values) out.push_back(v == kUnreachable ? json(nullptr) : json(v));
    return out;
  };
  json nodes = json::array();
  for (std::size_t id = 0; id < r.nodes.size(); ++id) {
    const auto& node = r.nodes[id];
    json children = json::array();
    for (auto c : node.children) children.push_back(r.nodes[c].name);
    const bool in_cut = std::find(r.cut.nodes().begin(), r.cut.nodes().end(), id) != r.cut.nodes().end();
    nodes.push_back({
        {"name", node.name},
        {"children", std::move(children)},
        {"count", node.count},
        {"frontier", table(node.frontier)},
        {"exact", table(node.exact)},
        {"chosen_k", node.chosen_k ? json(*node.chosen_k) : json(nullptr)},
        {"split", node.chosen_split.empty() ? json(nullptr) : json(node.chosen_split)},
        {"in_cut", in_cut},
    });
  }
  const std::size_t min_size = r.nodes.empty() ? r.size : r.nodes.front().count + r.base_size;
  return {
      {"bound", r.bound},
      {"feasible", r.feasible},
      {"cut", r.cut.names()},
      {"size", r.size},
      {"base_size", r.base_size},
      {"original_size", r.original_size},
      {"min_size", min_size},
      {"nodes", std::move(nodes)},
  };
}

}  // namespace provabs
