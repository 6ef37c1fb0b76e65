// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "provabs/abstraction.hpp"
#include "provabs/polynomial.hpp"
#include "provabs/tree.hpp"

namespace provabs {

inline constexpr std::size_t kUnreachable = std::numeric_limits<std::size_t>::max();

/// Per-node compressed-size contribution.
///
/// A monomial's signature is (polynomial key, its non-tree factors, the
/// exponent of its tree leaf). Abstracting under a node merges monomials
/// exactly when their signatures agree, so `count[n]` is the number of
/// distinct signatures among monomials whose tree leaf lies below `n`.
struct NodeCounts {
  std::vector<std::size_t> count;  // indexed by NodeId
  std::size_t base_size = 0;       // monomials without any tree leaf
};

/// Throws ValidationError on the same preconditions as apply_abstraction.
NodeCounts compute_counts(const ProvenanceBundle& bundle, const AbstractionTree& tree);

/// DP state of one node, kept for diagnostics.
struct NodeFrontier {
  std::string name;
  std::vector<AbstractionTree::NodeId> children;
  std::size_t count = 0;
  /// exact[k-1]: least size of a cut of this subtree with exactly k nodes,
  /// kUnreachable when no such cut exists.
  std::vector<std::size_t> exact;
  /// frontier[k-1]: least size of a cut with at least k nodes. Non-decreasing,
  /// frontier[0] == count.
  std::vector<std::size_t> frontier;
  /// Set on nodes visited while reconstructing the chosen cut.
  std::optional<std::size_t> chosen_k;
  /// Per-child share of chosen_k, when the node was expanded.
  std::vector<std::size_t> chosen_split;
};

struct AbstractionResult {
  std::size_t bound = 0;
  bool feasible = false;
  Cut cut;
  AbstractionMapping mapping;
  ProvenanceBundle compressed;
  std::size_t size = 0;
  std::size_t expressiveness = 0;
  std::size_t base_size = 0;
  std::size_t original_size = 0;
  std::size_t distinct_variables = 0;  // variables occurring in `compressed`
  std::vector<NodeFrontier> nodes;     // empty for brute force
};

/// Picks the cut with the most nodes whose compressed size fits `bound`,
/// breaking ties by smaller size. If even the root alone exceeds the bound
/// the root cut is returned with `feasible == false`.
///
/// Bottom-up tree knapsack: a node's exactly-k table is its count at k = 1
/// and the min-plus convolution of its children's tables for k > 1.
AbstractionResult optimize(const ProvenanceBundle& bundle, const AbstractionTree& tree, std::size_t bound);

/// Reference implementation: materializes every cut. Throws ValidationError
/// if the tree has more than `max_cuts` cuts.
AbstractionResult brute_force_optimize(const ProvenanceBundle& bundle, const AbstractionTree& tree,
                                       std::size_t bound, std::size_t max_cuts = 1'000'000);

/// Every valid cut in enumeration order. Throws ValidationError past `max_cuts`.
std::vector<Cut> enumerate_cuts(const AbstractionTree& tree, std::size_t max_cuts = 1'000'000);

nlohmann::json result_to_json(const AbstractionResult& result);

/// Per-node counts, both DP tables, the chosen splits and the base size.
nlohmann::json diagnostics(const AbstractionResult& result);

}  // namespace provabs
