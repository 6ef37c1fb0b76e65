// SPDX-License-Identifier: Apache-2.0
// Shared fixtures, reference oracles and random instance generators for the
// test suites. Nothing here calls into the code paths it is used to check.
#pragma once

#include <cmath>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "provabs/abstraction.hpp"
#include "provabs/io.hpp"
#include "provabs/polynomial.hpp"
#include "provabs/tree.hpp"

namespace provabs::testing {

inline constexpr const char* kP1 =
    "208.8*p1*m1 + 240*p1*m3 + 127.4*f1*m1 + 114.45*f1*m3 + 75.9*y1*m1 + 72.5*y1*m3 + 42*v*m1 + 24.2*v*m3";
inline constexpr const char* kP2 = "77.9*b1*m1 + 80.5*b1*m3 + 52.2*e*m1 + 56.5*e*m3 + 69.7*b2*m1 + 100.65*b2*m3";

inline ProvenanceBundle sample_bundle() {
  return ProvenanceBundle({parse_polynomial(kP1, "10001"), parse_polynomial(kP2, "10002")});
}

inline constexpr const char* kPlansTreeJson = R"({"name":"Plans","children":[
  {"name":"Business","children":[{"name":"SB","children":[{"name":"b1"},{"name":"b2"}]},{"name":"e"}]},
  {"name":"Special","children":[{"name":"F","children":[{"name":"f1"},{"name":"f2"}]},
                                {"name":"Y","children":[{"name":"y1"},{"name":"y2"},{"name":"y3"}]},
                                {"name":"v"}]},
  {"name":"Standard","children":[{"name":"p1"},{"name":"p2"}]}]})";

inline AbstractionTree sample_tree() { return parse_tree(kPlansTreeJson); }

inline bool close(double a, double b, double rel = 1e-9, double abs = 1e-12) {
  return std::abs(a - b) <= std::max(abs, rel * std::max(std::abs(a), std::abs(b)));
}

// ---- oracles ---------------------------------------------------------------

/// Direct evaluation with std::pow over a plain name->value map.
inline double oracle_evaluate(const Polynomial& p, const std::map<std::string, double>& values, double fallback) {
  double total = 0.0;
  for (const auto& m : p.monomials()) {
    double term = m.coefficient();
    for (const auto& f : m.factors()) {
      auto it = values.find(f.variable);
      term *= std::pow(it == values.end() ? fallback : it->second, f.exponent);
    }
    total += term;
  }
  return total;
}

/// Leaf -> covering cut node, found by walking up parents.
inline std::map<std::string, std::string> oracle_leaf_map(const AbstractionTree& tree,
                                                          const std::vector<std::string>& cut) {
  std::map<std::string, std::string> out;
  for (auto leaf : tree.leaves()) {
    std::optional<AbstractionTree::NodeId> n = leaf;
    while (n) {
      const auto& name = tree.name(*n);
      if (std::find(cut.begin(), cut.end(), name) != cut.end()) {
        out[tree.name(leaf)] = name;
        break;
      }
      n = tree.parent(*n);
    }
  }
  return out;
}

/// Abstraction by renaming and collecting like terms into a std::map keyed
/// by (polynomial key, rendered factor list). Returns key -> (term -> coef).
using TermTable = std::map<std::string, std::map<std::string, double>>;

inline TermTable oracle_abstract(const ProvenanceBundle& b, const std::map<std::string, std::string>& leaf_map) {
  TermTable out;
  for (const auto& p : b.polynomials()) {
    auto& table = out[p.key()];
    for (const auto& m : p.monomials()) {
      std::map<std::string, int> factors;
      for (const auto& f : m.factors()) {
        auto it = leaf_map.find(f.variable);
        factors[it == leaf_map.end() ? f.variable : it->second] += f.exponent;
      }
      std::string term;
      for (const auto& [v, e] : factors) term += v + "^" + std::to_string(e) + "*";
      table[term] += m.coefficient();
    }
  }
  for (auto& [k, table] : out) {
    for (auto it = table.begin(); it != table.end();) {
      it = std::abs(it->second) < 1e-12 ? table.erase(it) : std::next(it);
    }
  }
  return out;
}

inline std::size_t table_size(const TermTable& t) {
  std::size_t n = 0;
  for (const auto& [k, table] : t) n += table.size();
  return n;
}

/// cuts(leaf) = 1, cuts(n) = 1 + prod cuts(children).
inline std::size_t oracle_cut_count(const AbstractionTree& tree, AbstractionTree::NodeId n) {
  if (tree.is_leaf(n)) return 1;
  std::size_t prod = 1;
  for (auto c : tree.children(n)) prod *= oracle_cut_count(tree, c);
  return prod + 1;
}

// ---- random instances ------------------------------------------------------

/// Tree with `leaves` leaves named x0.., internal nodes g0.. .
inline AbstractionTree random_tree(std::mt19937_64& rng, int leaves) {
  int next_leaf = 0, next_inner = 0;
  auto build = [&](auto&& self, int n, bool root) -> TreeSpec {
    if (n == 1 && !(root && std::uniform_int_distribution<int>(0, 3)(rng) == 0)) {
      return {"x" + std::to_string(next_leaf++), {}};
    }
    TreeSpec node{"g" + std::to_string(next_inner++), {}};
    if (n == 1) {
      node.children.push_back(self(self, 1, false));
      return node;
    }
    int parts = std::uniform_int_distribution<int>(1, std::min(n, 4))(rng);
    std::vector<int> sizes(parts, 1);
    for (int i = parts; i < n; ++i) sizes[std::uniform_int_distribution<int>(0, parts - 1)(rng)]++;
    for (int s : sizes) node.children.push_back(self(self, s, false));
    return node;
  };
  return AbstractionTree(build(build, leaves, true));
}

/// Random valid cut by random descent.
inline std::vector<std::string> random_cut(std::mt19937_64& rng, const AbstractionTree& tree) {
  std::vector<std::string> out;
  auto walk = [&](auto&& self, AbstractionTree::NodeId n) -> void {
    if (tree.is_leaf(n) || std::uniform_real_distribution<double>(0, 1)(rng) < 0.35) {
      out.push_back(tree.name(n));
      return;
    }
    for (auto c : tree.children(n)) self(self, c);
  };
  walk(walk, tree.root());
  return out;
}

struct BundleShape {
  int polynomials = 3;
  int max_monomials = 60;
  double tree_probability = 0.85;
  int contexts = 4;  // size of the non-tree variable pool
  int max_exponent = 2;
};

/// Each monomial holds at most one tree leaf; context variables are drawn
/// from a small pool so that abstraction actually merges terms.
inline ProvenanceBundle random_bundle(std::mt19937_64& rng, const AbstractionTree& tree, const BundleShape& shape = {}) {
  const auto leaves = tree.leaves();
  std::uniform_real_distribution<double> coef(0.1, 5.0);
  std::uniform_int_distribution<int> exp(1, shape.max_exponent);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Polynomial> polys;
  for (int p = 0; p < shape.polynomials; ++p) {
    const int n = std::uniform_int_distribution<int>(0, shape.max_monomials)(rng);
    std::vector<Monomial> terms;
    for (int i = 0; i < n; ++i) {
      std::vector<Factor> factors;
      if (unit(rng) < shape.tree_probability) {
        auto leaf = leaves[std::uniform_int_distribution<std::size_t>(0, leaves.size() - 1)(rng)];
        factors.push_back({tree.name(leaf), exp(rng)});
      }
      const int ctx = std::uniform_int_distribution<int>(0, 2)(rng);
      for (int c = 0; c < ctx; ++c) {
        factors.push_back({"m" + std::to_string(std::uniform_int_distribution<int>(1, shape.contexts)(rng)), exp(rng)});
      }
      const double sign = unit(rng) < 0.3 ? -1.0 : 1.0;
      terms.emplace_back(sign * coef(rng), std::move(factors));
    }
    polys.emplace_back("k" + std::to_string(p), std::move(terms));
  }
  return ProvenanceBundle(std::move(polys));
}

}  // namespace provabs::testing
