// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>

#include "provabs/error.hpp"
#include "provabs/optimizer.hpp"
#include "support.hpp"

using namespace provabs;

namespace {

std::size_t count_of(const NodeCounts& c, const AbstractionTree& t, const char* name) { return c.count[*t.find(name)]; }

}  // namespace

TEST_CASE("compute_counts on the sample bundle") {
  const auto tree = testing::sample_tree();
  const auto counts = compute_counts(testing::sample_bundle(), tree);
  CHECK(count_of(counts, tree, "p1") == 2);
  CHECK(count_of(counts, tree, "p2") == 0);
  CHECK(count_of(counts, tree, "Special") == 2);
  CHECK(count_of(counts, tree, "Business") == 2);
  CHECK(count_of(counts, tree, "Standard") == 2);
  CHECK(count_of(counts, tree, "Plans") == 4);
  CHECK(counts.base_size == 0);
}

TEST_CASE("compute_counts: no tree variables, single monomial") {
  const auto tree = testing::sample_tree();
  const auto none = compute_counts(ProvenanceBundle({parse_polynomial("2*m1 + 3*m2 + 4", "k")}), tree);
  CHECK(none.base_size == 3);
  for (auto c : none.count) CHECK(c == 0);

  const auto one = compute_counts(ProvenanceBundle({parse_polynomial("2*y2", "k")}), tree);
  for (AbstractionTree::NodeId n = 0; n < tree.node_count(); ++n) {
    const bool on_path = tree.name(n) == "y2" || tree.is_ancestor(n, *tree.find("y2"));
    CHECK(one.count[n] == (on_path ? 1u : 0u));
  }
}

TEST_CASE("compute_counts: exponent is part of the signature") {
  const auto tree = testing::sample_tree();
  const auto c = compute_counts(ProvenanceBundle({parse_polynomial("1*b1*m1 + 1*b2*m1 + 1*e^2*m1", "k")}), tree);
  CHECK(count_of(c, tree, "SB") == 1);
  CHECK(count_of(c, tree, "Business") == 2);
}

TEST_CASE("optimize: sample bundle, bound 6") {
  const auto bundle = testing::sample_bundle();
  const auto tree = testing::sample_tree();
  const auto r = optimize(bundle, tree, 6);
  CHECK(r.feasible);
  CHECK(r.cut.names() == std::vector<std::string>{"Business", "Special", "p1", "p2"});
  CHECK(r.size == 6);
  CHECK(r.expressiveness == 4);
  CHECK(bundle_size(r.compressed) == 6);
  CHECK(r.original_size == 14);

  const auto brute = brute_force_optimize(bundle, tree, 6);
  CHECK(brute.expressiveness == 4);
  CHECK(brute.size == 6);
  CHECK(brute.cut.names() == r.cut.names());
}

TEST_CASE("optimize: full-size bound keeps every leaf") {
  const auto tree = testing::sample_tree();
  const auto r = optimize(testing::sample_bundle(), tree, 14);
  CHECK(r.feasible);
  CHECK(r.expressiveness == 11);
  CHECK(r.size == 14);
  CHECK(r.cut == leaf_cut(tree));
}

TEST_CASE("optimize: infeasible bound returns the root") {
  const auto r = optimize(testing::sample_bundle(), testing::sample_tree(), 3);
  CHECK_FALSE(r.feasible);
  CHECK(r.cut.names() == std::vector<std::string>{"Plans"});
  CHECK(r.size == 4);
  CHECK(diagnostics(r)["min_size"] == 4);
  CHECK_THROWS_AS(optimize(testing::sample_bundle(), testing::sample_tree(), 0), ValidationError);
}

TEST_CASE("optimize: base monomials count against the bound") {
  const auto tree = testing::sample_tree();
  const auto bundle = ProvenanceBundle({parse_polynomial("1*b1*m1 + 2*b2*m1 + 5*m1 + 7", "k")});
  const auto r = optimize(bundle, tree, 3);
  CHECK(r.base_size == 2);
  CHECK(r.size == 3);
  CHECK(r.feasible);
  CHECK_FALSE(optimize(bundle, tree, 2).feasible);
}

TEST_CASE("cut counts follow the product recurrence") {
  const auto tree = testing::sample_tree();
  CHECK(testing::oracle_cut_count(tree, tree.root()) == 31);
  CHECK(count_cuts(tree) == 31);
  CHECK(enumerate_cuts(tree).size() == 31);
  CHECK(count_cuts(parse_tree(R"({"name":"x"})")) == 1);
  CHECK(enumerate_cuts(parse_tree(R"({"name":"x"})")).size() == 1);
  CHECK_THROWS_AS(enumerate_cuts(tree, 30), ValidationError);

  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    const auto t = testing::random_tree(rng, std::uniform_int_distribution<int>(1, 12)(rng));
    const auto cuts = enumerate_cuts(t);
    CHECK(cuts.size() == testing::oracle_cut_count(t, t.root()));
    std::set<std::vector<AbstractionTree::NodeId>> distinct;
    for (const auto& c : cuts) distinct.insert(c.nodes());
    CHECK(distinct.size() == cuts.size());
  }
}

TEST_CASE("exactly-k sizes need not be monotone; the reported frontier is") {
  // a1..a3 carry distinct signatures, b1 and b2 share one.
  const auto tree = parse_tree(R"({"name":"r","children":[
      {"name":"A","children":[{"name":"a1"},{"name":"a2"},{"name":"a3"}]},
      {"name":"B","children":[{"name":"b1"},{"name":"b2"}]}]})");
  const auto bundle = ProvenanceBundle({parse_polynomial("1*a1*m1 + 1*a2*m2 + 1*a3*m3 + 1*b1*m1 + 1*b2*m1", "k")});
  const auto r = optimize(bundle, tree, 100);
  const auto& root = r.nodes[tree.root()];
  CHECK(root.exact == std::vector<std::size_t>{3, 4, 5, 4, 5});
  CHECK(root.frontier == std::vector<std::size_t>{3, 4, 4, 4, 5});

  // Bound 4 admits four nodes, {a1, a2, a3, B}.
  const auto r4 = optimize(bundle, tree, 4);
  CHECK(r4.cut.names() == std::vector<std::string>{"a1", "a2", "a3", "B"});
  CHECK(r4.size == 4);
  CHECK(brute_force_optimize(bundle, tree, 4).expressiveness == 4);
}

TEST_CASE("gaps in the exactly-k table are unreachable") {
  const auto tree = parse_tree(R"({"name":"r","children":[{"name":"a"},
      {"name":"B","children":[{"name":"b1"},{"name":"b2"},{"name":"b3"}]}]})");
  const auto r = optimize(ProvenanceBundle({parse_polynomial("1*a + 1*b1 + 1*b2*x + 1*b3*y", "k")}), tree, 100);
  const auto& root = r.nodes[tree.root()];
  CHECK(root.exact[2] == kUnreachable);
  CHECK(diagnostics(r)["nodes"][0]["exact"][2].is_null());
  CHECK(root.frontier[2] == root.frontier[3]);
}

TEST_CASE("diagnostics") {
  const auto tree = testing::sample_tree();
  const auto r = optimize(testing::sample_bundle(), tree, 6);
  const auto d = diagnostics(r);
  CHECK(d["nodes"][0]["name"] == "Plans");
  CHECK(d["nodes"][0]["frontier"][0] == 4);
  CHECK(d["nodes"][0]["chosen_k"] == 4);
  CHECK(d["nodes"][0]["split"] == nlohmann::json::array({1, 1, 2}));
  CHECK(d["base_size"] == 0);
  for (const auto& node : d["nodes"]) {
    if (node["children"].empty()) {
      CHECK(node["frontier"].size() == 1);
      CHECK(node["frontier"][0] == node["count"]);
    }
    CHECK(node["in_cut"] == (std::find(r.cut.names().begin(), r.cut.names().end(), node["name"]) != r.cut.names().end()));
  }
}

TEST_CASE("property: DP agrees with exhaustive search") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 120; ++trial) {
    const auto tree = testing::random_tree(rng, std::uniform_int_distribution<int>(1, 12)(rng));
    testing::BundleShape shape;
    shape.max_monomials = 40;
    const auto bundle = testing::random_bundle(rng, tree, shape);
    const std::size_t bound = std::uniform_int_distribution<std::size_t>(1, bundle.size() + 2)(rng);
    const auto dp = optimize(bundle, tree, bound);
    const auto brute = brute_force_optimize(bundle, tree, bound);
    CAPTURE(trial);
    CHECK(dp.feasible == brute.feasible);
    CHECK(dp.expressiveness == brute.expressiveness);
    CHECK(dp.size == brute.size);
    if (dp.feasible) CHECK(dp.size <= bound);

    // Size accounting against an independent rename-and-collect.
    const auto counts = compute_counts(bundle, tree);
    std::size_t sum = counts.base_size;
    for (auto n : dp.cut.nodes()) sum += counts.count[n];
    CHECK(sum == bundle_size(dp.compressed));
    CHECK(testing::table_size(testing::oracle_abstract(bundle, testing::oracle_leaf_map(tree, dp.cut.names()))) ==
          dp.size);

    for (const auto& node : dp.nodes) {
      CHECK(node.frontier.front() == node.count);
      CHECK(std::is_sorted(node.frontier.begin(), node.frontier.end()));
    }
  }
}

TEST_CASE("property: expressiveness grows with the bound, results are deterministic") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const auto tree = testing::random_tree(rng, std::uniform_int_distribution<int>(1, 12)(rng));
    const auto bundle = testing::random_bundle(rng, tree);
    std::size_t last = 0;
    for (std::size_t bound = 1; bound <= bundle.size() + 1; ++bound) {
      const auto r = optimize(bundle, tree, bound);
      if (r.feasible) {
        CHECK(r.expressiveness >= last);
        last = r.expressiveness;
      }
      CHECK(bundle_size(r.compressed) <= bundle_size(bundle));
    }
    const std::size_t bound = bundle.size() / 2 + 1;
    CHECK(result_to_json(optimize(bundle, tree, bound)).dump() == result_to_json(optimize(bundle, tree, bound)).dump());
    CHECK(diagnostics(optimize(bundle, tree, bound)).dump() == diagnostics(optimize(bundle, tree, bound)).dump());
  }
}

TEST_CASE("result json shape") {
  const auto r = optimize(testing::sample_bundle(), testing::sample_tree(), 6);
  const auto j = result_to_json(r);
  CHECK(j["feasible"] == true);
  CHECK(j["bound"] == 6);
  CHECK(j["size"] == 6);
  CHECK(j["expressiveness"] == 4);
  CHECK(j["base_size"] == 0);
  CHECK(j["cut"] == nlohmann::json::array({"Business", "Special", "p1", "p2"}));
  CHECK(j["mapping"]["b1"] == "Business");
  CHECK(j["mapping"]["y3"] == "Special");
  CHECK(j["mapping"].size() == 11);
}
