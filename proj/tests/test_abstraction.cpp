// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>

#include "provabs/abstraction.hpp"
#include "provabs/error.hpp"
#include "provabs/io.hpp"
#include "support.hpp"

using namespace provabs;
using provabs::testing::close;

TEST_CASE("parse_tree: plans tree") {
  const AbstractionTree t = testing::sample_tree();
  CHECK(t.leaves().size() == 11);
  CHECK(t.node_count() - t.leaves().size() == 7);
  CHECK(t.name(t.root()) == "Plans");
  CHECK(t.is_ancestor(*t.find("Special"), *t.find("y2")));
  CHECK_FALSE(t.is_ancestor(*t.find("Business"), *t.find("y2")));
  CHECK(parse_tree(tree_to_json(t).dump()).to_spec().name == "Plans");
}

TEST_CASE("parse_tree: single leaf and errors") {
  const AbstractionTree leaf = parse_tree(R"({"name":"x"})");
  CHECK(leaf.node_count() == 1);
  CHECK(leaf.is_leaf(leaf.root()));
  CHECK(validate_cut(leaf, std::vector<std::string>{"x"}).size() == 1);
  CHECK(parse_tree(R"({"name":"x","children":[]})").is_leaf(0));

  CHECK_THROWS_AS(parse_tree(R"({"name":"r","children":[{"name":"F"},{"name":"G","children":[{"name":"F"}]}]})"),
                  ValidationError);
  CHECK_THROWS_AS(parse_tree(R"({"name":"r","children":[)"), ParseError);
  CHECK_THROWS_AS(parse_tree(R"({"children":[]})"), ValidationError);
  CHECK_THROWS_AS(parse_tree(R"({"name":"bad name"})"), ValidationError);
}

TEST_CASE("validate_cut") {
  const AbstractionTree t = testing::sample_tree();
  const Cut s1 = validate_cut(t, std::vector<std::string>{"Standard", "Business", "Special"});
  CHECK(s1.names() == std::vector<std::string>{"Business", "Special", "Standard"});
  CHECK(validate_cut(t, std::vector<std::string>{"Plans"}).size() == 1);
  CHECK(validate_cut(t, std::vector<std::string>{"SB", "e", "F", "Y", "v", "p1", "p2"}).size() == 7);

  try {
    validate_cut(t, std::vector<std::string>{"Plans", "Business"});
    FAIL("expected ancestor conflict");
  } catch (const ValidationError& e) {
    CHECK(e.details() == std::vector<std::string>{"Plans", "Business"});
  }
  try {
    validate_cut(t, std::vector<std::string>{"Business", "Special", "p1"});
    FAIL("expected uncovered leaf");
  } catch (const ValidationError& e) {
    CHECK(e.details() == std::vector<std::string>{"p2"});
  }
  try {
    validate_cut(t, std::vector<std::string>{"Business", "Nope"});
    FAIL("expected missing name");
  } catch (const ValidationError& e) {
    CHECK(e.details() == std::vector<std::string>{"Nope"});
  }
  // Conflict between non-adjacent names in the input list.
  CHECK_THROWS_AS(validate_cut(t, std::vector<std::string>{"y1", "Business", "Special", "Standard"}), ValidationError);
}

TEST_CASE("apply_abstraction: plan-group and root cuts on P1") {
  const auto bundle = testing::sample_bundle();
  const auto tree = testing::sample_tree();
  const ProvenanceBundle p1({bundle.polynomials()[0]});

  const auto s1 = apply_abstraction(p1, tree, validate_cut(tree, std::vector<std::string>{"Business", "Special", "Standard"}));
  const auto& m = s1.polynomials()[0].monomials();
  REQUIRE(m.size() == 4);
  // Canonical order: m1*Special, m1*Standard, m3*Special, m3*Standard.
  CHECK(m[0].factors() == std::vector<Factor>{{"Special", 1}, {"m1", 1}});
  CHECK(close(m[0].coefficient(), 245.3));
  CHECK(m[1].factors() == std::vector<Factor>{{"Special", 1}, {"m3", 1}});
  CHECK(close(m[1].coefficient(), 211.15));
  CHECK(m[2].factors() == std::vector<Factor>{{"Standard", 1}, {"m1", 1}});
  CHECK(close(m[2].coefficient(), 208.8));
  CHECK(m[3].factors() == std::vector<Factor>{{"Standard", 1}, {"m3", 1}});
  CHECK(close(m[3].coefficient(), 240));

  const auto s5 = apply_abstraction(p1, tree, validate_cut(tree, std::vector<std::string>{"Plans"}));
  const auto& n = s5.polynomials()[0].monomials();
  REQUIRE(n.size() == 2);
  CHECK(n[0].factors() == std::vector<Factor>{{"Plans", 1}, {"m1", 1}});
  CHECK(close(n[0].coefficient(), 208.8 + 127.4 + 75.9 + 42));
  CHECK(close(n[0].coefficient(), 454.1));
  CHECK(close(n[1].coefficient(), 451.15));
  CHECK(s5.variables().size() == 3);
}

TEST_CASE("apply_abstraction: size after the plan-group cut") {
  const auto tree = testing::sample_tree();
  const auto out = apply_abstraction(testing::sample_bundle(), tree,
                                     validate_cut(tree, std::vector<std::string>{"Business", "Special", "Standard"}));
  CHECK(bundle_size(out) == 6);
  CHECK(out.polynomials()[0].key() == "10001");
  CHECK(out.polynomials()[1].key() == "10002");
}

TEST_CASE("apply_abstraction: precondition and collisions") {
  const auto tree = testing::sample_tree();
  const auto cut = validate_cut(tree, std::vector<std::string>{"Plans"});
  try {
    apply_abstraction(ProvenanceBundle({parse_polynomial("3*b1*e*m1", "z")}), tree, cut);
    FAIL("expected precondition violation");
  } catch (const ValidationError& e) {
    CHECK(e.details() == std::vector<std::string>{"z", "3*b1*e*m1", "b1", "e"});
  }
  CHECK_THROWS_AS(apply_abstraction(ProvenanceBundle({parse_polynomial("3*b1*Plans", "z")}), tree, cut),
                  ValidationError);
  // An internal node not in the cut still may not appear as a variable.
  CHECK_THROWS_AS(check_single_tree(ProvenanceBundle({parse_polynomial("3*b1*SB", "z")}), tree), ValidationError);
}

TEST_CASE("induced_valuation") {
  const auto tree = testing::sample_tree();
  const auto s5 = make_mapping(tree, validate_cut(tree, std::vector<std::string>{"Plans"}));
  const Valuation v5 = induced_valuation(Valuation({{"Plans", 2.0}}, 1.0), s5);
  for (auto leaf : tree.leaves()) CHECK(v5.value_of(tree.name(leaf)) == 2.0);

  const auto s1 = make_mapping(tree, validate_cut(tree, std::vector<std::string>{"Business", "Special", "Standard"}));
  const Valuation v1 = induced_valuation(Valuation({{"Business", 1.1}, {"Special", 1}, {"Standard", 1}, {"m1", 0.5}}, 1.0), s1);
  for (const char* b : {"b1", "b2", "e"}) CHECK(v1.value_of(b) == 1.1);
  for (const char* s : {"f1", "f2", "y1", "y2", "y3", "v", "p1", "p2"}) CHECK(v1.value_of(s) == 1.0);
  CHECK(v1.value_of("m1") == 0.5);
  CHECK_FALSE(v1.assigns("Business"));

  const Valuation empty = induced_valuation(Valuation(1.0), s1);
  for (auto leaf : tree.leaves()) CHECK(empty.value_of(tree.name(leaf)) == 1.0);
}

TEST_CASE("default_meta_valuation averages occurring leaves") {
  const auto tree = testing::sample_tree();
  const auto bundle = ProvenanceBundle({parse_polynomial("1*f1*m1 + 2*y1*m1 + 3*v*m1", "k")});
  const auto mapping = make_mapping(tree, validate_cut(tree, std::vector<std::string>{"Business", "Special", "Standard"}));
  const Valuation base({{"f1", 0.9}, {"y1", 1.1}, {"v", 1.0}, {"f2", 7.0}, {"b1", 2.0}, {"b2", 4.0}, {"e", 6.0},
                        {"m1", 0.7}},
                       1.0);
  const Valuation d = default_meta_valuation(bundle, mapping, base);
  CHECK(close(d.value_of("Special"), 1.0));    // f2 does not occur
  CHECK(close(d.value_of("Business"), 4.0));   // nothing occurs: all of b1, b2, e
  CHECK(close(d.value_of("Standard"), 1.0));   // defaults
  CHECK(d.value_of("m1") == 0.7);

  const Valuation constant(2.5);
  CHECK(default_meta_valuation(bundle, mapping, constant).value_of("Special") == 2.5);
}

TEST_CASE("mapping json round trip") {
  const auto tree = testing::sample_tree();
  const auto cut = validate_cut(tree, std::vector<std::string>{"Business", "Special", "p1", "p2"});
  const auto mapping = make_mapping(tree, cut);
  CHECK(mapping.leaf_to_meta().at("b1") == "Business");
  CHECK(mapping.leaf_to_meta().at("p2") == "p2");
  // The JSON object keeps no leaf order, so compare the assignment itself.
  const auto back = mapping_from_json(mapping_to_json(mapping), cut.names());
  CHECK(back.leaf_to_meta() == mapping.leaf_to_meta());
  CHECK(back.groups().size() == mapping.groups().size());
  CHECK_THROWS_AS(mapping_from_json(nlohmann::json{{"b1", "Nope"}}, cut.names()), ValidationError);
}

TEST_CASE("property: commutativity, size and refinement") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> val(-2.0, 2.0);
  for (int trial = 0; trial < 150; ++trial) {
    const auto tree = testing::random_tree(rng, std::uniform_int_distribution<int>(1, 12)(rng));
    const auto bundle = testing::random_bundle(rng, tree);
    const auto names = testing::random_cut(rng, tree);
    const Cut cut = validate_cut(tree, names);
    const auto mapping = make_mapping(tree, cut);
    const auto compressed = apply_abstraction(bundle, mapping);

    // Matches an independent rename-and-collect oracle term for term.
    const auto table = testing::oracle_abstract(bundle, testing::oracle_leaf_map(tree, names));
    CHECK(bundle_size(compressed) == testing::table_size(table));
    CHECK(bundle_size(compressed) <= bundle_size(bundle));

    // Every tree leaf occurring in the bundle is mapped.
    for (const auto& v : bundle.variables()) {
      if (tree.find(v)) CHECK(mapping.meta_of(v) != nullptr);
    }

    Valuation meta(val(rng));
    for (const auto& g : mapping.groups()) meta.assign(g.meta, val(rng));
    for (int i = 1; i <= 4; ++i) meta.assign("m" + std::to_string(i), val(rng));
    const auto lhs = evaluate_bundle(compressed, meta).values;
    const auto rhs = evaluate_bundle(bundle, induced_valuation(meta, mapping)).values;
    for (const auto& p : bundle.polynomials()) {
      const double l = lhs.count(p.key()) ? lhs.at(p.key()) : 0.0;
      CHECK(close(l, rhs.at(p.key()), 1e-6, 1e-9));
    }

    // Coarsening: merge one cut node into its parent's whole subtree.
    const auto leaf_identity = apply_abstraction(bundle, make_mapping(tree, leaf_cut(tree)));
    CHECK(leaf_identity == bundle);
    if (cut.size() > 1) {
      const auto node = cut.nodes()[std::uniform_int_distribution<std::size_t>(0, cut.size() - 1)(rng)];
      if (auto parent = tree.parent(node)) {
        std::vector<AbstractionTree::NodeId> coarse{*parent};
        for (auto n : cut.nodes()) {
          if (!tree.is_ancestor(*parent, n)) coarse.push_back(n);
        }
        const auto coarser = apply_abstraction(bundle, make_mapping(tree, validate_cut(tree, coarse)));
        CHECK(bundle_size(coarser) <= bundle_size(compressed));
      }
    }
  }
}
