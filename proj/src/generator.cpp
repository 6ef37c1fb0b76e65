// SPDX-License-Identifier: Apache-2.0
#include "provabs/generator.hpp"

#include <limits>
#include <map>
#include <random>
#include <tuple>

#include "provabs/error.hpp"

namespace provabs {

std::string plan_variable(std::string_view plan) {
  if (plan == "E") return "e";
  for (const auto& p : kPlanCatalog) {
    if (p.plan == plan) return std::string(p.variable);
  }
  throw ValidationError("unknown plan '" + std::string(plan) + "'");
}

ProvenanceBundle revenue_provenance(const TelephonyDatabase& db) {
  std::map<int, const TelephonyDatabase::Customer*> customers;
  for (const auto& c : db.customers) {
    if (!customers.emplace(c.id, &c).second) throw ValidationError("duplicate customer id " + std::to_string(c.id));
  }
  std::map<std::pair<std::string, int>, std::int64_t> prices;
  for (const auto& p : db.prices) prices[{p.plan, p.month}] = p.cents;

  // (zip, plan variable, month) -> revenue in cents. Integer sums keep the
  // coefficients exact decimals.
  std::map<std::string, std::map<std::pair<std::string, int>, std::int64_t>> revenue;
  for (const auto& call : db.calls) {
    auto cust = customers.find(call.customer);
    if (cust == customers.end()) continue;
    auto price = prices.find({cust->second->plan, call.month});
    if (price == prices.end()) continue;
    revenue[cust->second->zip][{plan_variable(cust->second->plan), call.month}] += call.minutes * price->second;
  }

  std::vector<Polynomial> polys;
  polys.reserve(revenue.size());
  for (const auto& [zip, cells] : revenue) {
    std::vector<Monomial> terms;
    terms.reserve(cells.size());
    for (const auto& [cell, cents] : cells) {
      terms.emplace_back(static_cast<double>(cents) / 100.0,
                         std::vector<Factor>{{cell.first, 1}, {"m" + std::to_string(cell.second), 1}});
    }
    polys.emplace_back(zip, std::move(terms));
  }
  return ProvenanceBundle(std::move(polys));
}

TelephonyDatabase example_database() {
  TelephonyDatabase db;
  db.customers = {
      {1, "A", "10001"}, {2, "F1", "10001"}, {3, "SB1", "10002"}, {4, "Y1", "10001"},
      {5, "V", "10001"}, {6, "E", "10002"},  {7, "SB2", "10002"},
  };
  const std::int64_t january[] = {522, 364, 779, 253, 168, 1044, 697};
  const std::int64_t march[] = {480, 327, 805, 290, 121, 1130, 671};
  for (int id = 1; id <= 7; ++id) {
    db.calls.push_back({id, 1, january[id - 1]});
    db.calls.push_back({id, 3, march[id - 1]});
  }
  db.prices = {
      {"A", 1, 40},  {"F1", 1, 35}, {"Y1", 1, 30}, {"V", 1, 25},  {"SB1", 1, 10}, {"SB2", 1, 10}, {"E", 1, 5},
      {"A", 3, 50},  {"F1", 3, 35}, {"Y1", 3, 25}, {"V", 3, 20},  {"SB1", 3, 10}, {"SB2", 3, 15}, {"E", 3, 5},
  };
  return db;
}

AbstractionTree plans_tree() {
  return AbstractionTree(TreeSpec{
      "Plans",
      {
          {"Business", {{"SB", {{"b1", {}}, {"b2", {}}}}, {"e", {}}}},
          {"Special", {{"F", {{"f1", {}}, {"f2", {}}}}, {"Y", {{"y1", {}}, {"y2", {}}, {"y3", {}}}}, {"v", {}}}},
          {"Standard", {{"p1", {}}, {"p2", {}}}},
      },
  });
}

namespace {

// Uniform integer in [lo, hi] by rejection, independent of the standard
// library's distribution implementations.
std::int64_t uniform(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
  if (range == 0) return lo + static_cast<std::int64_t>(rng());
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return lo + static_cast<std::int64_t>(x % range);
}

void validate(const GenConfig& c) {
  if (c.customers < 1) throw ValidationError("customers must be ≥ 1");
  if (c.customers > 100'000'000) throw ValidationError("customers must be ≤ 100000000");
  if (c.months < 1 || c.months > 12) throw ValidationError("months must be in [1, 12]");
  if (c.zips < 1) throw ValidationError("zips must be ≥ 1");
  if (c.zips > 1'000'000) throw ValidationError("zips must be ≤ 1000000");
  if (c.min_duration < 1 || c.min_duration > c.max_duration) {
    throw ValidationError("duration range must satisfy 1 ≤ min ≤ max");
  }
  if (c.min_price_cents < 1 || c.min_price_cents > c.max_price_cents) {
    throw ValidationError("price range must satisfy 1 ≤ min ≤ max");
  }
}

}  // namespace

TelephonyDatabase generate_database(const GenConfig& config) {
  validate(config);
  std::mt19937_64 rng(config.seed);
  TelephonyDatabase db;

  for (const auto& plan : kPlanCatalog) {
    for (int month = 1; month <= config.months; ++month) {
      db.prices.push_back({std::string(plan.plan), month, uniform(rng, config.min_price_cents, config.max_price_cents)});
    }
  }
  db.customers.reserve(static_cast<std::size_t>(config.customers));
  db.calls.reserve(static_cast<std::size_t>(config.customers * config.months));
  for (std::int64_t i = 0; i < config.customers; ++i) {
    const int id = static_cast<int>(i + 1);
    const auto zip = 10001 + uniform(rng, 0, config.zips - 1);
    const auto plan = kPlanCatalog[static_cast<std::size_t>(uniform(rng, 0, kPlanCatalog.size() - 1))].plan;
    db.customers.push_back({id, std::string(plan), std::to_string(zip)});
    for (int month = 1; month <= config.months; ++month) {
      db.calls.push_back({id, month, uniform(rng, config.min_duration, config.max_duration)});
    }
  }
  return db;
}

GeneratedData generate(const GenConfig& config) {
  GeneratedData out{revenue_provenance(generate_database(config)), plans_tree(), Valuation(1.0)};
  for (auto leaf : out.tree.leaves()) out.baseline.assign(out.tree.name(leaf), 1.0);
  for (int month = 1; month <= config.months; ++month) out.baseline.assign("m" + std::to_string(month), 1.0);
  return out;
}

}  // namespace provabs
