// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "provabs/polynomial.hpp"
#include "provabs/tree.hpp"
#include "provabs/valuation.hpp"

namespace provabs {

/// A calling plan and the provenance variable that parameterizes its price.
struct PlanInfo {
  std::string_view plan;
  std::string_view variable;
};

/// Plans drawn by the generator.
inline constexpr std::array<PlanInfo, 10> kPlanCatalog{{
    {"A", "p1"},
    {"B", "p2"},
    {"F1", "f1"},
    {"F2", "f2"},
    {"Y1", "y1"},
    {"Y2", "y2"},
    {"Y3", "y3"},
    {"V", "v"},
    {"SB1", "b1"},
    {"SB2", "b2"},
}};

/// Variable for a plan name, including the enterprise plan E -> e.
/// Throws ValidationError for unknown plans.
std::string plan_variable(std::string_view plan);

/// Customers, monthly call minutes and per-minute plan prices.
struct TelephonyDatabase {
  struct Customer {
    int id = 0;
    std::string plan;
    std::string zip;
  };
  struct Call {
    int customer = 0;
    int month = 0;
    std::int64_t minutes = 0;
  };
  struct Price {
    std::string plan;
    int month = 0;
    std::int64_t cents = 0;  // price per minute, in cents
  };

  std::vector<Customer> customers;
  std::vector<Call> calls;
  std::vector<Price> prices;
};

/// Provenance of the revenue-per-zip query
///   SELECT Zip, SUM(Calls.Dur * Plans.Price) ... GROUP BY Cust.Zip
/// with every price scaled by a plan variable and a month variable `m<i>`.
/// One polynomial per zip, keys in ascending order.
ProvenanceBundle revenue_provenance(const TelephonyDatabase& db);

/// The seven-customer, two-month sample database of the running example.
TelephonyDatabase example_database();

/// Plans / Business(SB(b1,b2), e) / Special(F(f1,f2), Y(y1,y2,y3), v) /
/// Standard(p1,p2).
AbstractionTree plans_tree();

struct GenConfig {
  std::int64_t customers = 1000;
  int months = 12;
  std::int64_t zips = 10;
  std::uint64_t seed = 1;
  std::int64_t min_duration = 50;
  std::int64_t max_duration = 1200;
  std::int64_t min_price_cents = 5;
  std::int64_t max_price_cents = 50;
};

struct GeneratedData {
  ProvenanceBundle bundle;
  AbstractionTree tree;
  Valuation baseline;
};

/// Random database for `config`. Uses std::mt19937_64 with rejection
/// sampling, so output is identical across platforms for a given seed.
/// Throws ValidationError on an invalid config.
TelephonyDatabase generate_database(const GenConfig& config);

/// Bundle of the generated database, the plans tree and an all-ones baseline.
GeneratedData generate(const GenConfig& config);

}  // namespace provabs
