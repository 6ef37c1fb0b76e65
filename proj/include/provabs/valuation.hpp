// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>

#include "provabs/polynomial.hpp"

namespace provabs {

/// Assignment of values to variable names. Names without an explicit
/// assignment take the default value, so every lookup is total.
class Valuation {
 public:
  Valuation() = default;
  explicit Valuation(double default_value) : default_(default_value) {}
  Valuation(std::map<std::string, double> assignments, double default_value);

  double value_of(std::string_view name) const noexcept;
  bool assigns(std::string_view name) const noexcept;
  void assign(std::string name, double value);

  double default_value() const noexcept { return default_; }

  /// Explicit assignments in name order.
  std::map<std::string, double> assignments() const;

 private:
  struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
  };

  std::unordered_map<std::string, double, StringHash, std::equal_to<>> values_;
  double default_ = 1.0;
};

/// Sum over monomials of coefficient times the product of valued factors.
/// Throws EvaluationError if the result is not finite.
double evaluate(const Polynomial& poly, const Valuation& valuation);

struct BundleEvaluation {
  std::map<std::string, double> values;
  std::chrono::nanoseconds duration{0};
};

/// Evaluates every polynomial. `duration` covers the evaluation pass only.
BundleEvaluation evaluate_bundle(const ProvenanceBundle& bundle, const Valuation& valuation);

}  // namespace provabs
