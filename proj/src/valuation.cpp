// SPDX-License-Identifier: Apache-2.0
#include "provabs/valuation.hpp"

#include <cmath>
#include <vector>

#include "provabs/error.hpp"

namespace provabs {

Valuation::Valuation(std::map<std::string, double> assignments, double default_value) : default_(default_value) {
  for (auto& [name, value] : assignments) values_.emplace(name, value);
}

double Valuation::value_of(std::string_view name) const noexcept {
  auto it = values_.find(name);
  return it == values_.end() ? default_ : it->second;
}

bool Valuation::assigns(std::string_view name) const noexcept { return values_.find(name) != values_.end(); }

void Valuation::assign(std::string name, double value) { values_.insert_or_assign(std::move(name), value); }

std::map<std::string, double> Valuation::assignments() const { return {values_.begin(), values_.end()}; }

namespace {

double power(double base, int exponent) noexcept {
  double result = 1.0;
  for (; exponent > 0; --exponent) result *= base;
  return result;
}

double evaluate_unchecked(const Polynomial& poly, const Valuation& valuation) noexcept {
  double total = 0.0;
  for (const auto& m : poly.monomials()) {
    double term = m.coefficient();
    for (const auto& f : m.factors()) {
      const double v = valuation.value_of(f.variable);
      term *= f.exponent == 1 ? v : power(v, f.exponent);
    }
    total += term;
  }
  return total;
}

[[noreturn]] void throw_non_finite(const Polynomial& poly) {
  throw EvaluationError("evaluation of polynomial '" + poly.key() + "' is not finite");
}

}  // namespace

double evaluate(const Polynomial& poly, const Valuation& valuation) {
  const double value = evaluate_unchecked(poly, valuation);
  if (!std::isfinite(value)) throw_non_finite(poly);
  return value;
}

BundleEvaluation evaluate_bundle(const ProvenanceBundle& bundle, const Valuation& valuation) {
  const auto& polys = bundle.polynomials();
  std::vector<double> values(polys.size());

  const auto start = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < polys.size(); ++i) values[i] = evaluate_unchecked(polys[i], valuation);
  const auto stop = std::chrono::steady_clock::now();

  BundleEvaluation out;
  out.duration = std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start);
  for (std::size_t i = 0; i < polys.size(); ++i) {
    if (!std::isfinite(values[i])) throw_non_finite(polys[i]);
    out.values.emplace(polys[i].key(), values[i]);
  }
  return out;
}

}  // namespace provabs
