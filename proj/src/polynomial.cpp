// SPDX-License-Identifier: Apache-2.0
#include "provabs/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "provabs/error.hpp"

namespace provabs {

namespace {

bool is_ident_start(char c) noexcept {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
}

bool is_ident_char(char c) noexcept { return is_ident_start(c) || (c >= '0' && c <= '9'); }

}  // namespace

bool is_valid_variable_name(std::string_view name) noexcept {
  if (name.empty() || !is_ident_start(name.front())) return false;
  return std::all_of(name.begin() + 1, name.end(), is_ident_char);
}

Monomial::Monomial(double coefficient, std::vector<Factor> factors) : coefficient_(coefficient) {
  if (!std::isfinite(coefficient)) {
    throw ValidationError("non-finite coefficient");
  }
  for (const auto& f : factors) {
    if (!is_valid_variable_name(f.variable)) {
      throw ValidationError("invalid variable name '" + f.variable + "'");
    }
    if (f.exponent < 1) {
      throw ValidationError("exponent of '" + f.variable + "' must be positive, got " + std::to_string(f.exponent));
    }
  }
  std::sort(factors.begin(), factors.end(),
            [](const Factor& a, const Factor& b) { return a.variable < b.variable; });
  factors_.reserve(factors.size());
  for (auto& f : factors) {
    if (!factors_.empty() && factors_.back().variable == f.variable) {
      factors_.back().exponent += f.exponent;
    } else {
      factors_.push_back(std::move(f));
    }
  }
}

int Monomial::exponent_of(std::string_view variable) const noexcept {
  auto it = std::lower_bound(factors_.begin(), factors_.end(), variable,
                             [](const Factor& f, std::string_view v) { return f.variable < v; });
  return (it != factors_.end() && it->variable == variable) ? it->exponent : 0;
}

Monomial Monomial::with_coefficient(double coefficient) const {
  Monomial copy = *this;
  copy.coefficient_ = coefficient;
  return copy;
}

bool monomial_order(const Monomial& a, const Monomial& b) noexcept { return a.factors() < b.factors(); }

std::vector<Monomial> canonicalize(std::vector<Monomial> monomials) {
  std::stable_sort(monomials.begin(), monomials.end(), monomial_order);
  std::vector<Monomial> out;
  out.reserve(monomials.size());
  for (auto it = monomials.begin(); it != monomials.end();) {
    double sum = it->coefficient();
    auto run_end = std::next(it);
    while (run_end != monomials.end() && run_end->factors() == it->factors()) {
      sum += run_end->coefficient();
      ++run_end;
    }
    if (std::abs(sum) >= kZeroTolerance) {
      out.push_back(run_end == std::next(it) ? std::move(*it) : it->with_coefficient(sum));
    }
    it = run_end;
  }
  return out;
}

Polynomial::Polynomial(std::string key, std::vector<Monomial> monomials)
    : key_(std::move(key)), monomials_(canonicalize(std::move(monomials))) {}

ProvenanceBundle::ProvenanceBundle(std::vector<Polynomial> polynomials) : polynomials_(std::move(polynomials)) {
  std::unordered_set<std::string_view> seen;
  for (const auto& p : polynomials_) {
    if (!seen.insert(p.key()).second) {
      throw ValidationError("duplicate polynomial key '" + p.key() + "'");
    }
  }
}

std::size_t ProvenanceBundle::size() const noexcept {
  std::size_t n = 0;
  for (const auto& p : polynomials_) n += p.size();
  return n;
}

std::set<std::string> ProvenanceBundle::variables() const {
  std::set<std::string> vars;
  for (const auto& p : polynomials_) {
    for (const auto& m : p.monomials()) {
      for (const auto& f : m.factors()) vars.insert(f.variable);
    }
  }
  return vars;
}

const Polynomial* ProvenanceBundle::find(std::string_view key) const noexcept {
  for (const auto& p : polynomials_) {
    if (p.key() == key) return &p;
  }
  return nullptr;
}

}  // namespace provabs
