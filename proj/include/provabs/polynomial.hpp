// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace provabs {

/// Coefficients whose magnitude falls below this after merging are dropped.
inline constexpr double kZeroTolerance = 1e-12;

/// True if `name` matches `[A-Za-z_][A-Za-z0-9_]*`.
bool is_valid_variable_name(std::string_view name) noexcept;

/// A variable raised to a positive power.
struct Factor {
  std::string variable;
  int exponent = 1;

  friend auto operator<=>(const Factor&, const Factor&) = default;
  friend bool operator==(const Factor&, const Factor&) = default;
};

/// Coefficient times a product of factors.
///
/// Factors are kept sorted by variable name with each variable at most
/// once, so two monomials are "like terms" exactly when their factor lists
/// compare equal.
class Monomial {
 public:
  Monomial() = default;

  /// Sorts factors, folds repeated variables into one exponent and validates
  /// names and exponents. Throws ValidationError.
  Monomial(double coefficient, std::vector<Factor> factors);

  double coefficient() const noexcept { return coefficient_; }
  const std::vector<Factor>& factors() const noexcept { return factors_; }
  bool is_constant() const noexcept { return factors_.empty(); }

  /// Exponent of `variable`, or 0 when absent.
  int exponent_of(std::string_view variable) const noexcept;

  Monomial with_coefficient(double coefficient) const;

  friend bool operator==(const Monomial&, const Monomial&) = default;

 private:
  double coefficient_ = 0.0;
  std::vector<Factor> factors_;
};

/// Canonical monomial order: lexicographic over the sorted (name, exponent)
/// sequence, constants first.
bool monomial_order(const Monomial& a, const Monomial& b) noexcept;

/// Merges like terms, drops zero coefficients and sorts.
std::vector<Monomial> canonicalize(std::vector<Monomial> monomials);

/// One result row's provenance: a key and a canonical sum of monomials.
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(std::string key, std::vector<Monomial> monomials);

  const std::string& key() const noexcept { return key_; }
  const std::vector<Monomial>& monomials() const noexcept { return monomials_; }
  std::size_t size() const noexcept { return monomials_.size(); }

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  std::string key_;
  std::vector<Monomial> monomials_;
};

/// The full multiset of result polynomials of one query.
class ProvenanceBundle {
 public:
  ProvenanceBundle() = default;

  /// Throws ValidationError on duplicate keys. Order of polynomials is kept.
  explicit ProvenanceBundle(std::vector<Polynomial> polynomials);

  const std::vector<Polynomial>& polynomials() const noexcept { return polynomials_; }

  /// Total number of monomials.
  std::size_t size() const noexcept;

  /// Every variable occurring in some monomial.
  std::set<std::string> variables() const;

  const Polynomial* find(std::string_view key) const noexcept;

  friend bool operator==(const ProvenanceBundle&, const ProvenanceBundle&) = default;

 private:
  std::vector<Polynomial> polynomials_;
};

inline std::size_t bundle_size(const ProvenanceBundle& bundle) noexcept { return bundle.size(); }

}  // namespace provabs
