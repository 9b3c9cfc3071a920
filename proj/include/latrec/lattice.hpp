#pragma once

#include "latrec/arith.hpp"

#include <optional>

namespace latrec {

/// Square nonsingular integer basis. columns[j] is the basis vector b_j.
class LatticeBasis {
 public:
  /// Throws std::invalid_argument if the columns are not d vectors of length d
  /// or if the exact determinant is zero.
  explicit LatticeBasis(std::vector<IntVector> columns);

  std::size_t dimension() const { return columns_.size(); }
  const std::vector<IntVector>& columns() const { return columns_; }
  const IntVector& column(std::size_t j) const { return columns_[j]; }

  friend bool operator==(const LatticeBasis&, const LatticeBasis&) = default;

 private:
  struct Unchecked {};
  LatticeBasis(std::vector<IntVector> columns, Unchecked) : columns_(std::move(columns)) {}
  friend LatticeBasis lll_reduce(const LatticeBasis&, const Rational&);

  std::vector<IntVector> columns_;
};

/// Exact determinant of the matrix whose columns are given (Bareiss elimination).
BigInt determinant(const std::vector<IntVector>& columns);

BigInt dot(const IntVector& a, const IntVector& b);
BigInt norm_sq(const IntVector& v);

/// Integral LLL reduction. Output columns span the same lattice, are size
/// reduced, and satisfy the Lovasz condition with parameter delta.
LatticeBasis lll_reduce(const LatticeBasis& basis, const Rational& delta = Rational(3, 4));

/// Minimum-norm nonzero vector sum_i c_i b_i over |c_i| <= coeff_bound.
/// Refuses d > 8. Without a bound, uses default_coeff_bound().
IntVector shortest_vector_bruteforce(const LatticeBasis& basis, std::optional<BigInt> coeff_bound = std::nullopt);

/// Cramer/Hadamard bound on the coefficients of any vector no longer than the
/// shortest basis column: ceil(sqrt(min|b|^2 * prod_{j!=i}|b_j|^2 / det^2)), max over i.
BigInt default_coeff_bound(const LatticeBasis& basis);

}  // namespace latrec
