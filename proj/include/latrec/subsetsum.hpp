#pragma once

#include "latrec/arith.hpp"
#include "latrec/outcome.hpp"

#include <utility>

namespace latrec {

using BinaryVector = std::vector<int>;

/// p 2^ceil((n + p) / 2), the scale the multichannel solver expects.
BigInt multichannel_scale(std::size_t n, std::size_t p);
/// p^2 2^(ceil(L/2) + 1) with L = p(p-1)/2.
BigInt dependent_scale(std::size_t p);

/// LLL on [m diag(theta), -m X; 0, I_p]; the first reduced column, divided by
/// the gcd of its last p coordinates, must be a 0/1 vector e with X e = theta.
/// X is row-major n x p. Rows with theta_i = 0 are left out of the lattice and
/// only enforced by the final exact check. Requires m >= multichannel_scale(n, p).
Outcome<BinaryVector> solve_multichannel(const IntVector& theta, const IntMatrix& x, const BigInt& m,
                                         SolveStats* stats = nullptr);

/// Single equation <x, e> = y via solve_multichannel with n = 1.
Outcome<BinaryVector> solve_single(const BigInt& y, const IntVector& x, SolveStats* stats = nullptr);

/// Lexicographic (i, j), i < j.
std::vector<std::pair<std::size_t, std::size_t>> pair_order(std::size_t p);
/// x_i x_j in pair_order(p).
IntVector pair_products(const IntVector& x);

/// Finds xi over pair_order(p) with sum_{i<j} x_i x_j xi_ij = theta. Requires p >= 3.
Outcome<BinaryVector> solve_dependent_products(const BigInt& theta, const IntVector& x, SolveStats* stats = nullptr);

}  // namespace latrec
