#include "latrec/subsetsum.hpp"

#include "latrec/lattice.hpp"

#include <stdexcept>

namespace latrec {

BigInt multichannel_scale(std::size_t n, std::size_t p) {
  return BigInt(static_cast<unsigned long>(p)) * pow2_int((n + p + 1) / 2);
}

BigInt dependent_scale(std::size_t p) {
  const std::size_t l = p * (p - 1) / 2;
  return BigInt(static_cast<unsigned long>(p * p)) * pow2_int((l + 1) / 2 + 1);
}

namespace {

bool satisfies(const IntVector& theta, const IntMatrix& x, const BinaryVector& e) {
  for (std::size_t i = 0; i < theta.size(); ++i) {
    BigInt s = 0;
    for (std::size_t k = 0; k < e.size(); ++k) {
      if (e[k]) s += x[i][k];
    }
    if (s != theta[i]) return false;
  }
  return true;
}

}  // namespace

Outcome<BinaryVector> solve_multichannel(const IntVector& theta, const IntMatrix& x, const BigInt& m,
                                         SolveStats* stats) {
  const std::size_t n = theta.size();
  if (n == 0 || x.size() != n || x[0].empty()) throw std::invalid_argument("solve_multichannel: bad shape");
  const std::size_t p = x[0].size();
  for (const auto& row : x) {
    if (row.size() != p) throw std::invalid_argument("solve_multichannel: ragged X");
  }
  if (m < multichannel_scale(n, p)) throw std::invalid_argument("solve_multichannel: scale m below p 2^ceil((n+p)/2)");

  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < n; ++i) {
    if (theta[i] != 0) rows.push_back(i);
  }
  if (rows.empty()) {
    BinaryVector zero(p, 0);
    if (satisfies(theta, x, zero)) return zero;
    return fail("multichannel", "verification", "zero targets but the zero vector does not verify");
  }

  const std::size_t r = rows.size();
  const std::size_t d = r + p;
  std::vector<IntVector> cols(d, IntVector(d, 0));
  for (std::size_t a = 0; a < r; ++a) cols[a][a] = m * theta[rows[a]];
  for (std::size_t k = 0; k < p; ++k) {
    for (std::size_t a = 0; a < r; ++a) cols[r + k][a] = -m * x[rows[a]][k];
    cols[r + k][r + k] = 1;
  }
  LatticeBasis reduced = lll_reduce(LatticeBasis(std::move(cols)));
  if (stats) ++stats->lll_invocations;
  const IntVector& v = reduced.column(0);

  IntVector tail(v.begin() + static_cast<long>(r), v.end());
  const BigInt g = gcd_vector(tail);
  if (g == 0) return fail("multichannel", "gcd_zero");
  bool any_neg = false, any_pos = false;
  for (const auto& t : tail) {
    any_neg = any_neg || t < 0;
    any_pos = any_pos || t > 0;
  }
  if (any_neg && any_pos) return fail("multichannel", "non_binary", "mixed signs in the short vector");
  BinaryVector e(p);
  for (std::size_t k = 0; k < p; ++k) {
    BigInt q = abs(tail[k]) / g;
    if (q > 1) return fail("multichannel", "non_binary", "entry above one after gcd division");
    e[k] = q == 1 ? 1 : 0;
  }
  if (!satisfies(theta, x, e)) return fail("multichannel", "verification", "X e differs from the targets");
  return e;
}

Outcome<BinaryVector> solve_single(const BigInt& y, const IntVector& x, SolveStats* stats) {
  if (x.empty()) throw std::invalid_argument("solve_single: empty weights");
  return solve_multichannel({y}, {x}, multichannel_scale(1, x.size()), stats);
}

std::vector<std::pair<std::size_t, std::size_t>> pair_order(std::size_t p) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i + 1; j < p; ++j) out.emplace_back(i, j);
  }
  return out;
}

IntVector pair_products(const IntVector& x) {
  IntVector out;
  for (auto [i, j] : pair_order(x.size())) out.push_back(x[i] * x[j]);
  return out;
}

Outcome<BinaryVector> solve_dependent_products(const BigInt& theta, const IntVector& x, SolveStats* stats) {
  const std::size_t p = x.size();
  if (p < 3) throw std::invalid_argument("solve_dependent_products: p must be at least 3");
  const IntVector y = pair_products(x);
  BigInt total = 0;
  for (const auto& v : y) total += v;
  const bool complemented = 2 * theta < total;
  const BigInt target = complemented ? BigInt(total - theta) : theta;

  auto r = solve_multichannel({target}, {y}, dependent_scale(p), stats);
  if (!r) return nest("dependent_products", r.failure());
  BinaryVector xi = r.value();
  if (complemented) {
    for (auto& b : xi) b = 1 - b;
  }
  BigInt s = 0;
  for (std::size_t k = 0; k < xi.size(); ++k) {
    if (xi[k]) s += y[k];
  }
  if (s != theta) return fail("dependent_products", "verification");
  return xi;
}

}  // namespace latrec
