#include "latrec/lattice.hpp"
#include "latrec/rng.hpp"

#include <doctest.h>

#include <algorithm>

using namespace latrec;

namespace {

using QMatrix = std::vector<std::vector<Rational>>;

// Exact Gram-Schmidt written independently of the library.
void gram_schmidt(const std::vector<IntVector>& b, std::vector<std::vector<Rational>>& bstar, QMatrix& mu) {
  const std::size_t d = b.size();
  bstar.assign(d, std::vector<Rational>(d));
  mu.assign(d, std::vector<Rational>(d, 0));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < d; ++k) bstar[i][k] = Rational(b[i][k]);
    for (std::size_t j = 0; j < i; ++j) {
      Rational num = 0, den = 0;
      for (std::size_t k = 0; k < d; ++k) {
        num += Rational(b[i][k]) * bstar[j][k];
        den += bstar[j][k] * bstar[j][k];
      }
      mu[i][j] = num / den;
      for (std::size_t k = 0; k < d; ++k) bstar[i][k] -= mu[i][j] * bstar[j][k];
    }
  }
}

Rational sq(const std::vector<Rational>& v) {
  Rational s = 0;
  for (const auto& x : v) s += x * x;
  return s;
}

// Solves B c = v over Q; returns true when c is integral.
bool integral_combination(const std::vector<IntVector>& cols, const IntVector& v) {
  const std::size_t d = cols.size();
  QMatrix a(d, std::vector<Rational>(d + 1));
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c < d; ++c) a[r][c] = Rational(cols[c][r]);
    a[r][d] = Rational(v[r]);
  }
  for (std::size_t c = 0; c < d; ++c) {
    std::size_t piv = c;
    while (a[piv][c] == 0) ++piv;
    std::swap(a[piv], a[c]);
    for (std::size_t r = 0; r < d; ++r) {
      if (r == c || a[r][c] == 0) continue;
      Rational f = a[r][c] / a[c][c];
      for (std::size_t k = c; k <= d; ++k) a[r][k] -= f * a[c][k];
    }
  }
  for (std::size_t r = 0; r < d; ++r) {
    Rational x = a[r][d] / a[r][r];
    if (x.get_den() != 1) return false;
  }
  return true;
}

std::vector<IntVector> random_basis(Rng& rng, std::size_t d, long lo, long hi) {
  while (true) {
    std::vector<IntVector> cols(d, IntVector(d));
    for (auto& c : cols)
      for (auto& v : c) v = rng.range(lo, hi);
    if (determinant(cols) != 0) return cols;
  }
}

// Naive enumeration over a coefficient box.
BigInt naive_shortest_sq(const std::vector<IntVector>& cols, long box) {
  const std::size_t d = cols.size();
  std::vector<long> c(d, -box);
  BigInt best = -1;
  while (true) {
    bool nonzero = std::any_of(c.begin(), c.end(), [](long x) { return x != 0; });
    if (nonzero) {
      IntVector v(d, 0);
      for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = 0; k < d; ++k) v[k] += c[j] * cols[j][k];
      BigInt n = norm_sq(v);
      if (best < 0 || n < best) best = n;
    }
    std::size_t i = 0;
    while (i < d && c[i] == box) c[i++] = -box;
    if (i == d) break;
    ++c[i];
  }
  return best;
}

}  // namespace

TEST_SUITE("lattice") {

TEST_CASE("textbook example reduces to known basis") {
  LatticeBasis b({{1, 1, 1}, {-1, 0, 2}, {3, 5, 6}});
  LatticeBasis r = lll_reduce(b);
  std::vector<IntVector> expect = {{0, 1, 0}, {1, 0, 1}, {-1, 0, 2}};
  for (std::size_t j = 0; j < 3; ++j) {
    IntVector neg = expect[j];
    for (auto& v : neg) v = -v;
    CHECK((r.column(j) == expect[j] || r.column(j) == neg));
  }
}

TEST_CASE("constructor rejects bad shapes") {
  CHECK_THROWS_AS(LatticeBasis({{1, 2}, {2, 4}}), std::invalid_argument);
  CHECK_THROWS_AS(LatticeBasis({{1, 2}, {2}}), std::invalid_argument);
  CHECK_THROWS_AS(lll_reduce(LatticeBasis({{1, 0}, {0, 1}}), Rational(1, 4)), std::invalid_argument);
}

TEST_CASE("reduced bases are size reduced, satisfy Lovasz, and span the same lattice") {
  Rng rng(21);
  for (int t = 0; t < 30; ++t) {
    const std::size_t d = 2 + static_cast<std::size_t>(t % 5);
    auto cols = random_basis(rng, d, -1000, 1000);
    LatticeBasis r = lll_reduce(LatticeBasis(cols));
    const auto& rc = r.columns();
    CHECK(abs(determinant(rc)) == abs(determinant(cols)));
    for (const auto& v : rc) CHECK(integral_combination(cols, v));
    std::vector<std::vector<Rational>> bstar;
    QMatrix mu;
    gram_schmidt(rc, bstar, mu);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < i; ++j) CHECK(abs(mu[i][j]) <= Rational(1, 2));
    for (std::size_t i = 1; i < d; ++i)
      CHECK(sq(bstar[i]) >= (Rational(3, 4) - mu[i][i - 1] * mu[i][i - 1]) * sq(bstar[i - 1]));
  }
}

TEST_CASE("brute-force shortest vector matches naive enumeration") {
  Rng rng(8);
  for (int t = 0; t < 15; ++t) {
    const std::size_t d = 2 + static_cast<std::size_t>(t % 2);
    auto cols = random_basis(rng, d, -20, 20);
    LatticeBasis lb(cols);
    // Reduce first so that a small coefficient box is exhaustive for the naive search.
    LatticeBasis red = lll_reduce(lb);
    IntVector v = shortest_vector_bruteforce(lb);
    CHECK(integral_combination(cols, v));
    CHECK(norm_sq(v) == naive_shortest_sq(red.columns(), 6));
  }
  CHECK_THROWS_AS(shortest_vector_bruteforce(LatticeBasis(random_basis(rng, 9, -3, 3))), std::invalid_argument);
}

TEST_CASE("LLL approximation guarantee on small random bases") {
  Rng rng(99);
  for (int t = 0; t < 20; ++t) {
    const std::size_t d = 3 + static_cast<std::size_t>(t % 3);
    LatticeBasis b(random_basis(rng, d, -100, 100));
    const BigInt l1 = norm_sq(shortest_vector_bruteforce(b));
    const BigInt first = norm_sq(lll_reduce(b).column(0));
    // ||b1||^2 <= 2^(d-1) lambda1^2
    CHECK(first <= (BigInt(1) << (d - 1)) * l1);
  }
}

}
