#include "latrec/rng.hpp"
#include "latrec/subsetsum.hpp"

#include <doctest.h>

using namespace latrec;

TEST_SUITE("subsetsum") {

TEST_CASE("scales") {
  // p 2^ceil((n+p)/2)
  CHECK(multichannel_scale(1, 10) == 10 * (BigInt(1) << 6));
  CHECK(multichannel_scale(2, 3) == 3 * (BigInt(1) << 3));
  // p^2 2^(ceil(L/2)+1), L = p(p-1)/2
  CHECK(dependent_scale(6) == 36 * (BigInt(1) << 9));
}

TEST_CASE("pair order is lexicographic") {
  auto pr = pair_order(4);
  std::vector<std::pair<std::size_t, std::size_t>> expect = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  CHECK(pr == expect);
  IntVector x = {2, 3, 5};
  CHECK(pair_products(x) == IntVector{6, 10, 15});
}

TEST_CASE("single subset-sum, p=10 over 2^60") {
  Rng rng(101);
  int ok = 0;
  for (int t = 0; t < 20; ++t) {
    IntVector x(10);
    for (auto& v : x) v = rng.discrete_uniform(60);
    BinaryVector e(10);
    BigInt y = 0;
    for (std::size_t i = 0; i < 10; ++i) {
      e[i] = static_cast<int>(rng.range(0L, 1L));
      y += e[i] * x[i];
    }
    auto r = solve_single(y, x);
    if (r && r.value() == e) ++ok;
    if (r) {
      BigInt check = 0;
      for (std::size_t i = 0; i < 10; ++i) check += r.value()[i] * x[i];
      CHECK(check == y);  // any returned answer is exact
    }
  }
  CHECK(ok >= 19);
}

TEST_CASE("multichannel, n=1 p=12 over 2^150") {
  Rng rng(202);
  int ok = 0;
  for (int t = 0; t < 20; ++t) {
    IntMatrix x(1, IntVector(12));
    for (auto& v : x[0]) v = rng.discrete_uniform(150);
    BinaryVector e(12);
    IntVector theta(1, 0);
    for (std::size_t i = 0; i < 12; ++i) {
      e[i] = static_cast<int>(rng.range(0L, 1L));
      theta[0] += e[i] * x[0][i];
    }
    auto r = solve_multichannel(theta, x, multichannel_scale(1, 12));
    if (r && r.value() == e) ++ok;
  }
  CHECK(ok >= 19);
}

TEST_CASE("multichannel precondition and degenerate rows") {
  IntMatrix x = {{3, 5, 7}};
  CHECK_THROWS_AS(solve_multichannel({8}, x, 1), std::invalid_argument);
  auto z = solve_multichannel({0}, x, multichannel_scale(1, 3));
  REQUIRE(z);
  CHECK(z.value() == BinaryVector{0, 0, 0});
  auto bad = solve_single(100, {3, 5, 7});
  CHECK_FALSE(bad);
}

TEST_CASE("dependent products, p=6 over 2^195") {
  Rng rng(303);
  int ok = 0;
  for (int t = 0; t < 20; ++t) {
    IntVector x(6);
    for (auto& v : x) v = rng.discrete_uniform(195);
    const IntVector prods = pair_products(x);
    BinaryVector xi(prods.size());
    BigInt theta = 0;
    for (std::size_t k = 0; k < prods.size(); ++k) {
      xi[k] = static_cast<int>(rng.range(0L, 1L));
      theta += xi[k] * prods[k];
    }
    auto r = solve_dependent_products(theta, x);
    if (r && r.value() == xi) ++ok;
  }
  CHECK(ok >= 18);
  CHECK_THROWS_AS(solve_dependent_products(5, {1, 2}), std::invalid_argument);
}

}
