#include "latrec/instance.hpp"
#include "latrec/recovery.hpp"

#include <doctest.h>

using namespace latrec;

namespace {

int count_exact(Kind kind, const GenParams& g, int trials, std::uint64_t base_seed) {
  int ok = 0;
  for (int t = 0; t < trials; ++t) {
    const Instance inst = gen_instance(kind, g, base_seed + static_cast<std::uint64_t>(t));
    const RecoveryReport r = solve_instance(inst);
    if (r.exact_match.value_or(false)) ++ok;
  }
  return ok;
}

IntVector mat_vec(const IntMatrix& x, const IntVector& b) {
  IntVector out(x.size(), 0);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i] += x[i][j] * b[j];
  return out;
}

}  // namespace

TEST_SUITE("recovery") {

TEST_CASE("support sets") {
  auto s = make_support_set({"sqrt(2)", "sqrt(3)"}, 400, true);
  REQUIRE(s);
  CHECK(s.value().size() == 2);
  CHECK_FALSE(make_support_set({"sqrt(2)", "sqrt(8)"}, 400, false));
  CHECK_FALSE(make_support_set({"sqrt(2)", "0"}, 400, false));
  CHECK_FALSE(make_support_set({"sqrt(2)", "sqrt(2)"}, 400, false));
  // 1 and 3/2 are dependent once 1 is included.
  CHECK_FALSE(make_support_set({"3/2"}, 400, true));
  CHECK(default_support_exprs(4) == std::vector<std::string>{"sqrt(2)", "sqrt(3)", "sqrt(5)", "sqrt(6)"});
}

TEST_CASE("ELO exact recovery with integer noise") {
  Rng data(5);
  int ok = 0;
  for (int t = 0; t < 10; ++t) {
    IntMatrix x(2, IntVector(8));
    for (auto& row : x)
      for (auto& v : row) v = data.discrete_uniform(200);
    IntVector beta(8);
    for (auto& b : beta) b = data.range(-3L, 3L);
    IntVector y = mat_vec(x, beta);
    for (auto& v : y) v += data.range(-2L, 2L);
    Rng rng(1000 + t);
    auto r = elo(y, x, 3, 2, rng);
    if (r && r.value() == beta) ++ok;
    if (r) {
      // Verification totality: residual within the declared bound.
      IntVector fit = mat_vec(x, r.value());
      for (std::size_t i = 0; i < y.size(); ++i) CHECK(abs(y[i] - fit[i]) <= 2);
    }
  }
  CHECK(ok >= 9);
}

TEST_CASE("ELO translation invariance") {
  Rng data(6);
  IntMatrix x(1, IntVector(10));
  for (auto& v : x[0]) v = data.discrete_uniform(300);
  IntVector beta(10);
  for (auto& b : beta) b = data.range(-1L, 1L);
  IntVector v(10);
  for (auto& e : v) e = data.range(-2L, 2L);
  const IntVector y = mat_vec(x, beta);
  IntVector shifted_beta(10);
  for (std::size_t i = 0; i < 10; ++i) shifted_beta[i] = beta[i] + v[i];
  const IntVector y2 = mat_vec(x, shifted_beta);
  Rng r1(77), r2(77);
  auto a = elo(y, x, 3, 0, r1);
  auto b = elo(y2, x, 3, 0, r2);
  REQUIRE(a);
  REQUIRE(b);
  for (std::size_t i = 0; i < 10; ++i) CHECK(b.value()[i] - v[i] == a.value()[i]);
}

TEST_CASE("ELO reports Failure rather than a wrong answer") {
  IntMatrix x = {{1000003, 999983, 1000033}};
  IntVector y = {12345678901};  // far outside R_hat * sum(X)
  Rng rng(1);
  auto r = elo(y, x, 1, 0, rng);
  CHECK_FALSE(r);
  CHECK_THROWS_AS(elo({1}, {{1, 2}}, 0, 0, rng), std::invalid_argument);
}

TEST_CASE("LBR noiseless and noisy") {
  GenParams g;
  g.p = 6;
  g.Q = 2;
  g.R = 2;
  CHECK(count_exact(Kind::lbr, g, 5, 10) == 5);
  g.sigma = "2^-900";
  CHECK(count_exact(Kind::lbr, g, 5, 20) >= 4);
  g.noise = "gaussian";
  CHECK(count_exact(Kind::lbr, g, 5, 30) >= 4);
}

TEST_CASE("JIRSS and IHDR") {
  GenParams g;
  g.p = 8;
  g.x_bits = 120;
  CHECK(count_exact(Kind::jirss, g, 5, 40) >= 4);
  GenParams h;
  h.p = 5;
  h.support = {"sqrt(2)", "sqrt(3)", "sqrt(5)"};
  CHECK(count_exact(Kind::ihdr, h, 5, 50) == 5);
}

TEST_CASE("IHDR zero measurement and nonzero support entries") {
  auto s = make_support_set({"sqrt(2)", "sqrt(3)"}, 512, false);
  REQUIRE(s);
  RealVector x = {PrecReal(Rational(1, 3), 512), PrecReal(Rational(2, 7), 512)};
  auto r = ihdr(PrecReal(512), x, s.value());
  CHECK_FALSE(r);  // every slot holds a nonzero support value, so Y = 0 has no solution
}

TEST_CASE("MIRR mixed, all-rational and all-irrational") {
  GenParams g;
  g.p = 6;
  g.Q = 2;
  g.R = 2;
  CHECK(count_exact(Kind::mirr, g, 5, 60) >= 4);
  g.rational_slots = 6;
  CHECK(count_exact(Kind::mirr, g, 3, 70) >= 2);
  g.rational_slots = 0;
  CHECK(count_exact(Kind::mirr, g, 3, 80) >= 2);
}

TEST_CASE("MIRR-C and mixed IRA") {
  GenParams g;
  g.p = 4;
  g.Q = 2;
  g.R = 2;
  CHECK(count_exact(Kind::mirrc, g, 3, 90) >= 2);
  CHECK(count_exact(Kind::mixed_ira, g, 3, 100) == 3);
}

TEST_CASE("verification totality on returned estimates") {
  GenParams g;
  g.p = 6;
  g.Q = 2;
  g.R = 2;
  g.sigma = "2^-700";
  for (int t = 0; t < 5; ++t) {
    const Instance inst = gen_instance(Kind::lbr, g, 500 + static_cast<std::uint64_t>(t));
    const RecoveryReport r = solve_instance(inst);
    if (!r.estimate) continue;
    PrecReal fit = dot_real(inst.x_real[0], *r.estimate, nullptr, inst.construction_bits);
    Rational bound = *inst.params.W_hat + Rational(BigInt(1) << 3, BigInt(1) << inst.N);
    CHECK(abs((inst.y_real[0] - fit).to_rational()) <= bound);
  }
}

}
