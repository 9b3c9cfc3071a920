#include "latrec/instance.hpp"
#include "latrec/instruments.hpp"
#include "latrec/rng.hpp"
#include "latrec/serialize.hpp"
#include "oracle.hpp"

#include <doctest.h>

#include <cmath>

using namespace latrec;

namespace {

BoundsQuery random_query(Rng& rng) {
  BoundsQuery q;
  q.n = rng.range(1L, 6L);
  q.p = rng.range(1L, 40L);
  q.R = Rational(rng.range(1L, 50L), rng.range(1L, 4L));
  q.Q = Rational(rng.range(1L, 50L), rng.range(1L, 4L));
  q.R_hat = Rational(rng.range(1L, 50L), rng.range(1L, 4L));
  q.Q_hat = Rational(rng.range(1L, 50L), rng.range(1L, 4L));
  q.R.canonicalize();
  q.Q.canonicalize();
  q.R_hat.canonicalize();
  q.Q_hat.canonicalize();
  q.c = Rational(rng.range(1L, 8L), rng.range(1L, 4L));
  q.c.canonicalize();
  q.eps = Rational(rng.range(1L, 20L), 20);
  q.eps.canonicalize();
  q.W_inf = Rational(rng.range(0L, 10L));
  const long k = rng.range(0L, 3000L);
  q.sigma = k == 0 ? PrecReal(64) : PrecReal::pow2(-k, 64) * PrecReal(rng.range(1L, 1000L), 64);
  return q;
}

}  // namespace

TEST_SUITE("instruments") {

TEST_CASE("spot values") {
  BoundsQuery q;
  q.p = 15;
  const Threshold t = n_threshold_elo(q);
  CHECK(t.value == oracle::ceil_long(oracle::elo_rhs(q)));
  CHECK(t.value == 369);

  BoundsQuery l;
  l.p = 10;
  l.Q_hat = 2;
  l.R_hat = 2;
  CHECK(*n_threshold_lbr(l, false) == *oracle::lbr_threshold(l, false));

  BoundsQuery c;
  c.p = 20;
  const Cor2Window w = n_window_cor2(c);
  CHECK(w.lower == 267);
  CHECK_FALSE(w.premise_ok);
  CHECK_FALSE(w.upper.has_value());
  c.sigma = PrecReal(1L, 64);
  CHECK(*n_window_cor2(c).upper == 0);
  CHECK_FALSE(n_window_cor2(c).nonempty());

  CHECK(std::abs(sigma_info_bound(2, 4, 1, 1).to_double() - 57.2433) < 1e-4);
  CHECK(sigma0_optimal(100, 5, BigInt(1) << 30, 1).to_canonical() == "0x1p-600@256");
  CHECK(sigma0_optimal(3, 3, 2, 1).to_rational() == Rational(1, 2));
  CHECK(sigma0_optimal(3, 7, 1, 1).to_rational() == 1);
  CHECK(jirss_condition_value(1, 12, 150, 1).sign() < 0);
  CHECK(jirss_condition_value(1, 12, 0, 1).sign() > 0);
}

TEST_CASE("sigma = 0 collapses LBR to the closed form; huge sigma is infeasible") {
  BoundsQuery q;
  q.p = 7;
  q.Q_hat = 3;
  const Rational rhs = lbr_rhs_upper(q, false, 0);
  BigInt fl;
  mpz_fdiv_q(fl.get_mpz_t(), rhs.get_num_mpz_t(), rhs.get_den_mpz_t());
  CHECK(*n_threshold_lbr(q, false) == fl.get_si() + 1);
  q.sigma = PrecReal(1L, 64);
  CHECK_FALSE(n_threshold_lbr(q, false).has_value());
  CHECK_FALSE(n_threshold_lbr(q, true).has_value());
}

TEST_CASE("calculators agree with the independent oracle") {
  Rng rng(31337);
  for (int t = 0; t < 60; ++t) {
    const BoundsQuery q = random_query(rng);
    CAPTURE(t);
    CHECK(n_threshold_elo(q).value == oracle::ceil_long(oracle::elo_rhs(q)));
    CHECK(n_threshold_mirr(q).value == oracle::ceil_long(oracle::mirr_rhs(q)));
    for (bool iid : {false, true}) CHECK(n_threshold_lbr(q, iid) == oracle::lbr_threshold(q, iid));
    const Cor2Window w = n_window_cor2(q);
    const oracle::Window ow = oracle::cor2(q);
    CHECK(w.lower == ow.lower);
    CHECK(w.upper == ow.upper);
    CHECK(w.premise_ok == ow.premise);
    CHECK(oracle::agrees(sigma_info_bound(q.n, q.p, q.Q, q.R), oracle::sigma_info(q.n, q.p, q.Q, q.R), 248));
    CHECK(oracle::agrees(sigma0_optimal(q.p, q.n, q.R, q.Q), oracle::sigma0(q.p, q.n, q.R, q.Q), 248));
    const long N = rng.range(0L, 2000L);
    CHECK(oracle::agrees(jirss_condition_value(q.n, q.p, N, q.c), oracle::jirss(q.n, q.p, N, q.c), 240));
  }
}

TEST_CASE("monotonicity") {
  Rng rng(77);
  for (int t = 0; t < 40; ++t) {
    BoundsQuery q = random_query(rng);
    BoundsQuery bigger = q;
    bigger.R_hat += 1;
    CHECK(n_threshold_elo(bigger).value >= n_threshold_elo(q).value);
    CHECK(n_threshold_mirr(bigger).value >= n_threshold_mirr(q).value);
    bigger = q;
    bigger.Q_hat += 1;
    CHECK(n_threshold_mirr(bigger).value >= n_threshold_mirr(q).value);
    bigger = q;
    bigger.p += 1;
    CHECK(n_threshold_elo(bigger).value >= n_threshold_elo(q).value);
    CHECK(n_threshold_mirr_c(bigger) >= n_threshold_mirr_c(q));
    bigger = q;
    bigger.sigma = q.sigma * PrecReal(4L, 64);
    if (q.sigma.is_zero()) bigger.sigma = PrecReal::pow2(-3000, 64);
    auto lo = n_threshold_lbr(q, false), hi = n_threshold_lbr(bigger, false);
    if (lo && hi) CHECK(*hi >= *lo);
    if (!lo) CHECK_FALSE(hi.has_value());
  }
  // Larger n raises sigma_info_bound; larger Q lowers it.
  CHECK(sigma_info_bound(3, 4, 1, 1) > sigma_info_bound(2, 4, 1, 1));
  CHECK(sigma_info_bound(2, 4, 2, 1) < sigma_info_bound(2, 4, 1, 1));
}

TEST_CASE("query validation names the field") {
  BoundsQuery q;
  q.eps = 0;
  CHECK_THROWS_WITH_AS(validate(q), doctest::Contains("eps"), std::invalid_argument);
  q = BoundsQuery{};
  q.n = 0;
  CHECK_THROWS_WITH_AS(n_threshold_elo(q), doctest::Contains("n"), std::invalid_argument);
}

TEST_CASE("coprime experiment") {
  const double f = coprime_fraction_experiment(20000, 1000000, 5);
  CHECK(std::abs(f - 6.0 / (M_PI * M_PI)) < 0.02);
  CHECK(coprime_fraction_experiment(100, 1, 5) == 1.0);
  CHECK(coprime_fraction_experiment(5000, 1000, 9) == coprime_fraction_experiment(5000, 1000, 9));
}

TEST_CASE("generated instances hold their planted equations") {
  GenParams g;
  g.p = 9;
  g.R = 3;
  g.w_max = 0;
  const Instance e = gen_instance(Kind::elo, g, 1);
  for (std::size_t i = 0; i < e.y_int.size(); ++i) {
    BigInt s = 0;
    for (std::size_t j = 0; j < 9; ++j) s += e.x_int[i][j] * std::get<Rational>((*e.beta_true)[j]).get_num();
    CHECK(s == e.y_int[i]);
  }
  GenParams l;
  l.p = 5;
  l.Q = 2;
  l.R = 2;
  l.sigma = "2^-20";
  l.N = 64;
  const Instance li = gen_instance(Kind::lbr, l, 2);
  const Rational sigma = parse_sigma("2^-20", 64).to_rational();
  // Y - X beta exact in Q, then compared with sigma plus one rounding of Y.
  Rational fit = 0;
  for (std::size_t j = 0; j < 5; ++j) fit += li.x_real[0][j].to_rational() * std::get<Rational>((*li.beta_true)[j]);
  const Rational round = Rational(BigInt(16), BigInt(1) << li.construction_bits);
  CHECK(abs(li.y_real[0].to_rational() - fit) <= sigma + round);
}

TEST_CASE("generation is deterministic and validated") {
  GenParams g;
  g.p = 6;
  g.Q = 3;
  g.R = 2;
  for (Kind k : {Kind::elo, Kind::lbr, Kind::mirr, Kind::phase_d, Kind::dep_subsetsum}) {
    const std::string a = to_json(gen_instance(k, g, 42)).dump();
    const std::string b = to_json(gen_instance(k, g, 42)).dump();
    CHECK(a == b);
    CHECK(a != to_json(gen_instance(k, g, 43)).dump());
  }
  GenParams bad = g;
  bad.n = 2;
  CHECK_THROWS_WITH_AS(gen_instance(Kind::ihdr, bad, 1), doctest::Contains("params.n"), std::invalid_argument);
  bad = g;
  bad.sigma = "1";
  CHECK_THROWS_WITH_AS(gen_instance(Kind::lbr, bad, 1), doctest::Contains("params.sigma"), std::invalid_argument);
  bad = g;
  bad.support = {"sqrt(2)", "sqrt(8)"};
  CHECK_THROWS_AS(gen_instance(Kind::jirss, bad, 1), std::invalid_argument);
}

TEST_CASE("instance JSON round trip") {
  GenParams g;
  g.p = 5;
  g.Q = 2;
  g.R = 2;
  for (Kind k : {Kind::elo, Kind::lbr, Kind::jirss, Kind::ihdr, Kind::mirr, Kind::mirrc, Kind::mixed_ira,
                 Kind::phase_d, Kind::phase_c, Kind::subsetsum, Kind::dep_subsetsum}) {
    CAPTURE(kind_name(k));
    GenParams gp = g;
    if (k == Kind::phase_c) gp.p = 3;
    const Instance inst = gen_instance(k, gp, 9);
    const Json j = to_json(inst);
    const Instance back = instance_from_json(Json::parse(j.dump()));
    CHECK(to_json(back).dump() == j.dump());
  }
}

}
