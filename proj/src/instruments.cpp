#include "latrec/instruments.hpp"

#include "latrec/rng.hpp"

#include <numeric>
#include <stdexcept>

namespace latrec {

namespace {

constexpr mpfr_prec_t kBits = 256;

PrecReal up(const Rational& q) {
  PrecReal out(kBits);
  mpfr_set_q(out.get(), q.get_mpq_t(), MPFR_RNDU);
  return out;
}

PrecReal sqrt_up(const Rational& q) {
  PrecReal out = up(q);
  mpfr_sqrt(out.get(), out.get(), MPFR_RNDU);
  return out;
}

PrecReal add_up(const PrecReal& a, const PrecReal& b) {
  PrecReal out(kBits);
  mpfr_add(out.get(), a.get(), b.get(), MPFR_RNDU);
  return out;
}

PrecReal mul_up(const PrecReal& a, const PrecReal& b) {
  PrecReal out(kBits);
  mpfr_mul(out.get(), a.get(), b.get(), MPFR_RNDU);
  return out;
}

Rational log2_up(const Rational& q) { return log2_upper(up(q)); }

long to_long(const Rational& q) {
  Rational c = ceil_rational(q);
  if (!c.get_num().fits_slong_p()) throw std::overflow_error("threshold does not fit in a long");
  return c.get_num().get_si();
}

}  // namespace

void validate(const BoundsQuery& q) {
  if (q.n < 1) throw std::invalid_argument("bounds query: n must be >= 1");
  if (q.p < 1) throw std::invalid_argument("bounds query: p must be >= 1");
  if (q.R <= 0) throw std::invalid_argument("bounds query: R must be positive");
  if (q.Q <= 0) throw std::invalid_argument("bounds query: Q must be positive");
  if (q.R_hat <= 0) throw std::invalid_argument("bounds query: R_hat must be positive");
  if (q.Q_hat <= 0) throw std::invalid_argument("bounds query: Q_hat must be positive");
  if (q.sigma.sign() < 0) throw std::invalid_argument("bounds query: sigma must be nonnegative");
  if (q.eps <= 0) throw std::invalid_argument("bounds query: eps must be positive");
  if (q.c <= 0) throw std::invalid_argument("bounds query: c must be positive");
  if (q.W_inf < 0) throw std::invalid_argument("bounds query: W_inf must be nonnegative");
}

Rational log2_upper(const PrecReal& x) {
  if (x.sign() <= 0) throw std::domain_error("log2 of a nonpositive value");
  PrecReal out(kBits);
  mpfr_log2(out.get(), x.get(), MPFR_RNDU);
  return out.to_rational();
}

Rational log2_lower(const PrecReal& x) {
  if (x.sign() <= 0) throw std::domain_error("log2 of a nonpositive value");
  PrecReal out(kBits);
  mpfr_log2(out.get(), x.get(), MPFR_RNDD);
  return out.to_rational();
}

Rational ceil_rational(const Rational& q) {
  BigInt c;
  mpz_cdiv_q(c.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return Rational(c);
}

namespace {

// (2n+p)/(2n) [2n + p + 10 log(a)] + 6 log((1+c) n p), a given as an upper bound.
Threshold elo_like(const BoundsQuery& q, const PrecReal& a_up) {
  const Rational n(q.n), p(q.p);
  Rational rhs = (2 * n + p) / (2 * n) * (2 * n + p + 10 * log2_upper(a_up)) + 6 * log2_up((1 + q.c) * n * p);
  rhs.canonicalize();
  return Threshold{to_long(rhs), rhs};
}

}  // namespace

Threshold n_threshold_elo(const BoundsQuery& q) {
  validate(q);
  PrecReal a = add_up(mul_up(up(q.R_hat), sqrt_up(Rational(q.p))), mul_up(up(q.W_inf + 1), sqrt_up(Rational(q.n))));
  return elo_like(q, a);
}

Threshold n_threshold_mirr(const BoundsQuery& q) {
  validate(q);
  PrecReal a = add_up(mul_up(up(q.Q_hat * q.R_hat), sqrt_up(Rational(q.p))), sqrt_up(Rational(q.n)));
  return elo_like(q, a);
}

Rational lbr_rhs_upper(const BoundsQuery& q, bool iid, long n_bits) {
  validate(q);
  const Rational n(q.n), p(q.p);
  PrecReal s(kBits);
  mpfr_set(s.get(), q.sigma.get(), MPFR_RNDU);
  if (iid) s = mul_up(s, sqrt_up(n * p));
  mpfr_mul_2si(s.get(), s.get(), n_bits, MPFR_RNDU);
  PrecReal arg = add_up(s, up(q.R_hat * p));
  Rational rhs = (2 * n + p) / 2 *
                 (2 * n + p + 10 * log2_up(q.Q_hat) + 10 * log2_upper(arg) + 20 * log2_up(3 * (1 + q.c) * n * p));
  rhs.canonicalize();
  return rhs;
}

std::optional<long> n_threshold_lbr(const BoundsQuery& q, bool iid) {
  validate(q);
  auto ok = [&](long nb) -> bool { return Rational(nb) > lbr_rhs_upper(q, iid, nb); };
  // With sigma = 0 the right side is constant.
  BoundsQuery q0 = q;
  q0.sigma = PrecReal(64);
  const Rational rhs0 = lbr_rhs_upper(q0, iid, 0);
  BigInt fl;
  mpz_fdiv_q(fl.get_mpz_t(), rhs0.get_num_mpz_t(), rhs0.get_den_mpz_t());
  const long n0 = fl.get_si() + 1;
  if (q.sigma.is_zero()) return n0;

  // f(N) = N - rhs(N) is concave; locate its maximum, then the first N where it is positive.
  auto gain = [&](long nb) -> Rational { return Rational(nb) - lbr_rhs_upper(q, iid, nb); };
  long hi = n0 + 64;
  {
    // 2^N sigma only matters once it is comparable with R_hat p.
    long e = -q.sigma.exponent();
    if (e > 0) hi = std::max(hi, e + static_cast<long>(bit_length(BigInt(q.p))) + 64);
  }
  long lo = 1;
  while (lo < hi) {  // first N with f(N+1) <= f(N)
    long mid = lo + (hi - lo) / 2;
    if (gain(mid + 1) > gain(mid)) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  const long peak = lo;
  if (!ok(peak)) return std::nullopt;
  long a = 1, b = peak;
  while (a < b) {
    long mid = a + (b - a) / 2;
    if (ok(mid)) {
      b = mid;
    } else {
      a = mid + 1;
    }
  }
  return a;
}

long n_threshold_mirr_c(const BoundsQuery& q) {
  BoundsQuery q0 = q;
  q0.sigma = PrecReal(64);
  return *n_threshold_lbr(q0, false);
}

Cor2Window n_window_cor2(const BoundsQuery& q) {
  validate(q);
  const Rational n(q.n), p(q.p);
  Cor2Window w;
  Rational inner = (p + 2 * n) * (p + 2 * n) / (2 * n) + (2 + p / n) * log2_up(q.R * q.Q);
  w.lower = to_long((1 + q.eps) * inner);
  if (!q.sigma.is_zero()) {
    PrecReal inv(kBits);
    mpfr_ui_div(inv.get(), 1, q.sigma.get(), MPFR_RNDD);
    Rational l = log2_lower(inv);
    BigInt fl;
    mpz_fdiv_q(fl.get_mpz_t(), l.get_num_mpz_t(), l.get_den_mpz_t());
    w.upper = fl.get_si();
  }
  Rational premise = 300 / q.eps * log2_up(300 / ((1 + q.c) * q.eps));
  w.premise_ok = p >= premise;
  return w;
}

PrecReal sigma_info_bound(long n, long p, const Rational& Q, const Rational& R, mpfr_prec_t bits) {
  if (n < 1 || p < 1 || Q <= 0 || R <= 0) throw std::invalid_argument("sigma_info_bound: parameters must be positive");
  const mpfr_prec_t w = bits + 32;
  PrecReal base(Rational(2 * Q * R + 1), w);
  PrecReal lg(w);
  mpfr_log2(lg.get(), base.get(), MPFR_RNDN);
  PrecReal e = lg * PrecReal(Rational(2 * p, n), w);
  mpfr_exp2(e.get(), e.get(), MPFR_RNDN);
  e -= PrecReal(1L, w);
  mpfr_rec_sqrt(e.get(), e.get(), MPFR_RNDN);
  PrecReal np3(BigInt(n * p), w);
  np3 = np3 * np3 * np3;
  return (PrecReal(R, w) * np3 * e).with_precision(bits);
}

PrecReal sigma0_optimal(long p, long n, const Rational& R, const Rational& Q, mpfr_prec_t bits) {
  if (n < 1 || p < 1 || Q <= 0 || R <= 0) throw std::invalid_argument("sigma0_optimal: parameters must be positive");
  const mpfr_prec_t w = bits + 32;
  PrecReal lg(w);
  mpfr_log2(lg.get(), PrecReal(Rational(R * Q), w).get(), MPFR_RNDN);
  PrecReal e = -(lg * PrecReal(Rational(p, n), w));
  mpfr_exp2(e.get(), e.get(), MPFR_RNDN);
  return e.with_precision(bits);
}

PrecReal jirss_condition_value(long n, long p, long N, const Rational& c, mpfr_prec_t bits) {
  if (n < 1 || p < 1 || c <= 0) throw std::invalid_argument("jirss_condition_value: parameters must be positive");
  const mpfr_prec_t w = bits + 32;
  auto lg = [&](const Rational& v) {
    PrecReal out(w);
    mpfr_log2(out.get(), PrecReal(v, w).get(), MPFR_RNDN);
    return out;
  };
  const Rational nq(n), pq(p);
  PrecReal out(Rational(nq + pq + (nq + pq) * (nq + pq) / 2 - nq * N), w);
  out += PrecReal(nq, w) * lg(nq * nq * pq);
  out += PrecReal((nq + pq) / 2, w) * lg(pq);
  out -= PrecReal(nq, w) * lg(c);
  return out.with_precision(bits);
}

double coprime_fraction_experiment(std::uint64_t samples, std::uint64_t range_hi, std::uint64_t seed) {
  if (samples == 0 || range_hi == 0) throw std::invalid_argument("coprime experiment needs samples, range_hi >= 1");
  Rng rng(seed, 0, "coprime");
  std::uint64_t hits = 0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    const std::uint64_t a = rng.below_u64(range_hi) + 1;
    const std::uint64_t b = rng.below_u64(range_hi) + 1;
    if (std::gcd(a, b) == 1) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(samples);
}

}  // namespace latrec
