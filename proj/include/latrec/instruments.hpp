#pragma once

#include "latrec/arith.hpp"
#include "latrec/outcome.hpp"

#include <cstdint>
#include <optional>

namespace latrec {

/// Parameters shared by the threshold calculators. Logarithms are base 2.
struct BoundsQuery {
  long n = 1;
  long p = 1;
  Rational R = 1, Q = 1, R_hat = 1, Q_hat = 1;
  PrecReal sigma = PrecReal(64);
  Rational eps = Rational(1, 10);
  Rational c = 1;
  Rational W_inf = 0;
  /// Truncation level at which to evaluate jirss_condition_value, if any.
  std::optional<long> N;
};

/// Throws std::invalid_argument naming the offending field.
void validate(const BoundsQuery& q);

/// Least integer N with N >= rhs, where rhs is evaluated with every logarithm
/// replaced by a dyadic upper bound. rhs_upper is that exact rational.
struct Threshold {
  long value = 0;
  Rational rhs_upper;
};

/// N >= (2n+p)/(2n) [2n + p + 10 log(R_hat sqrt p + (W_inf + 1) sqrt n)] + 6 log((1 + c) n p).
Threshold n_threshold_elo(const BoundsQuery& q);
/// N >= (2n+p)/(2n) [2n + p + 10 log(Q_hat R_hat sqrt p + sqrt n)] + 6 log((1 + c) n p).
Threshold n_threshold_mirr(const BoundsQuery& q);

/// Right side of the strict LBR inequality at a given N:
/// (2n+p)/2 (2n + p + 10 log Q_hat + 10 log(2^N s + R_hat p) + 20 log(3 (1 + c) n p)),
/// s = sigma (adversarial) or sqrt(n p) sigma (iid). Upper bound, exact rational.
Rational lbr_rhs_upper(const BoundsQuery& q, bool iid, long n_bits);
/// Least N with N > lbr_rhs_upper(q, iid, N); nullopt when no N qualifies.
std::optional<long> n_threshold_lbr(const BoundsQuery& q, bool iid);
/// The same condition with sigma = 0.
long n_threshold_mirr_c(const BoundsQuery& q);

struct Cor2Window {
  long lower = 0;
  std::optional<long> upper;  // nullopt when sigma = 0 (no upper limit)
  bool premise_ok = false;
  bool nonempty() const { return !upper || *upper >= lower; }
};
/// lower = ceil((1+eps)[(p+2n)^2/(2n) + (2 + p/n) log(RQ)]), upper = floor(log(1/sigma)),
/// premise p >= (300/eps) log(300/((1+c) eps)).
Cor2Window n_window_cor2(const BoundsQuery& q);

/// R (np)^3 (2^(2p log(2QR+1)/n) - 1)^(-1/2) at `bits`.
PrecReal sigma_info_bound(long n, long p, const Rational& Q, const Rational& R, mpfr_prec_t bits = 256);
/// 2^(-p log(RQ)/n) at `bits`.
PrecReal sigma0_optimal(long p, long n, const Rational& R, const Rational& Q, mpfr_prec_t bits = 256);
/// n + p + n log(n^2 p) + (n+p)/2 log p + (n+p)^2/2 - n log c - n N at `bits`.
PrecReal jirss_condition_value(long n, long p, long N, const Rational& c, mpfr_prec_t bits = 256);

/// Upper / lower dyadic bounds on log2 of a positive real.
Rational log2_upper(const PrecReal& x);
Rational log2_lower(const PrecReal& x);
Rational ceil_rational(const Rational& q);

/// Fraction of uniform pairs in {1..range_hi}^2 with gcd 1.
double coprime_fraction_experiment(std::uint64_t samples, std::uint64_t range_hi, std::uint64_t seed);

}  // namespace latrec
