#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace latrec {

using BigInt = mpz_class;
using Rational = mpq_class;  // gmpxx keeps mpq values canonical once canonicalize() is called

using IntVector = std::vector<BigInt>;
using IntMatrix = std::vector<IntVector>;  // row-major

/// Arbitrary-precision binary floating value with an explicit significand width.
///
/// Results of binary operations are rounded to nearest-even at the larger of the
/// two operand precisions. Every finite value is an exact dyadic rational, so
/// to_rational() and truncation are exact.
class PrecReal {
 public:
  explicit PrecReal(mpfr_prec_t bits = 64);
  PrecReal(long value, mpfr_prec_t bits);
  PrecReal(const BigInt& value, mpfr_prec_t bits);
  PrecReal(const Rational& value, mpfr_prec_t bits);

  PrecReal(const PrecReal& other);
  PrecReal(PrecReal&& other) noexcept;
  PrecReal& operator=(const PrecReal& other);
  PrecReal& operator=(PrecReal&& other) noexcept;
  ~PrecReal();

  /// Parses a decimal literal such as "-1.3" or "2.5e-7", rounded to `bits`.
  static PrecReal from_decimal(std::string_view text, mpfr_prec_t bits);
  /// Exact power of two.
  static PrecReal pow2(long exponent, mpfr_prec_t bits);

  mpfr_prec_t precision() const { return mpfr_get_prec(value_); }
  PrecReal with_precision(mpfr_prec_t bits) const;

  mpfr_srcptr get() const { return value_; }
  mpfr_ptr get() { return value_; }

  bool is_zero() const { return mpfr_zero_p(value_) != 0; }
  int sign() const { return mpfr_sgn(value_); }
  /// floor(log2 |x|) + 1 for nonzero x; the binary exponent.
  long exponent() const;

  Rational to_rational() const;
  BigInt round_to_int() const;
  BigInt floor_to_int() const;
  double to_double() const;

  /// Canonical form "[-]0x<odd hex significand>p<exp>@<bits>", value = significand * 2^exp.
  std::string to_canonical() const;
  static PrecReal from_canonical(std::string_view text);
  /// Shortest round-trip decimal of the value rounded to a double.
  std::string to_summary() const;

  PrecReal operator-() const;
  PrecReal& operator+=(const PrecReal& rhs);
  PrecReal& operator-=(const PrecReal& rhs);
  PrecReal& operator*=(const PrecReal& rhs);
  PrecReal& operator/=(const PrecReal& rhs);
  PrecReal& operator*=(const BigInt& rhs);

  friend PrecReal operator+(PrecReal lhs, const PrecReal& rhs) { return lhs += rhs; }
  friend PrecReal operator-(PrecReal lhs, const PrecReal& rhs) { return lhs -= rhs; }
  friend PrecReal operator*(PrecReal lhs, const PrecReal& rhs) { return lhs *= rhs; }
  friend PrecReal operator/(PrecReal lhs, const PrecReal& rhs) { return lhs /= rhs; }
  friend PrecReal operator*(PrecReal lhs, const BigInt& rhs) { return lhs *= rhs; }
  friend PrecReal operator*(const BigInt& lhs, PrecReal rhs) { return rhs *= lhs; }

  friend bool operator==(const PrecReal& a, const PrecReal& b) { return mpfr_equal_p(a.value_, b.value_) != 0; }
  friend std::partial_ordering operator<=>(const PrecReal& a, const PrecReal& b);

 private:
  mpfr_t value_;
};

PrecReal abs(const PrecReal& x);
PrecReal square(const PrecReal& x);

/// Square root at `bits` of precision; |r^2 - a| < 2^-bits * max(1, a).
PrecReal sqrt_prec(const PrecReal& a, mpfr_prec_t bits);

/// sign(x) * floor(2^bits |x|) / 2^bits, exact.
Rational truncate_to_bits(const PrecReal& x, unsigned long bits);
Rational truncate_to_bits(const Rational& x, unsigned long bits);
/// 2^bits * truncate_to_bits(x, bits), which is always an integer.
BigInt truncate_scaled(const PrecReal& x, unsigned long bits);

/// gcd of the absolute values; 0 iff every entry is 0. Throws on empty input.
BigInt gcd_vector(std::span<const BigInt> values);

/// Number of bits of |x| (0 for x == 0).
std::size_t bit_length(const BigInt& x);
/// ceil(log2(x)) for x >= 1.
unsigned long ceil_log2(unsigned long x);
/// ceil(sqrt(x)) for x >= 0.
BigInt ceil_sqrt(const BigInt& x);
BigInt pow2_int(unsigned long exponent);
/// Rounds a rational to the nearest integer, halves away from zero.
BigInt round_nearest(const Rational& q);
BigInt floor_div(const BigInt& a, const BigInt& b);

std::string to_string(const BigInt& x);
std::string to_string(const Rational& q);
BigInt parse_bigint(std::string_view text);
/// Accepts "num/den", an integer, or an exact decimal such as "0.75" or "1e-3".
Rational parse_rational(std::string_view text);

/// Complex value with PrecReal parts.
struct PrecComplex {
  PrecReal re;
  PrecReal im;

  PrecComplex(PrecReal real, PrecReal imag) : re(std::move(real)), im(std::move(imag)) {}
  explicit PrecComplex(mpfr_prec_t bits) : re(bits), im(bits) {}

  PrecComplex conj() const { return {re, -im}; }
  /// re^2 + im^2 at working precision.
  PrecReal norm_sq() const { return square(re) + square(im); }

  friend PrecComplex operator+(const PrecComplex& a, const PrecComplex& b) { return {a.re + b.re, a.im + b.im}; }
  friend PrecComplex operator*(const PrecComplex& a, const PrecComplex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend PrecComplex operator*(const PrecReal& s, const PrecComplex& z) { return {s * z.re, s * z.im}; }
};

/// a^H b + a b^H = 2 Re(conj(a) b).
PrecReal hermitian_cross(const PrecComplex& a, const PrecComplex& b);

/// Parses "sqrt(2)", "1+sqrt(3)", "2-sqrt(2)", "3/2*sqrt(5)", "-7/3" and similar
/// sums of rational multiples of square roots of nonnegative integers.
PrecReal parse_real_expr(std::string_view text, mpfr_prec_t bits);

}  // namespace latrec
