#include "latrec/arith.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <stdexcept>
#include <utility>

namespace latrec {

namespace {

constexpr mpfr_rnd_t kRound = MPFR_RNDN;

// Re-rounds `x` in place to at least `bits` without losing its value.
void widen(mpfr_ptr x, mpfr_prec_t bits) {
  if (mpfr_get_prec(x) < bits) mpfr_prec_round(x, bits, kRound);
}

}  // namespace

PrecReal::PrecReal(mpfr_prec_t bits) {
  mpfr_init2(value_, bits);
  mpfr_set_zero(value_, 1);
}

PrecReal::PrecReal(long value, mpfr_prec_t bits) {
  mpfr_init2(value_, bits);
  mpfr_set_si(value_, value, kRound);
}

PrecReal::PrecReal(const BigInt& value, mpfr_prec_t bits) {
  mpfr_init2(value_, bits);
  mpfr_set_z(value_, value.get_mpz_t(), kRound);
}

PrecReal::PrecReal(const Rational& value, mpfr_prec_t bits) {
  mpfr_init2(value_, bits);
  mpfr_set_q(value_, value.get_mpq_t(), kRound);
}

PrecReal::PrecReal(const PrecReal& other) {
  mpfr_init2(value_, other.precision());
  mpfr_set(value_, other.value_, kRound);
}

PrecReal::PrecReal(PrecReal&& other) noexcept {
  // Leave the source as a valid minimal-precision zero.
  mpfr_init2(value_, MPFR_PREC_MIN);
  mpfr_swap(value_, other.value_);
}

PrecReal& PrecReal::operator=(const PrecReal& other) {
  if (this != &other) {
    mpfr_set_prec(value_, other.precision());
    mpfr_set(value_, other.value_, kRound);
  }
  return *this;
}

PrecReal& PrecReal::operator=(PrecReal&& other) noexcept {
  mpfr_swap(value_, other.value_);
  return *this;
}

PrecReal::~PrecReal() { mpfr_clear(value_); }

PrecReal PrecReal::from_decimal(std::string_view text, mpfr_prec_t bits) {
  PrecReal out(bits);
  std::string s(text);
  if (mpfr_set_str(out.value_, s.c_str(), 10, kRound) != 0) {
    throw std::invalid_argument("not a decimal number: " + s);
  }
  return out;
}

PrecReal PrecReal::pow2(long exponent, mpfr_prec_t bits) {
  PrecReal out(1L, bits);
  mpfr_mul_2si(out.value_, out.value_, exponent, kRound);
  return out;
}

PrecReal PrecReal::with_precision(mpfr_prec_t bits) const {
  PrecReal out(bits);
  mpfr_set(out.value_, value_, kRound);
  return out;
}

long PrecReal::exponent() const {
  if (is_zero()) return 0;
  return mpfr_get_exp(value_);
}

Rational PrecReal::to_rational() const {
  if (!mpfr_number_p(value_)) throw std::domain_error("PrecReal is not finite");
  if (is_zero()) return Rational(0);
  BigInt significand;
  mpfr_exp_t exp = mpfr_get_z_2exp(significand.get_mpz_t(), value_);
  Rational out(significand);
  if (exp >= 0) {
    mpq_mul_2exp(out.get_mpq_t(), out.get_mpq_t(), static_cast<mp_bitcnt_t>(exp));
  } else {
    mpq_div_2exp(out.get_mpq_t(), out.get_mpq_t(), static_cast<mp_bitcnt_t>(-exp));
  }
  return out;
}

BigInt PrecReal::round_to_int() const {
  BigInt out;
  mpfr_get_z(out.get_mpz_t(), value_, MPFR_RNDN);
  return out;
}

BigInt PrecReal::floor_to_int() const {
  BigInt out;
  mpfr_get_z(out.get_mpz_t(), value_, MPFR_RNDD);
  return out;
}

double PrecReal::to_double() const { return mpfr_get_d(value_, kRound); }

std::string PrecReal::to_canonical() const {
  if (!mpfr_number_p(value_)) throw std::domain_error("PrecReal is not finite");
  std::string out;
  const std::string prec = "@" + std::to_string(precision());
  if (is_zero()) return "0x0p0" + prec;
  BigInt significand;
  long exp = mpfr_get_z_2exp(significand.get_mpz_t(), value_);
  const mp_bitcnt_t trailing = mpz_scan1(significand.get_mpz_t(), 0);
  significand >>= trailing;
  exp += static_cast<long>(trailing);
  if (significand < 0) {
    out += '-';
    significand = -significand;
  }
  out += "0x" + significand.get_str(16) + "p" + std::to_string(exp) + prec;
  return out;
}

PrecReal PrecReal::from_canonical(std::string_view text) {
  const auto fail = [&] { return std::invalid_argument("malformed PrecReal: " + std::string(text)); };
  bool negative = false;
  std::string_view s = text;
  if (!s.empty() && s.front() == '-') {
    negative = true;
    s.remove_prefix(1);
  }
  if (s.substr(0, 2) != "0x") throw fail();
  s.remove_prefix(2);
  const auto p = s.find('p');
  const auto at = s.find('@');
  if (p == std::string_view::npos || at == std::string_view::npos || at < p) throw fail();
  BigInt significand;
  if (significand.set_str(std::string(s.substr(0, p)), 16) != 0) throw fail();
  long exp = 0;
  long bits = 0;
  const auto exp_text = s.substr(p + 1, at - p - 1);
  const auto bits_text = s.substr(at + 1);
  if (std::from_chars(exp_text.data(), exp_text.data() + exp_text.size(), exp).ec != std::errc{} ||
      std::from_chars(bits_text.data(), bits_text.data() + bits_text.size(), bits).ec != std::errc{} ||
      bits < MPFR_PREC_MIN) {
    throw fail();
  }
  if (negative) significand = -significand;
  PrecReal out(static_cast<mpfr_prec_t>(bits));
  mpfr_set_z_2exp(out.value_, significand.get_mpz_t(), exp, kRound);
  return out;
}

std::string PrecReal::to_summary() const {
  // Shortest decimal that reads back to the same 53-bit value; MPFR's exponent
  // range keeps values far outside double range (e.g. 2^-1106) meaningful.
  mpfr_t v, back;
  mpfr_init2(v, 53);
  mpfr_init2(back, 53);
  mpfr_set(v, value_, MPFR_RNDN);
  std::string out;
  if (mpfr_zero_p(v)) {
    out = mpfr_signbit(v) ? "-0" : "0";
  } else if (!mpfr_number_p(v)) {
    out = mpfr_nan_p(v) ? "nan" : (mpfr_sgn(v) < 0 ? "-inf" : "inf");
  } else {
    for (int digits = 1; digits <= 17; ++digits) {
      char* text = nullptr;
      if (mpfr_asprintf(&text, "%.*Rg", digits, v) < 0) throw std::runtime_error("mpfr_asprintf failed");
      out = text;
      mpfr_free_str(text);
      mpfr_strtofr(back, out.c_str(), nullptr, 10, MPFR_RNDN);
      if (mpfr_equal_p(back, v)) break;
    }
  }
  mpfr_clear(v);
  mpfr_clear(back);
  return out;
}

PrecReal PrecReal::operator-() const {
  PrecReal out(*this);
  mpfr_neg(out.value_, out.value_, kRound);
  return out;
}

PrecReal& PrecReal::operator+=(const PrecReal& rhs) {
  widen(value_, rhs.precision());
  mpfr_add(value_, value_, rhs.value_, kRound);
  return *this;
}

PrecReal& PrecReal::operator-=(const PrecReal& rhs) {
  widen(value_, rhs.precision());
  mpfr_sub(value_, value_, rhs.value_, kRound);
  return *this;
}

PrecReal& PrecReal::operator*=(const PrecReal& rhs) {
  widen(value_, rhs.precision());
  mpfr_mul(value_, value_, rhs.value_, kRound);
  return *this;
}

PrecReal& PrecReal::operator/=(const PrecReal& rhs) {
  if (rhs.is_zero()) throw std::domain_error("PrecReal division by zero");
  widen(value_, rhs.precision());
  mpfr_div(value_, value_, rhs.value_, kRound);
  return *this;
}

PrecReal& PrecReal::operator*=(const BigInt& rhs) {
  mpfr_mul_z(value_, value_, rhs.get_mpz_t(), kRound);
  return *this;
}

std::partial_ordering operator<=>(const PrecReal& a, const PrecReal& b) {
  if (mpfr_unordered_p(a.value_, b.value_)) return std::partial_ordering::unordered;
  const int c = mpfr_cmp(a.value_, b.value_);
  if (c < 0) return std::partial_ordering::less;
  if (c > 0) return std::partial_ordering::greater;
  return std::partial_ordering::equivalent;
}

PrecReal abs(const PrecReal& x) { return x.sign() < 0 ? -x : x; }

PrecReal square(const PrecReal& x) {
  PrecReal out(x.precision());
  mpfr_sqr(out.get(), x.get(), kRound);
  return out;
}

PrecReal sqrt_prec(const PrecReal& a, mpfr_prec_t bits) {
  if (a.sign() < 0) throw std::domain_error("sqrt_prec of a negative value");
  // Two guard bits: a correctly rounded root r = sqrt(a)(1+d), |d| <= 2^-(bits+2),
  // gives |r^2 - a| <= a * 2^-(bits+1) * (1 + 2^-(bits+3)).
  PrecReal out(bits + 2);
  mpfr_sqrt(out.get(), a.get(), kRound);
  return out;
}

Rational truncate_to_bits(const Rational& x, unsigned long bits) {
  if (bits < 1) throw std::invalid_argument("truncate_to_bits needs bits >= 1");
  BigInt scaled_num = abs(x.get_num());
  scaled_num <<= bits;
  BigInt mag = scaled_num / x.get_den();  // floor, both nonnegative
  Rational out(x.get_num() < 0 ? BigInt(-mag) : mag);
  mpq_div_2exp(out.get_mpq_t(), out.get_mpq_t(), bits);
  return out;
}

BigInt truncate_scaled(const PrecReal& x, unsigned long bits) {
  if (bits < 1) throw std::invalid_argument("truncate_to_bits needs bits >= 1");
  PrecReal scaled(x.precision());
  mpfr_mul_2ui(scaled.get(), x.get(), bits, kRound);  // exact
  BigInt out;
  mpfr_get_z(out.get_mpz_t(), scaled.get(), MPFR_RNDZ);
  return out;
}

Rational truncate_to_bits(const PrecReal& x, unsigned long bits) {
  Rational out(truncate_scaled(x, bits));
  mpq_div_2exp(out.get_mpq_t(), out.get_mpq_t(), bits);
  return out;
}

BigInt gcd_vector(std::span<const BigInt> values) {
  if (values.empty()) throw std::invalid_argument("gcd_vector of an empty sequence");
  BigInt g = 0;
  for (const auto& v : values) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
    if (g == 1) break;
  }
  return g;
}

std::size_t bit_length(const BigInt& x) { return x == 0 ? 0 : mpz_sizeinbase(x.get_mpz_t(), 2); }

unsigned long ceil_log2(unsigned long x) {
  if (x == 0) throw std::invalid_argument("ceil_log2(0)");
  unsigned long bits = 0;
  while ((1UL << bits) < x) ++bits;
  return bits;
}

BigInt ceil_sqrt(const BigInt& x) {
  if (x < 0) throw std::domain_error("ceil_sqrt of a negative value");
  BigInt r;
  mpz_sqrt(r.get_mpz_t(), x.get_mpz_t());
  if (r * r < x) ++r;
  return r;
}

BigInt pow2_int(unsigned long exponent) {
  BigInt out = 1;
  out <<= exponent;
  return out;
}

BigInt round_nearest(const Rational& q) {
  // floor(|q| + 1/2) with the sign restored.
  BigInt num = abs(q.get_num());
  BigInt out = (2 * num + q.get_den()) / (2 * q.get_den());
  return q < 0 ? BigInt(-out) : out;
}

BigInt floor_div(const BigInt& a, const BigInt& b) {
  BigInt out;
  mpz_fdiv_q(out.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return out;
}

std::string to_string(const BigInt& x) { return x.get_str(10); }

std::string to_string(const Rational& q) {
  Rational c(q);
  c.canonicalize();
  return c.get_num().get_str(10) + "/" + c.get_den().get_str(10);
}

BigInt parse_bigint(std::string_view text) {
  std::string s(text);
  if (!s.empty() && s.front() == '+') s.erase(0, 1);
  BigInt out;
  if (s.empty() || out.set_str(s, 10) != 0) throw std::invalid_argument("not an integer: " + std::string(text));
  return out;
}

namespace {

// Exact value of a decimal literal such as "-0.75" or "1.5e-3".
Rational parse_decimal(std::string_view text) {
  const auto bad = [&] { return std::invalid_argument("malformed decimal: " + std::string(text)); };
  std::string_view mant = text;
  long exp10 = 0;
  if (const auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    mant = text.substr(0, e);
    std::string_view et = text.substr(e + 1);
    if (!et.empty() && et.front() == '+') et.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(et.data(), et.data() + et.size(), exp10);
    if (ec != std::errc() || ptr != et.data() + et.size() || et.empty()) throw bad();
  }
  bool neg = false;
  if (!mant.empty() && (mant.front() == '-' || mant.front() == '+')) {
    neg = mant.front() == '-';
    mant.remove_prefix(1);
  }
  std::string digits;
  bool seen_dot = false;
  for (char ch : mant) {
    if (ch == '.' && !seen_dot) {
      seen_dot = true;
    } else if (std::isdigit(static_cast<unsigned char>(ch))) {
      digits.push_back(ch);
      if (seen_dot) --exp10;
    } else {
      throw bad();
    }
  }
  if (digits.empty()) throw bad();
  Rational out{BigInt(digits, 10)};
  BigInt scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
  if (exp10 < 0) {
    out /= scale;
  } else {
    out *= scale;
  }
  out.canonicalize();
  return neg ? Rational(-out) : out;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    if (text.find_first_of(".eE") != std::string_view::npos) return parse_decimal(text);
    return Rational(parse_bigint(text));
  }
  BigInt den = parse_bigint(text.substr(slash + 1));
  if (den == 0) throw std::invalid_argument("zero denominator: " + std::string(text));
  Rational out(parse_bigint(text.substr(0, slash)), den);
  out.canonicalize();
  return out;
}

PrecReal hermitian_cross(const PrecComplex& a, const PrecComplex& b) {
  PrecReal out = a.re * b.re + a.im * b.im;
  mpfr_mul_2ui(out.get(), out.get(), 1, kRound);
  return out;
}

namespace {

class ExprParser {
 public:
  ExprParser(std::string_view text, mpfr_prec_t bits) : text_(text), bits_(bits + 32) {}

  PrecReal parse() {
    PrecReal total(bits_);
    bool first = true;
    while (true) {
      skip_space();
      int sign = 1;
      if (peek() == '+' || peek() == '-') {
        sign = get() == '-' ? -1 : 1;
      } else if (!first) {
        break;
      }
      PrecReal term = parse_term();
      total = sign > 0 ? total + term : total - term;
      first = false;
      skip_space();
      if (pos_ >= text_.size()) break;
    }
    skip_space();
    if (pos_ != text_.size()) fail();
    return total;
  }

 private:
  PrecReal parse_term() {
    PrecReal value = parse_factor();
    while (true) {
      skip_space();
      if (peek() == '*') {
        get();
        value *= parse_factor();
      } else if (peek() == '/') {
        get();
        value /= parse_factor();
      } else {
        return value;
      }
    }
  }

  PrecReal parse_factor() {
    skip_space();
    if (text_.substr(pos_, 5) == "sqrt(") {
      pos_ += 5;
      BigInt radicand = parse_integer();
      skip_space();
      if (get() != ')') fail();
      if (radicand < 0) fail();
      return sqrt_prec(PrecReal(radicand, bits_), bits_);
    }
    if (peek() == '(') {
      get();
      std::size_t depth = 1;
      const std::size_t start = pos_;
      while (pos_ < text_.size() && depth > 0) {
        const char c = get();
        depth += c == '(' ? 1 : 0;
        depth -= c == ')' ? 1 : 0;
      }
      if (depth != 0) fail();
      return ExprParser(text_.substr(start, pos_ - start - 1), bits_).parse();
    }
    return PrecReal(parse_integer(), bits_);
  }

  BigInt parse_integer() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail();
    return parse_bigint(text_.substr(start, pos_ - start));
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  char get() { return pos_ < text_.size() ? text_[pos_++] : '\0'; }
  [[noreturn]] void fail() const { throw std::invalid_argument("malformed real expression: " + std::string(text_)); }

  std::string_view text_;
  mpfr_prec_t bits_;
  std::size_t pos_ = 0;
};

}  // namespace

PrecReal parse_real_expr(std::string_view text, mpfr_prec_t bits) {
  return ExprParser(text, bits).parse().with_precision(bits);
}

}  // namespace latrec
