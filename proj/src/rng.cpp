#include "latrec/rng.hpp"

#include <stdexcept>

namespace latrec {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the tag
  for (unsigned char c : tag) h = (h ^ c) * 0x100000001b3ULL;
  return mix64(mix64(mix64(master) ^ index) ^ h);
}

std::uint64_t Rng::below_u64(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("Rng::below_u64 needs bound >= 1");
  std::uint64_t mask = bound - 1;
  for (int s = 1; s < 64; s <<= 1) mask |= mask >> s;
  while (true) {
    const std::uint64_t v = eng_() & mask;
    if (v < bound) return v;
  }
}

BigInt Rng::below(const BigInt& bound) {
  if (bound < 1) throw std::invalid_argument("Rng::below needs bound >= 1");
  if (bound == 1) return 0;
  const std::size_t bits = bit_length(BigInt(bound - 1));
  BigInt out;
  while (true) {
    out = 0;
    std::size_t have = 0;
    while (have < bits) {
      out <<= 64;
      BigInt chunk;
      const std::uint64_t w = eng_();
      mpz_import(chunk.get_mpz_t(), 1, 1, sizeof(w), 0, 0, &w);
      out += chunk;
      have += 64;
    }
    out >>= (have - bits);
    if (out < bound) return out;
  }
}

BigInt Rng::range(const BigInt& lo, const BigInt& hi) {
  if (hi < lo) throw std::invalid_argument("Rng::range with hi < lo");
  return lo + below(hi - lo + 1);
}

long Rng::range(long lo, long hi) { return range(BigInt(lo), BigInt(hi)).get_si(); }

BigInt Rng::discrete_uniform(unsigned long bits) { return below(pow2_int(bits)) + 1; }

PrecReal Rng::uniform01(mpfr_prec_t bits) {
  BigInt k;
  do {
    k = below(pow2_int(static_cast<unsigned long>(bits)));
  } while (k == 0);
  PrecReal out(bits);
  mpfr_set_z_2exp(out.get(), k.get_mpz_t(), -static_cast<long>(bits), MPFR_RNDN);
  return out;
}

PrecReal Rng::uniform(const PrecReal& lo, const PrecReal& hi, mpfr_prec_t bits) {
  PrecReal u = uniform01(bits);
  return (lo + (hi - lo) * u).with_precision(bits);
}

PrecReal Rng::gaussian(mpfr_prec_t bits) {
  const mpfr_prec_t w = bits + 32;
  PrecReal u1 = uniform01(w), u2 = uniform01(w);
  PrecReal r(w), ang(w);
  mpfr_log(r.get(), u1.get(), MPFR_RNDN);
  mpfr_mul_si(r.get(), r.get(), -2, MPFR_RNDN);
  mpfr_sqrt(r.get(), r.get(), MPFR_RNDN);
  mpfr_const_pi(ang.get(), MPFR_RNDN);
  mpfr_mul_2ui(ang.get(), ang.get(), 1, MPFR_RNDN);
  mpfr_mul(ang.get(), ang.get(), u2.get(), MPFR_RNDN);
  mpfr_cos(ang.get(), ang.get(), MPFR_RNDN);
  return (r * ang).with_precision(bits);
}

}  // namespace latrec
