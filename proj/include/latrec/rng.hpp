#pragma once

#include "latrec/arith.hpp"

#include <cstdint>
#include <random>
#include <string_view>

namespace latrec {

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);
/// Stream seed for (master seed, index, tag); distinct tags give unrelated streams.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::string_view tag);

/// Seeded 64-bit generator with the draws the instance generators need.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  Rng(std::uint64_t master, std::uint64_t index, std::string_view tag) : eng_(derive_seed(master, index, tag)) {}

  std::uint64_t next() { return eng_(); }
  /// Uniform in [0, bound), bound >= 1.
  std::uint64_t below_u64(std::uint64_t bound);
  /// Uniform in [0, bound), bound >= 1.
  BigInt below(const BigInt& bound);
  /// Uniform in [lo, hi].
  BigInt range(const BigInt& lo, const BigInt& hi);
  long range(long lo, long hi);
  /// Uniform in {1, ..., 2^bits}.
  BigInt discrete_uniform(unsigned long bits);
  /// Uniform dyadic in (0, 1) with `bits` fractional bits, zero rejected.
  PrecReal uniform01(mpfr_prec_t bits);
  /// lo + (hi - lo) * uniform01.
  PrecReal uniform(const PrecReal& lo, const PrecReal& hi, mpfr_prec_t bits);
  /// Standard normal via Box-Muller at `bits`.
  PrecReal gaussian(mpfr_prec_t bits);

 private:
  std::mt19937_64 eng_;
};

}  // namespace latrec
