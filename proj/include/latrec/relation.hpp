#pragma once

#include "latrec/arith.hpp"

#include <span>
#include <variant>

namespace latrec {

struct PrecisionPolicy {
  long working_bits = 256;
  long detect_tolerance_bits = 128;
  long max_iterations = 100000;
  /// NotFound is reported once the PSLQ norm bound exceeds 2^relation_bound_bits.
  long relation_bound_bits = 64;
};

/// working = ceil(1.5 d (B + 16)), tolerance = working / 2, NotFound once the norm bound passes 2^(B + 16).
PrecisionPolicy default_policy(std::size_t d, long coeff_bits);
/// Bound 2^64 with working = ceil(1.5 d 80).
PrecisionPolicy screening_policy(std::size_t d);
/// Throws std::invalid_argument when the policy is inconsistent.
void validate_policy(const PrecisionPolicy& policy);

struct Relation {
  IntVector m;
  PrecReal residual;  // |<b, m>|
  long tolerance_bits = 0;
  long iterations = 0;
  long working_bits = 0;
};

struct NotFound {
  long iterations = 0;
  double norm_bound_log2 = 0;  // every relation has norm at least 2^this
};

struct PrecisionExhausted {
  long iterations = 0;
  std::string detail;
};

using PslqResult = std::variant<Relation, NotFound, PrecisionExhausted>;

/// One-level PSLQ with gamma = 2/sqrt(3). Throws std::invalid_argument on
/// fewer than two entries or any exactly zero entry.
PslqResult pslq_find_relation(std::span<const PrecReal> b, const PrecisionPolicy& policy);

/// pslq_find_relation, doubling working precision on PrecisionExhausted up to
/// `retries` times. The tolerance never exceeds the input precision minus 32 bits.
PslqResult pslq_with_retry(std::span<const PrecReal> b, const PrecisionPolicy& policy, int retries = 3);

/// |<b, m>| < 2^-tolerance_bits * max|b_i|, evaluated without rounding loss
/// beyond the precision of b.
bool verify_relation(std::span<const PrecReal> b, std::span<const BigInt> m, long tolerance_bits);

/// |<b, m>| computed at enough precision that only the inputs' rounding matters.
PrecReal relation_residual(std::span<const PrecReal> b, std::span<const BigInt> m);

struct IndependentUpToBound {
  long bound_bits = 0;
  long iterations = 0;
};
struct DependentWithRelation {
  Relation relation;
};
using ScreenResult = std::variant<IndependentUpToBound, DependentWithRelation, PrecisionExhausted>;

ScreenResult screen_rational_independence(std::span<const PrecReal> values, const PrecisionPolicy& policy);
/// Uses screening_policy(values.size()).
ScreenResult screen_rational_independence(std::span<const PrecReal> values);

}  // namespace latrec
