#pragma once

#include "latrec/phase.hpp"
#include "latrec/recovery.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace latrec {

enum class Kind { elo, lbr, jirss, ihdr, mirr, mirrc, mixed_ira, phase_d, phase_c, subsetsum, dep_subsetsum };

std::string kind_name(Kind k);
/// Throws std::invalid_argument for unknown names.
Kind parse_kind(std::string_view name);
bool kind_has_real_x(Kind k);
bool kind_has_real_y(Kind k);

/// Generation parameters. Fields a kind does not use are ignored.
struct GenParams {
  long n = 1;
  long p = 10;
  /// Discrete X: entries uniform in {1..2^x_bits} (0 means "use the kind's threshold").
  /// Continuous X: precision of each entry.
  long x_bits = 0;
  /// Continuous X distribution: "uniform" on (0,1) or "gaussian" (mean 0, sd 1).
  std::string x_dist = "uniform";
  /// Truncation level for lbr and mirrc (0 means "use the threshold calculator").
  long N = 0;
  BigInt Q = 1, R = 1;
  std::optional<BigInt> Q_hat, R_hat;  // default Q, R
  /// elo: beta entries uniform in {beta_lo..R}; default -R.
  std::optional<BigInt> beta_lo;
  /// elo: integer noise uniform in [-w_max, w_max]; w_hat defaults to w_max.
  BigInt w_max = 0;
  std::optional<BigInt> w_hat;
  /// lbr: noise level, "0", a decimal, or "2^-k".
  std::string sigma = "0";
  /// lbr: "uniform" on (-sigma, sigma) or "gaussian" with sd sigma.
  std::string noise = "uniform";
  /// lbr: declared noise bound; defaults to sigma (uniform) or 8 sigma (gaussian).
  std::optional<Rational> W_hat;
  /// lbr: density bound used by the threshold calculator.
  Rational c = 1;
  /// Real supports; default sqrt of the first two square-free integers.
  std::vector<std::string> support;
  /// Complex supports for phase kinds, as (re, im) expressions.
  std::vector<std::pair<std::string, std::string>> complex_support;
  /// Mixed kinds: number of Q-rational slots; default p / 2.
  std::optional<long> rational_slots;
  /// Raises every construction and solver precision to at least this many bits.
  std::optional<long> precision_bits;

  BigInt q_hat() const { return Q_hat ? *Q_hat : Q; }
  BigInt r_hat() const { return R_hat ? *R_hat : R; }
};

PrecReal parse_sigma(std::string_view text, mpfr_prec_t bits);

/// Planted regression (or subset-sum / phase) instance. Y = X beta + W holds at construction_bits.
struct Instance {
  Kind kind = Kind::elo;
  GenParams params;
  std::uint64_t seed = 0;
  long construction_bits = 0;
  long N = 0;  // effective x_bits (discrete kinds) or truncation level (lbr, mirrc)
  IntMatrix x_int;
  RealMatrix x_real;
  IntVector y_int;
  RealVector y_real;
  std::optional<SupportVector> beta_true;
};

/// Resolves defaulted parameters (thresholds, supports) for the kind.
GenParams resolve_params(Kind kind, GenParams params);
Instance gen_instance(Kind kind, const GenParams& params, std::uint64_t seed);

SupportSet instance_support(const Instance& inst);
ComplexSupport instance_complex_support(const Instance& inst);
/// The precision policy the driver hands to the relation-based solvers.
std::optional<PrecisionPolicy> instance_policy(const Instance& inst);

struct RecoveryReport {
  Kind kind = Kind::elo;
  std::uint64_t seed = 0;
  std::optional<SupportVector> estimate;
  std::optional<Failure> failure;
  std::optional<bool> exact_match;  // present for planted instances
  SolveStats stats;
  double wall_ms = 0;
};

RecoveryReport solve_instance(const Instance& inst);

}  // namespace latrec
