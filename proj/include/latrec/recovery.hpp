#pragma once

#include "latrec/arith.hpp"
#include "latrec/outcome.hpp"
#include "latrec/relation.hpp"
#include "latrec/rng.hpp"

#include <optional>
#include <string>
#include <variant>

namespace latrec {

using RealVector = std::vector<PrecReal>;
using RealMatrix = std::vector<RealVector>;  // row-major

struct IrrationalIndex {
  std::size_t k = 0;
  friend bool operator==(const IrrationalIndex&, const IrrationalIndex&) = default;
};

/// Either a rational value or a reference into a support set.
using SupportValue = std::variant<Rational, IrrationalIndex>;
using SupportVector = std::vector<SupportValue>;

/// Screened irrational support a_1..a_R (0-based here).
struct SupportSet {
  RealVector values;
  std::vector<std::string> labels;  // source expressions, for reports
  bool includes_one = false;        // {a_1..a_R, 1} screened independent

  std::size_t size() const { return values.size(); }
};

/// Parses and screens support expressions at `bits`. Fails when any value is
/// zero, values repeat, or the screen finds a relation (with 1 when with_one).
Outcome<SupportSet> make_support_set(const std::vector<std::string>& exprs, mpfr_prec_t bits, bool with_one);
/// sqrt of the first r square-free integers >= 2.
std::vector<std::string> default_support_exprs(std::size_t r);

PrecReal support_value_real(const SupportValue& v, const SupportSet& s, mpfr_prec_t bits);
std::string support_value_string(const SupportValue& v, const SupportSet* s = nullptr);

// Linear forms evaluated at `bits`.
PrecReal dot_real(const RealVector& row, const SupportVector& beta, const SupportSet* s, mpfr_prec_t bits);
PrecReal dot_int(const IntVector& row, const SupportVector& beta, const SupportSet* s, mpfr_prec_t bits);

/// Extended Lagarias-Odlyzko. X row-major n x p. Returns beta with
/// ||Y - X beta||_inf <= w_hat, re-verified exactly.
Outcome<IntVector> elo(const IntVector& y, const IntMatrix& x, const BigInt& r_hat, const BigInt& w_hat, Rng& rng,
                       SolveStats* stats = nullptr);

/// Lattice-based regression for real data truncated to N bits.
Outcome<std::vector<Rational>> lbr(const RealVector& y, const RealMatrix& x, long n_bits, const BigInt& q_hat,
                                   const BigInt& r_hat, const Rational& w_hat, Rng& rng, SolveStats* stats = nullptr);

struct JirssOptions {
  bool with_one = false;         // append 1 to each per-row relation search
  bool allow_uncovered = false;  // leave indices without a support value unassigned
  std::optional<PrecisionPolicy> policy;
};

/// Per-slot result: support index or nothing (only with allow_uncovered).
using SlotAssignment = std::vector<std::optional<std::size_t>>;

Outcome<SlotAssignment> jirss_assign(const RealVector& y, const IntMatrix& x, const SupportSet& s,
                                     const JirssOptions& opts, SolveStats* stats = nullptr);
Outcome<SupportVector> jirss(const RealVector& y, const IntMatrix& x, const SupportSet& s,
                             const std::optional<PrecisionPolicy>& policy = std::nullopt, SolveStats* stats = nullptr);
/// Policy JIRSS uses for a row when none is given.
PrecisionPolicy jirss_policy(const IntMatrix& x, const SupportSet& s, bool with_one, const BigInt& extra = 1);

Outcome<SupportVector> ihdr(const PrecReal& y, const RealVector& x, const SupportSet& s,
                            const std::optional<PrecisionPolicy>& policy = std::nullopt, SolveStats* stats = nullptr);
PrecisionPolicy ihdr_policy(std::size_t p, std::size_t r);

Outcome<SupportVector> mirr(const RealVector& y, const IntMatrix& x, const BigInt& r_hat, const BigInt& q_hat,
                            const SupportSet& s, Rng& rng, const std::optional<PrecisionPolicy>& policy = std::nullopt,
                            SolveStats* stats = nullptr);

Outcome<SupportVector> mirr_c(const RealVector& y, const RealMatrix& x, long n_bits, const BigInt& r_hat,
                              const BigInt& q_hat, const SupportSet& s, Rng& rng,
                              const std::optional<PrecisionPolicy>& policy = std::nullopt, SolveStats* stats = nullptr);
PrecisionPolicy mirr_c_policy(std::size_t p, std::size_t r, const BigInt& q_hat, const BigInt& r_hat);

Outcome<SupportVector> mixed_ira_only(const PrecReal& y, const RealVector& x, const BigInt& q_hat, const BigInt& r_hat,
                                      const SupportSet& s, const std::optional<PrecisionPolicy>& policy = std::nullopt,
                                      SolveStats* stats = nullptr);
PrecisionPolicy mixed_ira_policy(std::size_t p, std::size_t r, const BigInt& q_hat, const BigInt& r_hat);

}  // namespace latrec
