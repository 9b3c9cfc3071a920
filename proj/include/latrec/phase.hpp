#pragma once

#include "latrec/recovery.hpp"

namespace latrec {

/// Complex support a_1..a_R with its derived real set S'.
struct ComplexSupport {
  std::vector<PrecComplex> values;
  std::vector<std::pair<std::string, std::string>> labels;  // (re, im) expressions
  RealVector sprime;
  bool screened = false;

  std::size_t size() const { return values.size(); }
};

/// |a_d|^2 for each d, then 2 Re(conj(a_i) a_j) for i < j in lexicographic order.
/// Throws std::invalid_argument when a derived entry is exactly zero.
RealVector build_sprime(const std::vector<PrecComplex>& values);
/// Index of the cross term (k, l), k < l, inside build_sprime's output.
std::size_t sprime_cross_index(std::size_t r, std::size_t k, std::size_t l);

/// Parses (re, im) expressions at `bits` and screens S'.
Outcome<ComplexSupport> make_complex_support(const std::vector<std::pair<std::string, std::string>>& exprs,
                                             mpfr_prec_t bits);

/// Y^2 - |<X, beta>|^2 check helper: |<X, beta>|^2 at `bits`.
PrecReal magnitude_sq(const RealVector& x, const std::vector<std::size_t>& beta, const ComplexSupport& s,
                      mpfr_prec_t bits);

PrecisionPolicy phase_discrete_policy(const IntVector& x, std::size_t r);
Outcome<SupportVector> phase_discrete(const PrecReal& y, const IntVector& x, const ComplexSupport& s,
                                      const std::optional<PrecisionPolicy>& policy = std::nullopt,
                                      SolveStats* stats = nullptr);

/// Block of a build_L_phase entry.
struct PhaseTerm {
  int block = 1;       // 1: X_i^2 |a_k|^2, 2: X_i X_j |a_k|^2, 3: X_i X_j s_kl
  std::size_t i = 0, j = 0;
  std::size_t k = 0, l = 0;
};

/// S1 (i, then k), S2 (pairs i<j lexicographic, then k), S3 (pairs, then k<l lexicographic).
RealVector build_L_phase(const RealVector& x, const ComplexSupport& s, std::vector<PhaseTerm>* terms = nullptr);

PrecisionPolicy phase_continuous_policy(std::size_t p, std::size_t r);
Outcome<SupportVector> phase_continuous(const PrecReal& y, const RealVector& x, const ComplexSupport& s,
                                        const std::optional<PrecisionPolicy>& policy = std::nullopt,
                                        SolveStats* stats = nullptr);

}  // namespace latrec
