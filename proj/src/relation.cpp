#include "latrec/relation.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace latrec {

PrecisionPolicy default_policy(std::size_t d, long coeff_bits) {
  PrecisionPolicy p;
  p.working_bits = (3 * static_cast<long>(d) * (coeff_bits + 16) + 1) / 2;
  p.detect_tolerance_bits = p.working_bits / 2;
  p.relation_bound_bits = std::min(coeff_bits + 16, p.working_bits - p.detect_tolerance_bits);
  p.max_iterations = 200 * static_cast<long>(d * d) * (p.relation_bound_bits + static_cast<long>(d)) + 1000;
  return p;
}

PrecisionPolicy screening_policy(std::size_t d) {
  PrecisionPolicy p;
  p.working_bits = (3 * static_cast<long>(d) * 80 + 1) / 2;
  p.detect_tolerance_bits = p.working_bits / 2;
  p.relation_bound_bits = 64;
  p.max_iterations = 200 * static_cast<long>(d * d) * (64 + static_cast<long>(d)) + 1000;
  return p;
}

void validate_policy(const PrecisionPolicy& p) {
  if (p.working_bits < 2 || p.detect_tolerance_bits < 1 || p.detect_tolerance_bits >= p.working_bits ||
      p.max_iterations < 1 || p.relation_bound_bits < 1) {
    throw std::invalid_argument("inconsistent precision policy");
  }
}

PrecReal relation_residual(std::span<const PrecReal> b, std::span<const BigInt> m) {
  if (b.size() != m.size()) throw std::invalid_argument("relation length mismatch");
  mpfr_prec_t in_prec = 2;
  std::size_t m_bits = 1;
  for (const auto& x : b) in_prec = std::max(in_prec, x.precision());
  for (const auto& x : m) m_bits = std::max(m_bits, bit_length(x));
  // Each product is exact; the sum loses at most one rounding at this width.
  const mpfr_prec_t bits = in_prec + static_cast<mpfr_prec_t>(m_bits) + 64;
  PrecReal sum(bits), term(bits);
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (m[i] == 0) continue;
    mpfr_mul_z(term.get(), b[i].get(), m[i].get_mpz_t(), MPFR_RNDN);
    mpfr_add(sum.get(), sum.get(), term.get(), MPFR_RNDN);
  }
  return abs(sum);
}

bool verify_relation(std::span<const PrecReal> b, std::span<const BigInt> m, long tolerance_bits) {
  if (b.size() != m.size()) throw std::invalid_argument("verify_relation: length mismatch");
  if (std::all_of(m.begin(), m.end(), [](const BigInt& x) { return x == 0; })) {
    throw std::invalid_argument("verify_relation: zero relation");
  }
  PrecReal max_b(64);
  for (const auto& x : b) {
    PrecReal a = abs(x);
    if (a > max_b) max_b = a;
  }
  PrecReal bound = max_b;
  mpfr_mul_2si(bound.get(), bound.get(), -tolerance_bits, MPFR_RNDN);
  return relation_residual(b, m) < bound;
}

namespace {

class Pslq {
 public:
  Pslq(std::span<const PrecReal> b, const PrecisionPolicy& policy)
      : n_(b.size()), w_(policy.working_bits), policy_(policy), input_(b), y_(n_, PrecReal(w_)),
        h_(n_ * (n_ - 1), PrecReal(w_)), a_(n_, IntVector(n_, 0)), bm_(n_, IntVector(n_, 0)), t_(w_), u_(w_),
        v_(w_) {
    for (std::size_t i = 0; i < n_; ++i) {
      a_[i][i] = 1;
      bm_[i][i] = 1;
    }
  }

  PslqResult run() {
    init();
    PrecReal gamma = PrecReal(2L, w_) / sqrt_prec(PrecReal(3L, w_), w_);
    std::vector<PrecReal> gpow(n_, PrecReal(w_));
    gpow[0] = gamma;
    for (std::size_t i = 1; i < n_; ++i) gpow[i] = gpow[i - 1] * gamma;
    const PrecReal tol_y = PrecReal::pow2(-policy_.detect_tolerance_bits, w_);
    const std::size_t exhaust_bits = static_cast<std::size_t>(policy_.working_bits - policy_.detect_tolerance_bits);

    if (auto r = check_relation(tol_y)) return *r;
    long it = 0;
    while (it < policy_.max_iterations) {
      ++it;
      // Select the row with the largest weighted diagonal.
      std::size_t m = 0;
      PrecReal best(w_);
      for (std::size_t i = 0; i + 1 < n_; ++i) {
        mpfr_abs(t_.get(), h(i, i).get(), MPFR_RNDN);
        mpfr_mul(t_.get(), t_.get(), gpow[i].get(), MPFR_RNDN);
        if (i == 0 || t_ > best) {
          best = t_;
          m = i;
        }
      }
      std::swap(y_[m], y_[m + 1]);
      std::swap(a_[m], a_[m + 1]);
      for (std::size_t j = 0; j + 1 < n_; ++j) mpfr_swap(h(m, j).get(), h(m + 1, j).get());
      for (std::size_t r = 0; r < n_; ++r) std::swap(bm_[r][m], bm_[r][m + 1]);
      if (m + 2 < n_) corner(m);
      for (std::size_t i = m + 1; i < n_; ++i) {
        for (std::size_t j = std::min(i - 1, m + 1) + 1; j-- > 0;) reduce(i, j);
      }
      iterations_ = it;
      if (auto r = check_relation(tol_y)) return *r;
      // Norm bound: any relation has norm >= 1 / max |H_jj|.
      PrecReal hmax(w_);
      for (std::size_t j = 0; j + 1 < n_; ++j) {
        mpfr_abs(t_.get(), h(j, j).get(), MPFR_RNDN);
        if (t_ > hmax) hmax = t_;
      }
      if (hmax.is_zero()) return PrecisionExhausted{it, "H diagonal vanished without a verified relation"};
      const double bound_log2 = -(std::log2(std::fabs(mpfr_get_d_2exp(&exp_, hmax.get(), MPFR_RNDN))) + exp_);
      if (bound_log2 >= static_cast<double>(policy_.relation_bound_bits)) return NotFound{it, bound_log2};
      std::size_t max_bits = 0;
      for (std::size_t r = 0; r < n_; ++r) {
        for (std::size_t c = 0; c < n_; ++c) {
          max_bits = std::max({max_bits, bit_length(a_[r][c]), bit_length(bm_[r][c])});
        }
      }
      if (max_bits > exhaust_bits) {
        return PrecisionExhausted{it, "matrix entries exceed the working precision budget"};
      }
    }
    return PrecisionExhausted{it, "iteration cap reached"};
  }

 private:
  PrecReal& h(std::size_t i, std::size_t j) { return h_[i * (n_ - 1) + j]; }

  void init() {
    std::vector<PrecReal> x(n_, PrecReal(w_)), s(n_, PrecReal(w_));
    for (std::size_t i = 0; i < n_; ++i) mpfr_set(x[i].get(), input_[i].get(), MPFR_RNDN);
    PrecReal acc(w_);
    for (std::size_t k = n_; k-- > 0;) {
      mpfr_fma(acc.get(), x[k].get(), x[k].get(), acc.get(), MPFR_RNDN);
      mpfr_sqrt(s[k].get(), acc.get(), MPFR_RNDN);
    }
    const PrecReal s0 = s[0];
    for (std::size_t k = 0; k < n_; ++k) {
      mpfr_div(y_[k].get(), x[k].get(), s0.get(), MPFR_RNDN);
      mpfr_div(s[k].get(), s[k].get(), s0.get(), MPFR_RNDN);
    }
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j + 1 < n_; ++j) {
        if (j > i) {
          mpfr_set_zero(h(i, j).get(), 1);
        } else if (j == i) {
          mpfr_div(h(i, j).get(), s[j + 1].get(), s[j].get(), MPFR_RNDN);
        } else {
          mpfr_mul(t_.get(), y_[i].get(), y_[j].get(), MPFR_RNDN);
          mpfr_mul(u_.get(), s[j].get(), s[j + 1].get(), MPFR_RNDN);
          mpfr_div(h(i, j).get(), t_.get(), u_.get(), MPFR_RNDN);
          mpfr_neg(h(i, j).get(), h(i, j).get(), MPFR_RNDN);
        }
      }
    }
    for (std::size_t i = 1; i < n_; ++i) {
      for (std::size_t j = i; j-- > 0;) reduce(i, j);
    }
  }

  // Hermite reduction of row i against row j < i.
  void reduce(std::size_t i, std::size_t j) {
    if (h(j, j).is_zero()) return;
    mpfr_div(t_.get(), h(i, j).get(), h(j, j).get(), MPFR_RNDN);
    mpfr_round(t_.get(), t_.get());
    if (mpfr_zero_p(t_.get())) return;
    mpfr_get_z(q_.get_mpz_t(), t_.get(), MPFR_RNDN);
    mpfr_fma(y_[j].get(), t_.get(), y_[i].get(), y_[j].get(), MPFR_RNDN);
    for (std::size_t k = 0; k <= j; ++k) {
      mpfr_mul(u_.get(), t_.get(), h(j, k).get(), MPFR_RNDN);
      mpfr_sub(h(i, k).get(), h(i, k).get(), u_.get(), MPFR_RNDN);
    }
    for (std::size_t k = 0; k < n_; ++k) {
      mpz_submul(a_[i][k].get_mpz_t(), q_.get_mpz_t(), a_[j][k].get_mpz_t());
      mpz_addmul(bm_[k][j].get_mpz_t(), q_.get_mpz_t(), bm_[k][i].get_mpz_t());
    }
  }

  void corner(std::size_t m) {
    PrecReal t0(w_), t1(w_), t2(w_);
    mpfr_hypot(t0.get(), h(m, m).get(), h(m, m + 1).get(), MPFR_RNDN);
    mpfr_div(t1.get(), h(m, m).get(), t0.get(), MPFR_RNDN);
    mpfr_div(t2.get(), h(m, m + 1).get(), t0.get(), MPFR_RNDN);
    for (std::size_t i = m; i < n_; ++i) {
      mpfr_set(t_.get(), h(i, m).get(), MPFR_RNDN);
      mpfr_set(u_.get(), h(i, m + 1).get(), MPFR_RNDN);
      // H_im = t1 t3 + t2 t4; H_i,m+1 = -t2 t3 + t1 t4
      mpfr_mul(v_.get(), t2.get(), u_.get(), MPFR_RNDN);
      mpfr_fma(h(i, m).get(), t1.get(), t_.get(), v_.get(), MPFR_RNDN);
      mpfr_mul(v_.get(), t2.get(), t_.get(), MPFR_RNDN);
      mpfr_fms(h(i, m + 1).get(), t1.get(), u_.get(), v_.get(), MPFR_RNDN);
    }
  }

  // A column of B whose y entry vanished and whose relation verifies on the input.
  std::optional<Relation> check_relation(const PrecReal& tol_y) {
    std::optional<Relation> best;
    BigInt best_norm;
    for (std::size_t j = 0; j < n_; ++j) {
      mpfr_abs(t_.get(), y_[j].get(), MPFR_RNDN);
      if (!(t_ < tol_y)) continue;
      IntVector m(n_);
      for (std::size_t r = 0; r < n_; ++r) m[r] = bm_[r][j];
      if (std::all_of(m.begin(), m.end(), [](const BigInt& x) { return x == 0; })) continue;
      if (!verify_relation(input_, m, policy_.detect_tolerance_bits)) continue;
      BigInt nrm = 0;
      for (const auto& x : m) nrm += x * x;
      if (best && nrm >= best_norm) continue;
      best_norm = nrm;
      best = Relation{m, relation_residual(input_, m), policy_.detect_tolerance_bits, iterations_, w_};
    }
    return best;
  }

  std::size_t n_;
  mpfr_prec_t w_;
  PrecisionPolicy policy_;
  std::span<const PrecReal> input_;
  std::vector<PrecReal> y_;
  std::vector<PrecReal> h_;
  std::vector<IntVector> a_;
  std::vector<IntVector> bm_;
  PrecReal t_, u_, v_;
  BigInt q_;
  long iterations_ = 0;
  long exp_ = 0;
};

void check_input(std::span<const PrecReal> b) {
  if (b.size() < 2) throw std::invalid_argument("pslq needs at least two entries");
  for (const auto& x : b) {
    if (x.is_zero()) throw std::invalid_argument("pslq input contains an exact zero");
    if (!mpfr_number_p(x.get())) throw std::invalid_argument("pslq input is not finite");
  }
}

}  // namespace

PslqResult pslq_find_relation(std::span<const PrecReal> b, const PrecisionPolicy& policy) {
  validate_policy(policy);
  check_input(b);
  return Pslq(b, policy).run();
}

PslqResult pslq_with_retry(std::span<const PrecReal> b, const PrecisionPolicy& policy, int retries) {
  validate_policy(policy);
  check_input(b);
  mpfr_prec_t in_prec = b[0].precision();
  for (const auto& x : b) in_prec = std::min(in_prec, x.precision());
  PrecisionPolicy p = policy;
  PslqResult result = PrecisionExhausted{};
  for (int attempt = 0; attempt <= retries; ++attempt) {
    p.detect_tolerance_bits = std::max(1L, std::min(p.detect_tolerance_bits, static_cast<long>(in_prec) - 32));
    result = Pslq(b, p).run();
    if (!std::holds_alternative<PrecisionExhausted>(result)) return result;
    p.working_bits *= 2;
    p.detect_tolerance_bits = p.working_bits / 2;
    p.max_iterations *= 2;
  }
  return result;
}

ScreenResult screen_rational_independence(std::span<const PrecReal> values, const PrecisionPolicy& policy) {
  if (values.empty()) throw std::invalid_argument("screen: empty value set");
  if (values.size() == 1) {
    if (values[0].is_zero()) throw std::invalid_argument("screen: zero value");
    return IndependentUpToBound{policy.relation_bound_bits, 0};
  }
  PslqResult r = pslq_find_relation(values, policy);
  if (auto* rel = std::get_if<Relation>(&r)) return DependentWithRelation{std::move(*rel)};
  if (auto* nf = std::get_if<NotFound>(&r)) return IndependentUpToBound{policy.relation_bound_bits, nf->iterations};
  return std::get<PrecisionExhausted>(r);
}

ScreenResult screen_rational_independence(std::span<const PrecReal> values) {
  return screen_rational_independence(values, screening_policy(values.size()));
}

}  // namespace latrec
