#include "latrec/recovery.hpp"

#include "latrec/lattice.hpp"
#include "latrec/subsetsum.hpp"

#include <algorithm>
#include <stdexcept>

namespace latrec {

namespace {

mpfr_prec_t max_prec(const RealVector& v) {
  mpfr_prec_t out = 64;
  for (const auto& x : v) out = std::max(out, x.precision());
  return out;
}

mpfr_prec_t max_prec(const RealMatrix& m) {
  mpfr_prec_t out = 64;
  for (const auto& row : m) out = std::max(out, max_prec(row));
  return out;
}

// |a - b| <= 2^-tol * max(1, |a|, |b|).
bool close_rel(const PrecReal& a, const PrecReal& b, long tol) {
  PrecReal scale = std::max({PrecReal(1L, 64), abs(a), abs(b)}, [](const PrecReal& l, const PrecReal& r) { return l < r; });
  mpfr_mul_2si(scale.get(), scale.get(), -tol, MPFR_RNDN);
  return abs(a - b) <= scale;
}

Failure pslq_failure(const std::string& stage, const PslqResult& r) {
  if (const auto* nf = std::get_if<NotFound>(&r)) {
    return fail(stage, "not_found", "no relation below 2^" + std::to_string(static_cast<long>(nf->norm_bound_log2)));
  }
  return fail(stage, "precision_exhausted", std::get<PrecisionExhausted>(r).detail);
}

// -m / b0 for every entry, failing unless each is an integer.
std::optional<IntVector> rescale_integral(const IntVector& m) {
  IntVector out(m.size());
  const BigInt& b0 = m[0];
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!mpz_divisible_p(m[i].get_mpz_t(), b0.get_mpz_t())) return std::nullopt;
    mpz_divexact(out[i].get_mpz_t(), m[i].get_mpz_t(), b0.get_mpz_t());
    out[i] = -out[i];
  }
  return out;
}

PrecReal scaled(const PrecReal& v, const BigInt& k) {
  PrecReal out(v.precision() + static_cast<mpfr_prec_t>(bit_length(k)) + 1);
  mpfr_mul_z(out.get(), v.get(), k.get_mpz_t(), MPFR_RNDN);
  return out;
}

PrecReal product(const PrecReal& a, const PrecReal& b) {
  PrecReal out(a.precision() + b.precision());
  mpfr_mul(out.get(), a.get(), b.get(), MPFR_RNDN);
  return out;
}

}  // namespace

std::vector<std::string> default_support_exprs(std::size_t r) {
  std::vector<std::string> out;
  for (long k = 2; out.size() < r; ++k) {
    bool square_free = true;
    for (long f = 2; f * f <= k; ++f) square_free = square_free && k % (f * f) != 0;
    if (square_free) out.push_back("sqrt(" + std::to_string(k) + ")");
  }
  return out;
}

Outcome<SupportSet> make_support_set(const std::vector<std::string>& exprs, mpfr_prec_t bits, bool with_one) {
  if (exprs.empty()) return fail("support", "empty");
  SupportSet s;
  s.labels = exprs;
  s.includes_one = with_one;
  const PrecisionPolicy screen = screening_policy(exprs.size() + (with_one ? 1 : 0));
  const mpfr_prec_t screen_bits = std::max<mpfr_prec_t>(bits, screen.working_bits + 64);
  RealVector probe;
  for (const auto& e : exprs) {
    s.values.push_back(parse_real_expr(e, bits));
    probe.push_back(parse_real_expr(e, screen_bits));
    if (probe.back().is_zero()) return fail("support", "zero_value", e);
  }
  for (std::size_t i = 0; i < probe.size(); ++i) {
    for (std::size_t j = i + 1; j < probe.size(); ++j) {
      if (close_rel(probe[i], probe[j], screen_bits / 2)) return fail("support", "duplicate_value", exprs[j]);
    }
  }
  if (with_one) probe.emplace_back(1L, screen_bits);
  const ScreenResult r = screen_rational_independence(probe, screen);
  if (const auto* dep = std::get_if<DependentWithRelation>(&r)) {
    std::string rel;
    for (const auto& c : dep->relation.m) rel += (rel.empty() ? "" : ",") + to_string(c);
    return fail("support", "dependent", "relation (" + rel + ")");
  }
  if (std::holds_alternative<PrecisionExhausted>(r)) return fail("support", "screen_precision_exhausted");
  return s;
}

PrecReal support_value_real(const SupportValue& v, const SupportSet& s, mpfr_prec_t bits) {
  if (const auto* q = std::get_if<Rational>(&v)) return PrecReal(*q, bits);
  const std::size_t k = std::get<IrrationalIndex>(v).k;
  if (k >= s.size()) throw std::out_of_range("support index out of range");
  return s.values[k].with_precision(bits);
}

std::string support_value_string(const SupportValue& v, const SupportSet* s) {
  if (const auto* q = std::get_if<Rational>(&v)) return to_string(*q);
  const std::size_t k = std::get<IrrationalIndex>(v).k;
  if (s && k < s->labels.size()) return "a" + std::to_string(k) + ":" + s->labels[k];
  return "a" + std::to_string(k);
}

PrecReal dot_real(const RealVector& row, const SupportVector& beta, const SupportSet* s, mpfr_prec_t bits) {
  PrecReal sum(bits);
  for (std::size_t j = 0; j < row.size(); ++j) {
    PrecReal v = s ? support_value_real(beta[j], *s, bits) : PrecReal(std::get<Rational>(beta[j]), bits);
    sum += row[j].with_precision(bits) * v;
  }
  return sum;
}

PrecReal dot_int(const IntVector& row, const SupportVector& beta, const SupportSet* s, mpfr_prec_t bits) {
  PrecReal sum(bits);
  for (std::size_t j = 0; j < row.size(); ++j) {
    PrecReal v = s ? support_value_real(beta[j], *s, bits) : PrecReal(std::get<Rational>(beta[j]), bits);
    v *= row[j];
    sum += v;
  }
  return sum;
}

// ---------------------------------------------------------------------------

Outcome<IntVector> elo(const IntVector& y, const IntMatrix& x, const BigInt& r_hat, const BigInt& w_hat, Rng& rng,
                       SolveStats* stats) {
  const std::size_t n = y.size();
  if (n == 0 || x.size() != n || x[0].empty()) throw std::invalid_argument("elo: bad shape");
  const std::size_t p = x[0].size();
  for (const auto& row : x) {
    if (row.size() != p) throw std::invalid_argument("elo: ragged X");
  }
  if (r_hat < 1) throw std::invalid_argument("elo: R_hat must be >= 1");
  if (w_hat < 0) throw std::invalid_argument("elo: W_hat must be >= 0");

  IntVector z(p);
  for (auto& zi : z) zi = rng.range(BigInt(r_hat + 1), BigInt(2 * r_hat + ceil_log2(p)));
  IntVector y2(n);
  for (std::size_t i = 0; i < n; ++i) {
    BigInt y1 = y[i];
    for (std::size_t k = 0; k < p; ++k) y1 += x[i][k] * z[k];
    y2[i] = abs(y1) < 3 ? BigInt(3) : y1;
  }
  const BigInt w_eff = w_hat < 1 ? BigInt(1) : w_hat;
  const BigInt m = pow2_int(n + (p + 1) / 2 + 3) * static_cast<unsigned long>(p) *
                   (r_hat * ceil_sqrt(BigInt(static_cast<unsigned long>(p))) +
                    w_eff * ceil_sqrt(BigInt(static_cast<unsigned long>(n))));

  const std::size_t d = 2 * n + p;
  std::vector<IntVector> cols(d, IntVector(d, 0));
  for (std::size_t k = 0; k < p; ++k) {
    for (std::size_t i = 0; i < n; ++i) cols[k][i] = m * x[i][k];
    cols[k][n + k] = 1;
  }
  for (std::size_t i = 0; i < n; ++i) {
    cols[p + i][i] = -m * y2[i];
    cols[p + n + i][i] = m;
    cols[p + n + i][n + p + i] = 1;
  }
  LatticeBasis reduced = lll_reduce(LatticeBasis(std::move(cols)));
  if (stats) ++stats->lll_invocations;
  const IntVector& v = reduced.column(0);

  IntVector mid(v.begin() + static_cast<long>(n), v.begin() + static_cast<long>(n + p));
  const BigInt g = gcd_vector(mid);
  if (g == 0) return fail("elo", "gcd_zero", "middle block of the short vector is zero");
  // The translated vector beta + Z is positive; orient the short vector to match.
  BigInt sum = 0;
  for (const auto& t : mid) sum += t;
  const int orient = sum < 0 ? -1 : 1;
  IntVector beta(p);
  for (std::size_t k = 0; k < p; ++k) {
    BigInt q;
    mpz_divexact(q.get_mpz_t(), mid[k].get_mpz_t(), g.get_mpz_t());
    beta[k] = orient * q - z[k];
  }
  for (std::size_t i = 0; i < n; ++i) {
    BigInt r = y[i];
    for (std::size_t k = 0; k < p; ++k) r -= x[i][k] * beta[k];
    if (abs(r) > w_hat) return fail("elo", "verification", "residual exceeds W_hat in row " + std::to_string(i));
  }
  return beta;
}

Outcome<std::vector<Rational>> lbr(const RealVector& y, const RealMatrix& x, long n_bits, const BigInt& q_hat,
                                   const BigInt& r_hat, const Rational& w_hat, Rng& rng, SolveStats* stats) {
  const std::size_t n = y.size();
  if (n == 0 || x.size() != n || x[0].empty()) throw std::invalid_argument("lbr: bad shape");
  const std::size_t p = x[0].size();
  if (n_bits < 1) throw std::invalid_argument("lbr: N must be >= 1");
  if (q_hat < 1) throw std::invalid_argument("lbr: Q_hat must be >= 1");
  if (w_hat < 0) throw std::invalid_argument("lbr: W_hat must be >= 0");
  const auto nb = static_cast<unsigned long>(n_bits);

  IntVector ys(n);
  IntMatrix xs(n, IntVector(p));
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i].size() != p) throw std::invalid_argument("lbr: ragged X");
    ys[i] = q_hat * truncate_scaled(y[i], nb);
    for (std::size_t k = 0; k < p; ++k) xs[i][k] = truncate_scaled(x[i][k], nb);
  }
  // ceil(2 Q_hat (2^N W_hat + R_hat p))
  Rational w_elo = 2 * Rational(q_hat) * (Rational(pow2_int(nb)) * w_hat + Rational(r_hat * static_cast<unsigned long>(p)));
  BigInt w_int;
  mpz_cdiv_q(w_int.get_mpz_t(), w_elo.get_num_mpz_t(), w_elo.get_den_mpz_t());

  auto r = elo(ys, xs, q_hat * r_hat, w_int, rng, stats);
  if (!r) return nest("lbr", r.failure());
  std::vector<Rational> beta(p);
  for (std::size_t k = 0; k < p; ++k) {
    beta[k] = Rational(r.value()[k], q_hat);
    beta[k].canonicalize();
  }

  const mpfr_prec_t bits = std::max(max_prec(y), max_prec(x)) + 64;
  PrecReal bound(w_hat, bits);
  bound += PrecReal::pow2(-n_bits + static_cast<long>(ceil_log2(p)), bits);
  for (std::size_t i = 0; i < n; ++i) {
    PrecReal fitted(bits);
    for (std::size_t k = 0; k < p; ++k) fitted += x[i][k] * PrecReal(beta[k], bits);
    if (abs(y[i] - fitted) > bound) return fail("lbr", "verification", "residual above W_hat + 2^(-N+ceil log p)");
  }
  return beta;
}

// ---------------------------------------------------------------------------

PrecisionPolicy jirss_policy(const IntMatrix& x, const SupportSet& s, bool with_one, const BigInt& extra) {
  std::size_t bits = 1;
  for (const auto& row : x) {
    BigInt sum = 0;
    for (const auto& v : row) sum += abs(v);
    bits = std::max(bits, bit_length(sum));
  }
  bits += bit_length(extra) + 1;
  return default_policy(1 + s.size() + (with_one ? 1 : 0), static_cast<long>(bits));
}

Outcome<SlotAssignment> jirss_assign(const RealVector& y, const IntMatrix& x, const SupportSet& s,
                                     const JirssOptions& opts, SolveStats* stats) {
  const std::size_t n = y.size();
  if (n == 0 || x.size() != n || x[0].empty()) throw std::invalid_argument("jirss: bad shape");
  const std::size_t p = x[0].size();
  const std::size_t r = s.size();
  if (r == 0) throw std::invalid_argument("jirss: empty support");
  const PrecisionPolicy policy = opts.policy ? *opts.policy : jirss_policy(x, s, opts.with_one);
  const mpfr_prec_t bits = std::max<mpfr_prec_t>(max_prec(y), policy.working_bits);

  IntMatrix theta(r, IntVector(n, 0));  // theta[j][i]
  for (std::size_t i = 0; i < n; ++i) {
    PrecReal tiny = PrecReal::pow2(-policy.detect_tolerance_bits, 64);
    if (abs(y[i]) < tiny) continue;  // a zero row carries no support mass
    RealVector b{y[i]};
    for (const auto& a : s.values) b.push_back(a.with_precision(bits));
    if (opts.with_one) b.emplace_back(1L, bits);
    const PslqResult res = pslq_with_retry(b, policy);
    if (stats) {
      if (const auto* rel = std::get_if<Relation>(&res)) stats->pslq_iterations += rel->iterations;
      if (const auto* nf = std::get_if<NotFound>(&res)) stats->pslq_iterations += nf->iterations;
      if (const auto* pe = std::get_if<PrecisionExhausted>(&res)) stats->pslq_iterations += pe->iterations;
    }
    const auto* rel = std::get_if<Relation>(&res);
    if (!rel) return pslq_failure("jirss/pslq", res);
    if (rel->m[0] == 0) return fail("jirss", "relation_not_integer", "relation does not involve Y");
    auto t = rescale_integral(rel->m);
    if (!t) return fail("jirss", "relation_not_integer", "row " + std::to_string(i));
    for (std::size_t j = 0; j < r; ++j) theta[j][i] = (*t)[1 + j];
  }

  const BigInt m = multichannel_scale(n, p);
  std::vector<BinaryVector> e(r);
  for (std::size_t j = 0; j < r; ++j) {
    auto sol = solve_multichannel(theta[j], x, m, stats);
    if (!sol) return nest("jirss/support" + std::to_string(j), sol.failure());
    e[j] = sol.value();
  }
  SlotAssignment out(p);
  for (std::size_t k = 0; k < p; ++k) {
    std::size_t hits = 0;
    for (std::size_t j = 0; j < r; ++j) {
      if (e[j][k] == 1) {
        if (!out[k]) out[k] = j;
        ++hits;
      }
    }
    if (hits > 1) return fail("jirss", "uncovered_index", "index " + std::to_string(k) + " covered more than once");
    if (hits == 0 && !opts.allow_uncovered) {
      return fail("jirss", "uncovered_index", "index " + std::to_string(k) + " has no support value");
    }
  }
  return out;
}

Outcome<SupportVector> jirss(const RealVector& y, const IntMatrix& x, const SupportSet& s,
                             const std::optional<PrecisionPolicy>& policy, SolveStats* stats) {
  JirssOptions opts;
  opts.policy = policy;
  auto a = jirss_assign(y, x, s, opts, stats);
  if (!a) return a.failure();
  SupportVector beta;
  for (const auto& slot : a.value()) beta.emplace_back(IrrationalIndex{*slot});
  const long tol = (policy ? *policy : jirss_policy(x, s, false)).detect_tolerance_bits;
  const mpfr_prec_t bits = max_prec(y) + 64;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!close_rel(y[i], dot_int(x[i], beta, &s, bits), tol)) return fail("jirss", "verification");
  }
  return beta;
}

// ---------------------------------------------------------------------------

PrecisionPolicy ihdr_policy(std::size_t p, std::size_t r) { return default_policy(1 + p * r, 8); }

namespace {

long count_iterations(const PslqResult& res) {
  if (const auto* rel = std::get_if<Relation>(&res)) return rel->iterations;
  if (const auto* nf = std::get_if<NotFound>(&res)) return nf->iterations;
  return std::get<PrecisionExhausted>(res).iterations;
}

}  // namespace

Outcome<SupportVector> ihdr(const PrecReal& y, const RealVector& x, const SupportSet& s,
                            const std::optional<PrecisionPolicy>& policy_in, SolveStats* stats) {
  const std::size_t p = x.size();
  const std::size_t r = s.size();
  if (p == 0 || r == 0) throw std::invalid_argument("ihdr: empty input");
  const PrecisionPolicy policy = policy_in ? *policy_in : ihdr_policy(p, r);
  const mpfr_prec_t check_bits = std::max(y.precision(), max_prec(x)) + 64;

  auto verify = [&](const SupportVector& beta) -> Outcome<SupportVector> {
    if (!close_rel(y, dot_real(x, beta, &s, check_bits), policy.detect_tolerance_bits)) {
      return fail("ihdr", "verification");
    }
    return beta;
  };
  // every slot holds a nonzero support value
  if (y.is_zero()) return fail("ihdr", "no_solution", "Y = 0");

  RealVector b{y};
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < r; ++j) b.push_back(product(x[i], s.values[j]));
  }
  const PslqResult res = pslq_with_retry(b, policy);
  if (stats) stats->pslq_iterations += count_iterations(res);
  const auto* rel = std::get_if<Relation>(&res);
  if (!rel) return pslq_failure("ihdr/pslq", res);
  const IntVector& m = rel->m;
  if (m[0] == 0) return fail("ihdr", "degenerate_relation", "relation does not involve Y");

  SupportVector beta(p);
  for (std::size_t i = 0; i < p; ++i) {
    std::optional<std::size_t> pick;
    for (std::size_t j = 0; j < r; ++j) {
      const BigInt& c = m[1 + i * r + j];
      if (c == 0) continue;
      if (c != -m[0] || pick) return fail("ihdr", "ambiguous_assignment", "slot " + std::to_string(i));
      pick = j;
    }
    if (!pick) return fail("ihdr", "ambiguous_assignment", "slot " + std::to_string(i) + " has no coefficient");
    beta[i] = IrrationalIndex{*pick};
  }
  return verify(beta);
}

// ---------------------------------------------------------------------------

Outcome<SupportVector> mirr(const RealVector& y, const IntMatrix& x, const BigInt& r_hat, const BigInt& q_hat,
                            const SupportSet& s, Rng& rng, const std::optional<PrecisionPolicy>& policy_in,
                            SolveStats* stats) {
  const std::size_t n = y.size();
  if (n == 0 || x.size() != n || x[0].empty()) throw std::invalid_argument("mirr: bad shape");
  const std::size_t p = x[0].size();
  if (q_hat < 1 || r_hat < 1) throw std::invalid_argument("mirr: Q_hat and R_hat must be >= 1");

  RealVector qy;
  IntMatrix qx = x;
  for (const auto& v : y) qy.push_back(scaled(v, q_hat));
  for (auto& row : qx) {
    for (auto& v : row) v *= q_hat;
  }
  JirssOptions opts;
  opts.with_one = true;
  opts.allow_uncovered = true;
  opts.policy = policy_in ? *policy_in : jirss_policy(qx, s, true, r_hat);
  auto stage1 = jirss_assign(qy, qx, s, opts, stats);
  if (!stage1) return nest("mirr/stage1", stage1.failure());

  SupportVector beta(p, SupportValue(Rational(0)));
  std::vector<std::size_t> rational_cols;
  for (std::size_t k = 0; k < p; ++k) {
    if (stage1.value()[k]) {
      beta[k] = IrrationalIndex{*stage1.value()[k]};
    } else {
      rational_cols.push_back(k);
    }
  }

  const mpfr_prec_t bits = max_prec(y) + 64;
  const long tol = opts.policy->working_bits / 2;
  IntVector y_tilde(n);
  for (std::size_t i = 0; i < n; ++i) {
    PrecReal irr = dot_int(x[i], beta, &s, bits);  // rational slots are still zero
    PrecReal qyt = scaled(y[i].with_precision(bits) - irr, q_hat);
    Rational exact = qyt.to_rational();
    y_tilde[i] = round_nearest(exact);
    PrecReal gap = abs(qyt - PrecReal(y_tilde[i], bits));
    if (!(gap < PrecReal::pow2(-tol, 64))) return fail("mirr", "y_not_integer", "row " + std::to_string(i));
  }

  if (rational_cols.empty()) {
    for (const auto& t : y_tilde) {
      if (t != 0) return fail("mirr/stage2", "residual_nonzero", "no rational columns left for a nonzero residual");
    }
  } else {
    IntMatrix xt(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (auto k : rational_cols) xt[i].push_back(x[i][k]);
    }
    auto stage2 = elo(y_tilde, xt, q_hat * r_hat, 0, rng, stats);
    if (!stage2) return nest("mirr/stage2", stage2.failure());
    for (std::size_t c = 0; c < rational_cols.size(); ++c) {
      Rational q(stage2.value()[c], q_hat);
      q.canonicalize();
      beta[rational_cols[c]] = q;
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (!close_rel(y[i], dot_int(x[i], beta, &s, bits), opts.policy->detect_tolerance_bits)) {
      return fail("mirr", "verification");
    }
  }
  return beta;
}

// ---------------------------------------------------------------------------

PrecisionPolicy mirr_c_policy(std::size_t p, std::size_t r, const BigInt& q_hat, const BigInt& r_hat) {
  return default_policy(1 + p * r + p, static_cast<long>(bit_length(q_hat * r_hat)) + 4);
}

PrecisionPolicy mixed_ira_policy(std::size_t p, std::size_t r, const BigInt& q_hat, const BigInt& r_hat) {
  return default_policy(1 + p * r + p, static_cast<long>(bit_length(q_hat * r_hat)) + 4);
}

Outcome<SupportVector> mirr_c(const RealVector& y, const RealMatrix& x, long n_bits, const BigInt& r_hat,
                              const BigInt& q_hat, const SupportSet& s, Rng& rng,
                              const std::optional<PrecisionPolicy>& policy_in, SolveStats* stats) {
  const std::size_t n = y.size();
  if (n == 0 || x.size() != n || x[0].empty()) throw std::invalid_argument("mirr_c: bad shape");
  const std::size_t p = x[0].size();
  const std::size_t r = s.size();
  if (q_hat < 1 || r_hat < 1) throw std::invalid_argument("mirr_c: Q_hat and R_hat must be >= 1");
  const PrecisionPolicy policy = policy_in ? *policy_in : mirr_c_policy(p, r, q_hat, r_hat);

  SlotAssignment assign;
  std::vector<std::vector<Rational>> rat_coef(n, std::vector<Rational>(p));
  for (std::size_t i = 0; i < n; ++i) {
    RealVector b{scaled(y[i], q_hat)};
    for (std::size_t j = 0; j < p; ++j) {
      for (std::size_t k = 0; k < r; ++k) b.push_back(product(x[i][j], s.values[k]));
    }
    for (std::size_t j = 0; j < p; ++j) b.push_back(x[i][j]);
    const PslqResult res = pslq_with_retry(b, policy);
    if (stats) stats->pslq_iterations += count_iterations(res);
    const auto* rel = std::get_if<Relation>(&res);
    if (!rel) return pslq_failure("mirr_c/pslq", res);
    const IntVector& m = rel->m;
    if (m[0] == 0) return fail("mirr_c", "y_not_rational", "relation does not involve Y in row " + std::to_string(i));
    SlotAssignment row(p);
    for (std::size_t j = 0; j < p; ++j) {
      for (std::size_t k = 0; k < r && !row[j]; ++k) {
        if (m[1 + j * r + k] != 0) row[j] = k;
      }
      rat_coef[i][j] = Rational(-m[1 + p * r + j], m[0]);
      rat_coef[i][j].canonicalize();
    }
    if (i == 0) {
      assign = row;
    } else if (row != assign) {
      return fail("mirr_c", "row_disagreement", "row " + std::to_string(i));
    }
  }

  SupportVector beta(p, SupportValue(Rational(0)));
  std::vector<std::size_t> rational_cols;
  for (std::size_t j = 0; j < p; ++j) {
    if (assign[j]) {
      beta[j] = IrrationalIndex{*assign[j]};
    } else {
      rational_cols.push_back(j);
    }
  }

  const mpfr_prec_t bits = std::max(max_prec(y), max_prec(x)) + 64;
  const long tol = policy.working_bits / 2;
  RealVector y_tilde(n, PrecReal(bits));
  for (std::size_t i = 0; i < n; ++i) {
    y_tilde[i] = y[i].with_precision(bits) - dot_real(x[i], beta, &s, bits);
    // Q_hat Y~ must equal the rational combination the relation assigned to the X block.
    PrecReal expected(bits);
    for (std::size_t j = 0; j < p; ++j) expected += x[i][j] * PrecReal(rat_coef[i][j], bits);
    if (!close_rel(scaled(y_tilde[i], q_hat), expected, tol)) {
      return fail("mirr_c", "y_not_rational", "row " + std::to_string(i));
    }
  }

  if (rational_cols.empty()) {
    for (const auto& v : y_tilde) {
      if (!close_rel(v, PrecReal(bits), tol)) return fail("mirr_c/stage2", "residual_nonzero");
    }
  } else {
    RealMatrix xt(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (auto k : rational_cols) xt[i].push_back(x[i][k]);
    }
    auto stage2 = lbr(y_tilde, xt, n_bits, q_hat, r_hat, Rational(0), rng, stats);
    if (!stage2) return nest("mirr_c/stage2", stage2.failure());
    for (std::size_t c = 0; c < rational_cols.size(); ++c) beta[rational_cols[c]] = stage2.value()[c];
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (!close_rel(y[i], dot_real(x[i], beta, &s, bits), policy.detect_tolerance_bits)) {
      return fail("mirr_c", "verification");
    }
  }
  return beta;
}

// ---------------------------------------------------------------------------

Outcome<SupportVector> mixed_ira_only(const PrecReal& y, const RealVector& x, const BigInt& q_hat, const BigInt& r_hat,
                                      const SupportSet& s, const std::optional<PrecisionPolicy>& policy_in,
                                      SolveStats* stats) {
  const std::size_t p = x.size();
  const std::size_t r = s.size();
  if (p == 0 || r == 0) throw std::invalid_argument("mixed_ira_only: empty input");
  if (q_hat < 1 || r_hat < 1) throw std::invalid_argument("mixed_ira_only: Q_hat and R_hat must be >= 1");
  const PrecisionPolicy policy = policy_in ? *policy_in : mixed_ira_policy(p, r, q_hat, r_hat);
  const mpfr_prec_t bits = std::max(y.precision(), max_prec(x)) + 64;
  const SupportVector zero(p, SupportValue(Rational(0)));
  if (y.is_zero()) {
    if (close_rel(y, dot_real(x, zero, &s, bits), policy.detect_tolerance_bits)) return zero;
    return fail("mixed_ira", "verification");
  }

  RealVector b{scaled(y, q_hat)};
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < r; ++j) b.push_back(product(x[i], s.values[j]));
  }
  for (std::size_t i = 0; i < p; ++i) b.push_back(x[i]);
  const PslqResult res = pslq_with_retry(b, policy);
  if (stats) stats->pslq_iterations += count_iterations(res);
  const auto* rel = std::get_if<Relation>(&res);
  if (!rel) return pslq_failure("mixed_ira/pslq", res);
  if (rel->m[0] == 0) return fail("mixed_ira", "ambiguous_assignment", "relation does not involve Y");
  auto c = rescale_integral(rel->m);
  if (!c) return fail("mixed_ira", "relation_not_integer");

  SupportVector beta(p);
  for (std::size_t i = 0; i < p; ++i) {
    const BigInt& rat = (*c)[1 + p * r + i];
    std::size_t nonzero = 0;
    std::size_t pick = 0;
    for (std::size_t j = 0; j < r; ++j) {
      if ((*c)[1 + i * r + j] != 0) {
        ++nonzero;
        pick = j;
      }
    }
    if (nonzero == 1 && (*c)[1 + i * r + pick] == q_hat && rat == 0) {
      beta[i] = IrrationalIndex{pick};
    } else if (nonzero == 0) {
      Rational q(rat, q_hat);
      q.canonicalize();
      if (abs(q) > Rational(r_hat)) return fail("mixed_ira", "ambiguous_assignment", "rational slot exceeds R_hat");
      beta[i] = q;
    } else {
      return fail("mixed_ira", "ambiguous_assignment", "slot " + std::to_string(i));
    }
  }
  if (!close_rel(y, dot_real(x, beta, &s, bits), policy.detect_tolerance_bits)) {
    return fail("mixed_ira", "verification");
  }
  return beta;
}

}  // namespace latrec
