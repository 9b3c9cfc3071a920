#include "latrec/phase.hpp"

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

mpfr_prec_t support_prec(const ComplexSupport& s) {
  mpfr_prec_t out = 64;
  for (const auto& a : s.values) out = std::max({out, a.re.precision(), a.im.precision()});
  return out;
}

bool close_rel(const PrecReal& a, const PrecReal& b, long tol) {
  PrecReal scale = abs(a) > abs(b) ? abs(a) : abs(b);
  if (scale < PrecReal(1L, 64)) scale = PrecReal(1L, 64);
  mpfr_mul_2si(scale.get(), scale.get(), -tol, MPFR_RNDN);
  return abs(a - b) <= scale;
}

Failure pslq_failure(const std::string& stage, const PslqResult& r) {
  if (std::holds_alternative<NotFound>(r)) return fail(stage, "not_found");
  return fail(stage, "precision_exhausted", std::get<PrecisionExhausted>(r).detail);
}

long count_iterations(const PslqResult& res) {
  if (const auto* rel = std::get_if<Relation>(&res)) return rel->iterations;
  if (const auto* nf = std::get_if<NotFound>(&res)) return nf->iterations;
  return std::get<PrecisionExhausted>(res).iterations;
}

std::optional<IntVector> rescale_integral(const IntVector& m) {
  IntVector out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!mpz_divisible_p(m[i].get_mpz_t(), m[0].get_mpz_t())) return std::nullopt;
    mpz_divexact(out[i].get_mpz_t(), m[i].get_mpz_t(), m[0].get_mpz_t());
    out[i] = -out[i];
  }
  return out;
}

SupportVector to_support(const std::vector<std::size_t>& idx) {
  SupportVector out;
  for (auto k : idx) out.emplace_back(IrrationalIndex{k});
  return out;
}

}  // namespace

RealVector build_sprime(const std::vector<PrecComplex>& values) {
  RealVector out;
  for (const auto& a : values) out.push_back(a.norm_sq());
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = i + 1; j < values.size(); ++j) out.push_back(hermitian_cross(values[i], values[j]));
  }
  for (const auto& v : out) {
    if (v.is_zero()) throw std::invalid_argument("S' contains a zero entry; support rejected");
  }
  return out;
}

std::size_t sprime_cross_index(std::size_t r, std::size_t k, std::size_t l) {
  if (!(k < l && l < r)) throw std::out_of_range("sprime_cross_index needs k < l < r");
  // Pairs before row k: sum_{a<k} (r - 1 - a).
  return r + k * (2 * r - k - 1) / 2 + (l - k - 1);
}

Outcome<ComplexSupport> make_complex_support(const std::vector<std::pair<std::string, std::string>>& exprs,
                                             mpfr_prec_t bits) {
  if (exprs.empty()) return fail("complex_support", "empty");
  const std::size_t r = exprs.size();
  const PrecisionPolicy screen = screening_policy(r + r * (r - 1) / 2);
  const mpfr_prec_t probe_bits = std::max<mpfr_prec_t>(bits, screen.working_bits + 64);
  ComplexSupport s;
  s.labels = exprs;
  std::vector<PrecComplex> probe;
  for (const auto& [re, im] : exprs) {
    s.values.emplace_back(parse_real_expr(re, bits), parse_real_expr(im, bits));
    probe.emplace_back(parse_real_expr(re, probe_bits), parse_real_expr(im, probe_bits));
    if (probe.back().re.is_zero() && probe.back().im.is_zero()) return fail("complex_support", "zero_value");
  }
  RealVector sp;
  try {
    s.sprime = build_sprime(s.values);
    sp = build_sprime(probe);
  } catch (const std::invalid_argument& e) {
    return fail("complex_support", "zero_derived_entry", e.what());
  }
  const ScreenResult res = screen_rational_independence(sp, screen);
  if (const auto* dep = std::get_if<DependentWithRelation>(&res)) {
    std::string rel;
    for (const auto& c : dep->relation.m) rel += (rel.empty() ? "" : ",") + to_string(c);
    return fail("complex_support", "dependent", "S' relation (" + rel + ")");
  }
  if (std::holds_alternative<PrecisionExhausted>(res)) return fail("complex_support", "screen_precision_exhausted");
  s.screened = true;
  return s;
}

PrecReal magnitude_sq(const RealVector& x, const std::vector<std::size_t>& beta, const ComplexSupport& s,
                      mpfr_prec_t bits) {
  PrecComplex sum(bits);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const PrecComplex& a = s.values.at(beta[i]);
    PrecReal xi = x[i].with_precision(bits);
    sum = sum + xi * PrecComplex(a.re.with_precision(bits), a.im.with_precision(bits));
  }
  return sum.norm_sq();
}

// ---------------------------------------------------------------------------

PrecisionPolicy phase_discrete_policy(const IntVector& x, std::size_t r) {
  BigInt total = 0;
  for (const auto& v : x) total += abs(v);
  return default_policy(1 + r + r * (r - 1) / 2, 2 * static_cast<long>(bit_length(total)) + 2);
}

namespace {

// xi over pair_order(p) for sum x_i x_j xi_ij = theta.
Outcome<BinaryVector> pair_solve(const BigInt& theta, const IntVector& x, SolveStats* stats) {
  if (x.size() >= 3) return solve_dependent_products(theta, x, stats);
  if (x.size() == 2) {
    if (theta == 0) return BinaryVector{0};
    if (theta == x[0] * x[1]) return BinaryVector{1};
    return fail("phase", "verification", "pair target is neither 0 nor X1 X2");
  }
  if (theta == 0) return BinaryVector{};
  return fail("phase", "verification", "cross target nonzero with a single entry");
}

// theta implied by an assignment, in S' order.
IntVector implied_theta(const IntVector& x, const std::vector<std::size_t>& assign, std::size_t r) {
  IntVector sums(r, 0);
  for (std::size_t i = 0; i < x.size(); ++i) sums[assign[i]] += x[i];
  IntVector out;
  for (std::size_t d = 0; d < r; ++d) out.push_back(sums[d] * sums[d]);
  for (std::size_t k = 0; k < r; ++k) {
    for (std::size_t l = k + 1; l < r; ++l) out.push_back(sums[k] * sums[l]);
  }
  return out;
}

}  // namespace

Outcome<SupportVector> phase_discrete(const PrecReal& y, const IntVector& x, const ComplexSupport& s,
                                      const std::optional<PrecisionPolicy>& policy_in, SolveStats* stats) {
  const std::size_t p = x.size();
  const std::size_t r = s.size();
  if (p == 0 || r == 0) throw std::invalid_argument("phase_discrete: empty input");
  for (const auto& v : x) {
    if (v <= 0) throw std::invalid_argument("phase_discrete: X entries must be positive");
  }
  const PrecisionPolicy policy = policy_in ? *policy_in : phase_discrete_policy(x, r);
  if (y.is_zero()) return fail("phase_discrete", "zero_measurement");

  const PrecReal y2 = square(y);
  RealVector b{y2};
  const mpfr_prec_t bits = std::max<mpfr_prec_t>(y.precision(), policy.working_bits);
  for (const auto& v : s.sprime) b.push_back(v.with_precision(std::max(bits, v.precision())));
  const PslqResult res = pslq_with_retry(b, policy);
  if (stats) stats->pslq_iterations += count_iterations(res);
  const auto* rel = std::get_if<Relation>(&res);
  if (!rel) return pslq_failure("phase_discrete/pslq", res);
  if (rel->m[0] == 0) return fail("phase_discrete", "relation_not_integer", "relation does not involve Y^2");
  auto scaled = rescale_integral(rel->m);
  if (!scaled) return fail("phase_discrete", "relation_not_integer");
  const IntVector theta(scaled->begin() + 1, scaled->end());

  std::vector<std::size_t> active;
  for (std::size_t d = 0; d < r; ++d) {
    if (theta[d] < 0) return fail("phase_discrete", "negative_square");
    if (theta[d] != 0) active.push_back(d);
  }
  if (active.empty()) return fail("phase_discrete", "no_active_support");

  std::vector<std::size_t> assign(p, 0);
  auto cross = [&](std::size_t k, std::size_t l) { return theta[sprime_cross_index(r, k, l)]; };

  if (active.size() == 1) {
    std::fill(assign.begin(), assign.end(), active[0]);
  } else if (active.size() == 2) {
    const std::size_t d1 = active[0], d2 = active[1];
    auto xi = pair_solve(cross(d1, d2), x, stats);
    if (!xi) return nest("phase_discrete/pairs", xi.failure());
    const auto pairs = pair_order(p);
    // Two-coloring from index 0: an edge means the endpoints differ.
    std::vector<int> color(p, 0);
    for (std::size_t q = 0; q < pairs.size(); ++q) {
      if (pairs[q].first == 0) color[pairs[q].second] = xi.value()[q];
    }
    for (std::size_t q = 0; q < pairs.size(); ++q) {
      const bool differ = color[pairs[q].first] != color[pairs[q].second];
      if (differ != (xi.value()[q] == 1)) return fail("phase_discrete", "inconsistent_coloring");
    }
    bool matched = false;
    for (int flip = 0; flip < 2 && !matched; ++flip) {
      for (std::size_t i = 0; i < p; ++i) assign[i] = (color[i] ^ flip) == 0 ? d1 : d2;
      matched = implied_theta(x, assign, r) == theta;
    }
    if (!matched) return fail("phase_discrete", "verification", "neither coloring reproduces theta");
  } else {
    const auto pairs = pair_order(p);
    std::vector<std::vector<std::vector<bool>>> touched(r, std::vector<std::vector<bool>>(r));
    for (std::size_t a = 0; a < active.size(); ++a) {
      for (std::size_t c = a + 1; c < active.size(); ++c) {
        const std::size_t k = active[a], l = active[c];
        auto xi = pair_solve(cross(k, l), x, stats);
        if (!xi) return nest("phase_discrete/pairs", xi.failure());
        std::vector<bool> t(p, false);
        for (std::size_t q = 0; q < pairs.size(); ++q) {
          if (xi.value()[q]) t[pairs[q].first] = t[pairs[q].second] = true;
        }
        touched[k][l] = t;
        touched[l][k] = t;
      }
    }
    std::vector<bool> done(p, false);
    for (std::size_t alpha : active) {
      std::vector<std::size_t> others;
      for (std::size_t d : active) {
        if (d != alpha && others.size() < 2) others.push_back(d);
      }
      for (std::size_t i = 0; i < p; ++i) {
        if (!done[i] && touched[alpha][others[0]][i] && touched[alpha][others[1]][i]) {
          assign[i] = alpha;
          done[i] = true;
        }
      }
    }
    if (!std::all_of(done.begin(), done.end(), [](bool v) { return v; })) {
      return fail("phase_discrete", "uncovered_index");
    }
    if (implied_theta(x, assign, r) != theta) return fail("phase_discrete", "verification", "theta mismatch");
  }

  RealVector xr;
  const mpfr_prec_t check_bits = std::max(y.precision(), support_prec(s)) + 64;
  for (const auto& v : x) xr.emplace_back(v, check_bits);
  if (!close_rel(y2, magnitude_sq(xr, assign, s, check_bits), policy.detect_tolerance_bits)) {
    return fail("phase_discrete", "verification", "Y^2 mismatch");
  }
  return to_support(assign);
}

// ---------------------------------------------------------------------------

RealVector build_L_phase(const RealVector& x, const ComplexSupport& s, std::vector<PhaseTerm>* terms) {
  const std::size_t p = x.size();
  const std::size_t r = s.size();
  const mpfr_prec_t bits = 2 * max_prec(x) + support_prec(s) + 16;
  RealVector norms;
  for (const auto& a : s.values) norms.push_back(PrecComplex(a.re.with_precision(bits), a.im.with_precision(bits)).norm_sq());
  RealVector out;
  std::vector<PhaseTerm> tm;
  auto push = [&](PrecReal v, PhaseTerm t) {
    if (v.is_zero()) throw std::invalid_argument("build_L_phase: zero entry; instance rejected");
    out.push_back(std::move(v));
    tm.push_back(t);
  };
  for (std::size_t i = 0; i < p; ++i) {
    PrecReal xi2 = square(x[i].with_precision(bits));
    for (std::size_t k = 0; k < r; ++k) push(xi2 * norms[k], {1, i, i, k, k});
  }
  const auto pairs = pair_order(p);
  for (auto [i, j] : pairs) {
    PrecReal xx = x[i].with_precision(bits) * x[j].with_precision(bits);
    for (std::size_t k = 0; k < r; ++k) push(xx * norms[k], {2, i, j, k, k});
  }
  for (auto [i, j] : pairs) {
    PrecReal xx = x[i].with_precision(bits) * x[j].with_precision(bits);
    for (std::size_t k = 0; k < r; ++k) {
      for (std::size_t l = k + 1; l < r; ++l) push(xx * s.sprime[sprime_cross_index(r, k, l)].with_precision(bits), {3, i, j, k, l});
    }
  }
  if (terms) *terms = std::move(tm);
  return out;
}

PrecisionPolicy phase_continuous_policy(std::size_t p, std::size_t r) {
  const std::size_t l = p * (p - 1) / 2;
  return default_policy(1 + p * r + l * r + l * r * (r - 1) / 2, 8);
}

Outcome<SupportVector> phase_continuous(const PrecReal& y, const RealVector& x, const ComplexSupport& s,
                                        const std::optional<PrecisionPolicy>& policy_in, SolveStats* stats) {
  const std::size_t p = x.size();
  const std::size_t r = s.size();
  if (p == 0 || r == 0) throw std::invalid_argument("phase_continuous: empty input");
  const PrecisionPolicy policy = policy_in ? *policy_in : phase_continuous_policy(p, r);
  if (y.is_zero()) return fail("phase_continuous", "zero_measurement", "no support assignment gives Y = 0");

  std::vector<PhaseTerm> terms;
  const RealVector l = build_L_phase(x, s, &terms);
  const PrecReal y2 = square(y);
  RealVector b{y2};
  b.insert(b.end(), l.begin(), l.end());
  const PslqResult res = pslq_with_retry(b, policy);
  if (stats) stats->pslq_iterations += count_iterations(res);
  const auto* rel = std::get_if<Relation>(&res);
  if (!rel) return pslq_failure("phase_continuous/pslq", res);
  if (rel->m[0] == 0) return fail("phase_continuous", "ambiguous_assignment", "relation does not involve Y^2");
  auto c = rescale_integral(rel->m);
  if (!c) return fail("phase_continuous", "relation_not_integer");

  std::vector<std::size_t> assign(p);
  for (std::size_t i = 0; i < p; ++i) {
    std::optional<std::size_t> pick;
    for (std::size_t q = 0; q < terms.size(); ++q) {
      if (terms[q].block != 1 || terms[q].i != i || (*c)[1 + q] == 0) continue;
      if (pick || (*c)[1 + q] != 1) return fail("phase_continuous", "ambiguous_assignment", "slot " + std::to_string(i));
      pick = terms[q].k;
    }
    if (!pick) return fail("phase_continuous", "ambiguous_assignment", "slot " + std::to_string(i) + " unassigned");
    assign[i] = *pick;
  }
  const mpfr_prec_t check_bits = std::max(y.precision(), max_prec(x)) + support_prec(s) + 64;
  if (!close_rel(y2, magnitude_sq(x, assign, s, check_bits), policy.detect_tolerance_bits)) {
    return fail("phase_continuous", "verification", "Y^2 mismatch");
  }
  return to_support(assign);
}

}  // namespace latrec
