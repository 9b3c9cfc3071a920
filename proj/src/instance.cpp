#include "latrec/instance.hpp"

#include "latrec/instruments.hpp"
#include "latrec/subsetsum.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

namespace latrec {

namespace {

const std::pair<Kind, const char*> kKindNames[] = {
    {Kind::elo, "elo"},         {Kind::lbr, "lbr"},         {Kind::jirss, "jirss"},
    {Kind::ihdr, "ihdr"},       {Kind::mirr, "mirr"},       {Kind::mirrc, "mirrc"},
    {Kind::mixed_ira, "mixed_ira"}, {Kind::phase_d, "phase_d"}, {Kind::phase_c, "phase_c"},
    {Kind::subsetsum, "subsetsum"}, {Kind::dep_subsetsum, "dep_subsetsum"},
};

bool is_mixed(Kind k) { return k == Kind::mirr || k == Kind::mirrc || k == Kind::mixed_ira; }
bool uses_real_support(Kind k) {
  return k == Kind::jirss || k == Kind::ihdr || is_mixed(k);
}
bool is_phase(Kind k) { return k == Kind::phase_d || k == Kind::phase_c; }
bool single_row(Kind k) {
  return k == Kind::ihdr || k == Kind::mixed_ira || is_phase(k) || k == Kind::dep_subsetsum;
}

void require(bool cond, const std::string& field, const std::string& what) {
  if (!cond) throw std::invalid_argument("params." + field + ": " + what);
}

long least_negative_jirss_n(long n, long p) {
  long N = 1;
  while (jirss_condition_value(n, p, N, Rational(1)).to_double() >= -20.0) ++N;
  return N;
}

SupportSet dummy_support(std::size_t r) {
  SupportSet s;
  s.values.assign(r, PrecReal(64));
  return s;
}

// Default policy of the relation-based solver for this kind, raised to precision_bits if given.
std::optional<PrecisionPolicy> kind_policy(Kind kind, const GenParams& par, const IntMatrix& x_int, std::size_t r) {
  const auto p = static_cast<std::size_t>(par.p);
  std::optional<PrecisionPolicy> out;
  switch (kind) {
    case Kind::jirss:
      out = jirss_policy(x_int, dummy_support(r), false);
      break;
    case Kind::mirr: {
      IntMatrix qx = x_int;
      for (auto& row : qx)
        for (auto& v : row) v *= par.q_hat();
      out = jirss_policy(qx, dummy_support(r), true, par.r_hat());
      break;
    }
    case Kind::ihdr:
      out = ihdr_policy(p, r);
      break;
    case Kind::mirrc:
      out = mirr_c_policy(p, r, par.q_hat(), par.r_hat());
      break;
    case Kind::mixed_ira:
      out = mixed_ira_policy(p, r, par.q_hat(), par.r_hat());
      break;
    case Kind::phase_d:
      out = phase_discrete_policy(x_int.at(0), r);
      break;
    case Kind::phase_c:
      out = phase_continuous_policy(p, r);
      break;
    default:
      return std::nullopt;
  }
  if (par.precision_bits && *par.precision_bits > out->working_bits) {
    out->working_bits = *par.precision_bits;
    out->detect_tolerance_bits = out->working_bits / 2;
    out->relation_bound_bits = std::min(out->relation_bound_bits, out->working_bits - out->detect_tolerance_bits);
  }
  return out;
}

std::size_t support_size(const GenParams& par, Kind kind) {
  return is_phase(kind) ? par.complex_support.size() : par.support.size();
}

PrecReal draw_x_real(Rng& rng, const std::string& dist, mpfr_prec_t bits) {
  return dist == "gaussian" ? rng.gaussian(bits) : rng.uniform01(bits);
}

}  // namespace

std::string kind_name(Kind k) {
  for (const auto& [kind, name] : kKindNames)
    if (kind == k) return name;
  throw std::logic_error("unnamed kind");
}

Kind parse_kind(std::string_view name) {
  for (const auto& [kind, text] : kKindNames)
    if (name == text) return kind;
  throw std::invalid_argument("unknown kind '" + std::string(name) + "'");
}

bool kind_has_real_x(Kind k) {
  return k == Kind::lbr || k == Kind::ihdr || k == Kind::mirrc || k == Kind::mixed_ira || k == Kind::phase_c;
}

bool kind_has_real_y(Kind k) {
  return k != Kind::elo && k != Kind::subsetsum && k != Kind::dep_subsetsum;
}

PrecReal parse_sigma(std::string_view text, mpfr_prec_t bits) {
  if (text.rfind("2^", 0) == 0) {
    const std::string e(text.substr(2));
    std::size_t used = 0;
    long exp = 0;
    try {
      exp = std::stol(e, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != e.size() || e.empty()) throw std::invalid_argument("malformed sigma '" + std::string(text) + "'");
    return PrecReal::pow2(exp, bits);
  }
  if (text.rfind("0x", 0) == 0 || text.rfind("-0x", 0) == 0) return PrecReal::from_canonical(text).with_precision(bits);
  return PrecReal::from_decimal(text, bits);
}

GenParams resolve_params(Kind kind, GenParams par) {
  require(par.n >= 1, "n", "must be >= 1");
  require(par.p >= 1, "p", "must be >= 1");
  require(!single_row(kind) || par.n == 1, "n", "must be 1 for " + kind_name(kind));
  require(par.Q >= 1, "Q", "must be >= 1");
  require(par.R >= 1, "R", "must be >= 1");
  require(par.q_hat() >= 1, "Q_hat", "must be >= 1");
  require(par.r_hat() >= 1, "R_hat", "must be >= 1");
  require(par.w_max >= 0, "w_max", "must be >= 0");
  require(par.x_bits >= 0, "x_bits", "must be >= 0");
  require(par.N >= 0, "N", "must be >= 0");
  require(par.c > 0, "c", "must be positive");
  require(par.x_dist == "uniform" || par.x_dist == "gaussian", "x_dist", "must be 'uniform' or 'gaussian'");
  require(par.noise == "uniform" || par.noise == "gaussian", "noise", "must be 'uniform' or 'gaussian'");
  require(!par.precision_bits || *par.precision_bits >= 64, "precision_bits", "must be >= 64");
  require(kind != Kind::dep_subsetsum || par.p >= 3, "p", "must be >= 3 for dep_subsetsum");
  par.Q_hat = par.q_hat();
  par.R_hat = par.r_hat();

  PrecReal sigma(64);
  try {
    sigma = parse_sigma(par.sigma, 128);
  } catch (const std::exception& e) {
    throw std::invalid_argument("params.sigma: " + std::string(e.what()));
  }
  require(sigma.sign() >= 0, "sigma", "must be nonnegative");

  if (uses_real_support(kind) && par.support.empty()) par.support = default_support_exprs(2);
  if (is_phase(kind) && par.complex_support.empty()) par.complex_support = {{"sqrt(2)", "0"}, {"1+sqrt(3)", "0"}};
  if (is_mixed(kind)) {
    if (!par.rational_slots) par.rational_slots = par.p / 2;
    require(*par.rational_slots >= 0 && *par.rational_slots <= par.p, "rational_slots", "must lie in [0, p]");
  }

  BoundsQuery q;
  q.n = par.n;
  q.p = par.p;
  q.R = Rational(par.R);
  q.Q = Rational(par.Q);
  q.R_hat = Rational(par.r_hat());
  q.Q_hat = Rational(par.q_hat());
  q.c = par.c;
  if (kind == Kind::elo) {
    if (!par.beta_lo) par.beta_lo = -par.R;
    require(*par.beta_lo <= par.R, "beta_lo", "must be <= R");
    if (!par.w_hat) par.w_hat = par.w_max;
    q.W_inf = Rational(*par.w_hat);
    if (par.x_bits == 0) par.x_bits = n_threshold_elo(q).value;
  } else if (kind == Kind::mirr) {
    if (par.x_bits == 0) par.x_bits = n_threshold_mirr(q).value;
  } else if (kind == Kind::jirss) {
    if (par.x_bits == 0) par.x_bits = least_negative_jirss_n(par.n, par.p);
  } else if (kind == Kind::subsetsum) {
    if (par.x_bits == 0) par.x_bits = 6 * par.p;
  } else if (kind == Kind::dep_subsetsum) {
    if (par.x_bits == 0) par.x_bits = 13 * (par.p * (par.p - 1) / 2);
  } else if (kind == Kind::phase_d) {
    if (par.x_bits == 0) par.x_bits = (100 * par.p + 2) / 3;
  } else if (kind == Kind::lbr) {
    if (par.x_bits == 0) par.x_bits = 512;
    q.sigma = sigma;
    if (par.N == 0) {
      auto N = n_threshold_lbr(q, par.noise == "gaussian");
      require(N.has_value(), "sigma", "no truncation level satisfies the LBR condition");
      par.N = *N;
    }
    if (!par.W_hat) {
      Rational s = sigma.to_rational();
      par.W_hat = par.noise == "gaussian" ? Rational(8 * s) : s;
    }
  } else if (kind == Kind::mirrc) {
    if (par.x_bits == 0) par.x_bits = 768;
    if (par.N == 0) par.N = n_threshold_mirr_c(q);
  } else if (kind == Kind::ihdr || kind == Kind::mixed_ira) {
    if (par.x_bits == 0) par.x_bits = 512;
  } else if (kind == Kind::phase_c) {
    if (par.x_bits == 0) par.x_bits = 1024;
  }
  require(par.x_bits >= 1, "x_bits", "must be >= 1");
  if (kind_has_real_x(kind)) require(par.x_bits >= 16, "x_bits", "continuous data needs at least 16 bits");
  return par;
}

SupportSet instance_support(const Instance& inst) {
  auto s = make_support_set(inst.params.support, inst.construction_bits, is_mixed(inst.kind));
  if (!s) throw std::invalid_argument("params.support: " + s.failure().reason + " " + s.failure().detail);
  return s.value();
}

ComplexSupport instance_complex_support(const Instance& inst) {
  auto s = make_complex_support(inst.params.complex_support, inst.construction_bits);
  if (!s) throw std::invalid_argument("params.complex_support: " + s.failure().reason + " " + s.failure().detail);
  return s.value();
}

std::optional<PrecisionPolicy> instance_policy(const Instance& inst) {
  return kind_policy(inst.kind, inst.params, inst.x_int, support_size(inst.params, inst.kind));
}

Instance gen_instance(Kind kind, const GenParams& params, std::uint64_t seed) {
  Instance inst;
  inst.kind = kind;
  inst.params = resolve_params(kind, params);
  inst.seed = seed;
  const GenParams& par = inst.params;
  const auto n = static_cast<std::size_t>(par.n);
  const auto p = static_cast<std::size_t>(par.p);
  const auto xb = static_cast<unsigned long>(par.x_bits);
  inst.N = kind == Kind::lbr || kind == Kind::mirrc ? par.N : par.x_bits;

  Rng xr(seed, 0, "X"), br(seed, 0, "beta"), wr(seed, 0, "W"), sr(seed, 0, "slots");

  // Design matrix.
  if (kind_has_real_x(kind)) {
    inst.x_real.assign(n, RealVector(p, PrecReal(64)));
    for (auto& row : inst.x_real)
      for (auto& v : row) v = draw_x_real(xr, par.x_dist, par.x_bits);
  } else {
    inst.x_int.assign(n, IntVector(p));
    for (auto& row : inst.x_int)
      for (auto& v : row) v = xr.discrete_uniform(xb);
  }

  // Construction precision.
  long cb = 64;
  if (auto pol = kind_policy(kind, par, inst.x_int, support_size(par, kind))) {
    cb = pol->working_bits + 64;
    if (!kind_has_real_x(kind)) cb += par.x_bits;
  }
  if (kind_has_real_x(kind)) cb = std::max(cb, par.x_bits + 64);
  if (kind == Kind::phase_c) cb = std::max(cb, 2 * par.x_bits + 64);
  if (kind == Kind::lbr || kind == Kind::mirrc) cb = std::max(cb, par.N + 128);
  if (par.precision_bits) cb = std::max(cb, *par.precision_bits + 64);
  inst.construction_bits = cb;

  // Planted coefficients.
  SupportVector beta;
  auto rational_entry = [&]() -> SupportValue {
    const BigInt bound = par.R * par.Q;
    Rational v(br.range(-bound, bound), par.Q);
    v.canonicalize();
    return v;
  };
  auto support_entry = [&](std::size_t r) -> SupportValue { return IrrationalIndex{static_cast<std::size_t>(br.range(0L, static_cast<long>(r) - 1))}; };
  switch (kind) {
    case Kind::elo:
      for (std::size_t i = 0; i < p; ++i) beta.emplace_back(Rational(br.range(*par.beta_lo, par.R)));
      break;
    case Kind::subsetsum:
      for (std::size_t i = 0; i < p; ++i) beta.emplace_back(Rational(br.range(0L, 1L)));
      break;
    case Kind::dep_subsetsum:
      for (std::size_t i = 0; i < p * (p - 1) / 2; ++i) beta.emplace_back(Rational(br.range(0L, 1L)));
      break;
    case Kind::lbr:
      for (std::size_t i = 0; i < p; ++i) beta.push_back(rational_entry());
      break;
    case Kind::jirss:
    case Kind::ihdr:
      for (std::size_t i = 0; i < p; ++i) beta.push_back(support_entry(par.support.size()));
      break;
    case Kind::phase_d:
    case Kind::phase_c:
      for (std::size_t i = 0; i < p; ++i) beta.push_back(support_entry(par.complex_support.size()));
      break;
    case Kind::mirr:
    case Kind::mirrc:
    case Kind::mixed_ira: {
      std::vector<std::size_t> order(p);
      for (std::size_t i = 0; i < p; ++i) order[i] = i;
      for (std::size_t i = p; i > 1; --i) std::swap(order[i - 1], order[static_cast<std::size_t>(sr.range(0L, static_cast<long>(i) - 1))]);
      std::vector<bool> rational(p, false);
      for (long i = 0; i < *par.rational_slots; ++i) rational[order[static_cast<std::size_t>(i)]] = true;
      for (std::size_t i = 0; i < p; ++i) beta.push_back(rational[i] ? rational_entry() : support_entry(par.support.size()));
      break;
    }
  }
  inst.beta_true = beta;

  // Measurements.
  const mpfr_prec_t bits = cb;
  if (kind == Kind::elo || kind == Kind::subsetsum) {
    inst.y_int.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < p; ++j) inst.y_int[i] += inst.x_int[i][j] * std::get<Rational>(beta[j]).get_num();
      if (kind == Kind::elo && par.w_max > 0) inst.y_int[i] += wr.range(-par.w_max, par.w_max);
    }
  } else if (kind == Kind::dep_subsetsum) {
    const IntVector prods = pair_products(inst.x_int[0]);
    BigInt theta = 0;
    for (std::size_t k = 0; k < prods.size(); ++k) theta += prods[k] * std::get<Rational>(beta[k]).get_num();
    inst.y_int = {theta};
  } else if (is_phase(kind)) {
    const ComplexSupport s = instance_complex_support(inst);
    std::vector<std::size_t> idx;
    for (const auto& b : beta) idx.push_back(std::get<IrrationalIndex>(b).k);
    RealVector xr_row;
    if (kind == Kind::phase_c) {
      xr_row = inst.x_real[0];
    } else {
      for (const auto& v : inst.x_int[0]) xr_row.emplace_back(v, bits);
    }
    const PrecReal m2 = magnitude_sq(xr_row, idx, s, bits + 32);
    require(!m2.is_zero(), "seed", "planted magnitude is zero");
    inst.y_real = {sqrt_prec(m2, bits + 32).with_precision(bits)};
  } else {
    std::optional<SupportSet> s;
    if (uses_real_support(kind)) s = instance_support(inst);
    const SupportSet* sp = s ? &*s : nullptr;
    inst.y_real.clear();
    const PrecReal sigma = parse_sigma(par.sigma, bits);
    for (std::size_t i = 0; i < n; ++i) {
      PrecReal y = kind_has_real_x(kind) ? dot_real(inst.x_real[i], beta, sp, bits + 32)
                                         : dot_int(inst.x_int[i], beta, sp, bits + 32);
      if (kind == Kind::lbr && !sigma.is_zero()) {
        PrecReal w = par.noise == "gaussian" ? wr.gaussian(bits) * sigma
                                             : wr.uniform(-sigma, sigma, bits);
        y += w;
      }
      inst.y_real.push_back(y.with_precision(bits));
    }
  }
  return inst;
}

RecoveryReport solve_instance(const Instance& inst) {
  RecoveryReport rep;
  rep.kind = inst.kind;
  rep.seed = inst.seed;
  const GenParams& par = inst.params;
  const auto start = std::chrono::steady_clock::now();
  Rng rng(inst.seed, 0, "Z");
  const auto policy = instance_policy(inst);

  auto from_ints = [](const std::vector<BigInt>& v) {
    SupportVector out;
    for (const auto& e : v) out.emplace_back(Rational(e));
    return out;
  };
  auto from_binary = [](const BinaryVector& v) {
    SupportVector out;
    for (int e : v) out.emplace_back(Rational(e));
    return out;
  };
  auto take = [&](auto&& outcome, auto&& convert) {
    if (outcome) {
      rep.estimate = convert(outcome.value());
    } else {
      rep.failure = outcome.failure();
    }
  };
  auto identity = [](const SupportVector& v) { return v; };

  switch (inst.kind) {
    case Kind::elo:
      take(elo(inst.y_int, inst.x_int, par.r_hat(), par.w_hat.value_or(0), rng, &rep.stats), from_ints);
      break;
    case Kind::subsetsum:
      if (inst.y_int.size() == 1) {
        take(solve_single(inst.y_int[0], inst.x_int[0], &rep.stats), from_binary);
      } else {
        take(solve_multichannel(inst.y_int, inst.x_int, multichannel_scale(inst.y_int.size(), inst.x_int[0].size()),
                                &rep.stats),
             from_binary);
      }
      break;
    case Kind::dep_subsetsum:
      take(solve_dependent_products(inst.y_int[0], inst.x_int[0], &rep.stats), from_binary);
      break;
    case Kind::lbr:
      take(lbr(inst.y_real, inst.x_real, inst.N, par.q_hat(), par.r_hat(), par.W_hat.value_or(0), rng, &rep.stats),
           [](const std::vector<Rational>& v) {
             SupportVector out;
             for (const auto& e : v) out.emplace_back(e);
             return out;
           });
      break;
    case Kind::jirss:
      take(jirss(inst.y_real, inst.x_int, instance_support(inst), policy, &rep.stats), identity);
      break;
    case Kind::ihdr:
      take(ihdr(inst.y_real[0], inst.x_real[0], instance_support(inst), policy, &rep.stats), identity);
      break;
    case Kind::mirr:
      take(mirr(inst.y_real, inst.x_int, par.r_hat(), par.q_hat(), instance_support(inst), rng, policy, &rep.stats),
           identity);
      break;
    case Kind::mirrc:
      take(mirr_c(inst.y_real, inst.x_real, inst.N, par.r_hat(), par.q_hat(), instance_support(inst), rng, policy,
                  &rep.stats),
           identity);
      break;
    case Kind::mixed_ira:
      take(mixed_ira_only(inst.y_real[0], inst.x_real[0], par.q_hat(), par.r_hat(), instance_support(inst), policy,
                          &rep.stats),
           identity);
      break;
    case Kind::phase_d:
      take(phase_discrete(inst.y_real[0], inst.x_int[0], instance_complex_support(inst), policy, &rep.stats),
           identity);
      break;
    case Kind::phase_c:
      take(phase_continuous(inst.y_real[0], inst.x_real[0], instance_complex_support(inst), policy, &rep.stats),
           identity);
      break;
  }
  rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  if (inst.beta_true) rep.exact_match = rep.estimate.has_value() && *rep.estimate == *inst.beta_true;
  return rep;
}

}  // namespace latrec
