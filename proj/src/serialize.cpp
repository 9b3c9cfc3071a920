#include "latrec/serialize.hpp"

#include <set>
#include <stdexcept>

namespace latrec {

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& what) {
  throw std::invalid_argument(field + ": " + what);
}

void check_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) bad(where, "expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) bad(where + "." + key, "unknown field");
  }
}

long long_from_json(const Json& j, const std::string& field) {
  if (!j.is_number_integer()) bad(field, "expected an integer");
  return j.get<long>();
}

std::string string_from_json(const Json& j, const std::string& field) {
  if (!j.is_string()) bad(field, "expected a string");
  return j.get<std::string>();
}

PrecReal real_from_json(const Json& j, const std::string& field) {
  try {
    return PrecReal::from_canonical(string_from_json(j, field));
  } catch (const std::invalid_argument& e) {
    bad(field, e.what());
  }
}

Json rational_json(const Rational& q) { return to_string(q); }
Json bigint_json(const BigInt& v) { return to_string(v); }

Json real_json(const PrecReal& x) { return x.to_canonical(); }

}  // namespace

BigInt bigint_from_json(const Json& j, const std::string& field) {
  if (j.is_number_integer()) return j.is_number_unsigned() ? BigInt(std::to_string(j.get<std::uint64_t>()))
                                                           : BigInt(std::to_string(j.get<long long>()));
  try {
    return parse_bigint(string_from_json(j, field));
  } catch (const std::invalid_argument& e) {
    bad(field, e.what());
  }
}

Rational rational_from_json(const Json& j, const std::string& field) {
  if (j.is_number_integer()) return Rational(bigint_from_json(j, field));
  try {
    return parse_rational(string_from_json(j, field));
  } catch (const std::invalid_argument& e) {
    bad(field, e.what());
  }
}

Json to_json(const SupportValue& v) {
  if (const auto* q = std::get_if<Rational>(&v)) return Json{{"rational", rational_json(*q)}};
  return Json{{"support", std::get<IrrationalIndex>(v).k}};
}

SupportValue support_value_from_json(const Json& j, const std::string& field) {
  if (!j.is_object() || j.size() != 1) bad(field, "expected {\"rational\": ...} or {\"support\": k}");
  if (j.contains("rational")) return rational_from_json(j["rational"], field + ".rational");
  if (j.contains("support")) {
    const long k = long_from_json(j["support"], field + ".support");
    if (k < 0) bad(field + ".support", "must be >= 0");
    return IrrationalIndex{static_cast<std::size_t>(k)};
  }
  bad(field, "expected {\"rational\": ...} or {\"support\": k}");
}

Json to_json(const Failure& f) { return Json{{"stage", f.stage}, {"reason", f.reason}, {"detail", f.detail}}; }

Json to_json(const PrecisionPolicy& p) {
  return Json{{"working_bits", p.working_bits},
              {"detect_tolerance_bits", p.detect_tolerance_bits},
              {"max_iterations", p.max_iterations},
              {"relation_bound_bits", p.relation_bound_bits}};
}

PrecisionPolicy policy_from_json(const Json& j) {
  check_keys(j, {"working_bits", "detect_tolerance_bits", "max_iterations", "relation_bound_bits"}, "policy");
  PrecisionPolicy p;
  if (j.contains("working_bits")) {
    p.working_bits = long_from_json(j["working_bits"], "policy.working_bits");
    p.detect_tolerance_bits = p.working_bits / 2;
  }
  if (j.contains("detect_tolerance_bits"))
    p.detect_tolerance_bits = long_from_json(j["detect_tolerance_bits"], "policy.detect_tolerance_bits");
  if (j.contains("max_iterations")) p.max_iterations = long_from_json(j["max_iterations"], "policy.max_iterations");
  if (j.contains("relation_bound_bits"))
    p.relation_bound_bits = long_from_json(j["relation_bound_bits"], "policy.relation_bound_bits");
  try {
    validate_policy(p);
  } catch (const std::invalid_argument& e) {
    bad("policy", e.what());
  }
  return p;
}

Json to_json(const GenParams& p) {
  Json j;
  j["n"] = p.n;
  j["p"] = p.p;
  j["x_bits"] = p.x_bits;
  j["x_dist"] = p.x_dist;
  j["N"] = p.N;
  j["Q"] = bigint_json(p.Q);
  j["R"] = bigint_json(p.R);
  if (p.Q_hat) j["Q_hat"] = bigint_json(*p.Q_hat);
  if (p.R_hat) j["R_hat"] = bigint_json(*p.R_hat);
  if (p.beta_lo) j["beta_lo"] = bigint_json(*p.beta_lo);
  j["w_max"] = bigint_json(p.w_max);
  if (p.w_hat) j["w_hat"] = bigint_json(*p.w_hat);
  j["sigma"] = p.sigma;
  j["noise"] = p.noise;
  if (p.W_hat) j["W_hat"] = rational_json(*p.W_hat);
  j["c"] = rational_json(p.c);
  j["support"] = p.support;
  Json cs = Json::array();
  for (const auto& [re, im] : p.complex_support) cs.push_back(Json::array({re, im}));
  j["complex_support"] = cs;
  if (p.rational_slots) j["rational_slots"] = *p.rational_slots;
  if (p.precision_bits) j["precision_bits"] = *p.precision_bits;
  return j;
}

GenParams params_from_json(const Json& j) {
  check_keys(j,
             {"n", "p", "x_bits", "x_dist", "N", "Q", "R", "Q_hat", "R_hat", "beta_lo", "w_max", "w_hat", "sigma",
              "noise", "W_hat", "c", "support", "complex_support", "rational_slots", "precision_bits"},
             "params");
  GenParams p;
  auto get_long = [&](const char* key, long& out) {
    if (j.contains(key)) out = long_from_json(j[key], std::string("params.") + key);
  };
  auto get_int = [&](const char* key, BigInt& out) {
    if (j.contains(key)) out = bigint_from_json(j[key], std::string("params.") + key);
  };
  auto get_opt_int = [&](const char* key, std::optional<BigInt>& out) {
    if (j.contains(key) && !j[key].is_null()) out = bigint_from_json(j[key], std::string("params.") + key);
  };
  auto get_string = [&](const char* key, std::string& out) {
    if (j.contains(key)) out = string_from_json(j[key], std::string("params.") + key);
  };
  get_long("n", p.n);
  get_long("p", p.p);
  get_long("x_bits", p.x_bits);
  get_string("x_dist", p.x_dist);
  get_long("N", p.N);
  get_int("Q", p.Q);
  get_int("R", p.R);
  get_opt_int("Q_hat", p.Q_hat);
  get_opt_int("R_hat", p.R_hat);
  get_opt_int("beta_lo", p.beta_lo);
  get_int("w_max", p.w_max);
  get_opt_int("w_hat", p.w_hat);
  if (j.contains("sigma")) {
    // Accept plain JSON numbers for convenience; they are read as decimal text.
    p.sigma = j["sigma"].is_number() ? j["sigma"].dump() : string_from_json(j["sigma"], "params.sigma");
  }
  get_string("noise", p.noise);
  if (j.contains("W_hat") && !j["W_hat"].is_null()) p.W_hat = rational_from_json(j["W_hat"], "params.W_hat");
  if (j.contains("c")) p.c = rational_from_json(j["c"], "params.c");
  if (j.contains("support")) {
    if (!j["support"].is_array()) bad("params.support", "expected an array of expressions");
    for (const auto& e : j["support"]) p.support.push_back(string_from_json(e, "params.support[]"));
  }
  if (j.contains("complex_support")) {
    if (!j["complex_support"].is_array()) bad("params.complex_support", "expected an array of [re, im] pairs");
    for (const auto& e : j["complex_support"]) {
      if (!e.is_array() || e.size() != 2) bad("params.complex_support[]", "expected [re, im]");
      p.complex_support.emplace_back(string_from_json(e[0], "params.complex_support[].re"),
                                     string_from_json(e[1], "params.complex_support[].im"));
    }
  }
  if (j.contains("rational_slots") && !j["rational_slots"].is_null())
    p.rational_slots = long_from_json(j["rational_slots"], "params.rational_slots");
  if (j.contains("precision_bits") && !j["precision_bits"].is_null())
    p.precision_bits = long_from_json(j["precision_bits"], "params.precision_bits");
  return p;
}

Json to_json(const Instance& inst) {
  Json j;
  j["kind"] = kind_name(inst.kind);
  j["seed"] = inst.seed;
  j["construction_bits"] = inst.construction_bits;
  j["N"] = inst.N;
  j["params"] = to_json(inst.params);
  Json x = Json::array();
  if (kind_has_real_x(inst.kind)) {
    for (const auto& row : inst.x_real) {
      Json r = Json::array();
      for (const auto& v : row) r.push_back(real_json(v));
      x.push_back(r);
    }
  } else {
    for (const auto& row : inst.x_int) {
      Json r = Json::array();
      for (const auto& v : row) r.push_back(bigint_json(v));
      x.push_back(r);
    }
  }
  j["X"] = x;
  Json y = Json::array();
  if (kind_has_real_y(inst.kind)) {
    for (const auto& v : inst.y_real) y.push_back(real_json(v));
  } else {
    for (const auto& v : inst.y_int) y.push_back(bigint_json(v));
  }
  j["Y"] = y;
  if (inst.beta_true) {
    Json b = Json::array();
    for (const auto& v : *inst.beta_true) b.push_back(to_json(v));
    j["beta_true"] = b;
  } else {
    j["beta_true"] = nullptr;
  }
  return j;
}

Instance instance_from_json(const Json& j) {
  check_keys(j, {"kind", "seed", "construction_bits", "N", "params", "X", "Y", "beta_true"}, "instance");
  for (const char* key : {"kind", "params", "X", "Y"})
    if (!j.contains(key)) bad(std::string("instance.") + key, "missing");
  Instance inst;
  try {
    inst.kind = parse_kind(string_from_json(j["kind"], "instance.kind"));
  } catch (const std::invalid_argument& e) {
    bad("instance.kind", e.what());
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) bad("instance.seed", "expected a nonnegative integer");
    inst.seed = j["seed"].get<std::uint64_t>();
  }
  inst.params = resolve_params(inst.kind, params_from_json(j["params"]));
  inst.N = j.contains("N") ? long_from_json(j["N"], "instance.N")
                           : (inst.kind == Kind::lbr || inst.kind == Kind::mirrc ? inst.params.N : inst.params.x_bits);
  if (!j["X"].is_array() || j["X"].empty()) bad("instance.X", "expected a nonempty matrix");
  if (!j["Y"].is_array()) bad("instance.Y", "expected a vector");
  std::size_t width = 0;
  for (const auto& row : j["X"]) {
    if (!row.is_array() || row.empty()) bad("instance.X", "rows must be nonempty arrays");
    if (width != 0 && row.size() != width) bad("instance.X", "rows differ in length");
    width = row.size();
    if (kind_has_real_x(inst.kind)) {
      RealVector r;
      for (const auto& v : row) r.push_back(real_from_json(v, "instance.X"));
      inst.x_real.push_back(std::move(r));
    } else {
      IntVector r;
      for (const auto& v : row) r.push_back(bigint_from_json(v, "instance.X"));
      inst.x_int.push_back(std::move(r));
    }
  }
  for (const auto& v : j["Y"]) {
    if (kind_has_real_y(inst.kind)) {
      inst.y_real.push_back(real_from_json(v, "instance.Y"));
    } else {
      inst.y_int.push_back(bigint_from_json(v, "instance.Y"));
    }
  }
  const std::size_t rows = j["X"].size();
  const std::size_t ny = j["Y"].size();
  if (ny != rows) bad("instance.Y", "length must equal the number of rows of X");
  if (static_cast<long>(rows) != inst.params.n) bad("instance.X", "row count must equal params.n");
  if (static_cast<long>(width) != inst.params.p) bad("instance.X", "column count must equal params.p");
  long cb = 64;
  for (const auto& v : inst.y_real) cb = std::max<long>(cb, v.precision());
  inst.construction_bits = j.contains("construction_bits") ? long_from_json(j["construction_bits"], "instance.construction_bits") : cb;
  if (inst.construction_bits < 64) bad("instance.construction_bits", "must be >= 64");
  if (j.contains("beta_true") && !j["beta_true"].is_null()) {
    if (!j["beta_true"].is_array()) bad("instance.beta_true", "expected an array");
    SupportVector b;
    for (const auto& v : j["beta_true"]) b.push_back(support_value_from_json(v, "instance.beta_true[]"));
    inst.beta_true = b;
  }
  return inst;
}

Json to_json(const RecoveryReport& rep, const Instance& inst) {
  Json j;
  j["kind"] = kind_name(rep.kind);
  j["seed"] = rep.seed;
  j["params"] = to_json(inst.params);
  j["construction_bits"] = inst.construction_bits;
  j["N"] = inst.N;
  if (auto pol = instance_policy(inst)) {
    j["policy"] = to_json(*pol);
  } else {
    j["policy"] = nullptr;
  }
  if (rep.estimate) {
    Json e = Json::array();
    for (const auto& v : *rep.estimate) e.push_back(to_json(v));
    j["estimate"] = e;
  } else {
    j["estimate"] = nullptr;
  }
  j["failure"] = rep.failure ? to_json(*rep.failure) : Json(nullptr);
  j["exact_match"] = rep.exact_match ? Json(*rep.exact_match) : Json(nullptr);
  j["counters"] = Json{{"lll_invocations", rep.stats.lll_invocations},
                       {"pslq_iterations", rep.stats.pslq_iterations},
                       {"wall_ms", rep.wall_ms}};
  return j;
}

Json to_json(const LatticeBasis& b) {
  Json cols = Json::array();
  for (const auto& c : b.columns()) {
    Json col = Json::array();
    for (const auto& v : c) col.push_back(bigint_json(v));
    cols.push_back(col);
  }
  return Json{{"columns", cols}};
}

LatticeBasis basis_from_json(const Json& j) {
  check_keys(j, {"columns"}, "basis");
  if (!j.contains("columns") || !j["columns"].is_array()) bad("basis.columns", "expected an array of columns");
  std::vector<IntVector> cols;
  for (const auto& c : j["columns"]) {
    if (!c.is_array()) bad("basis.columns[]", "expected an array");
    IntVector col;
    for (const auto& v : c) col.push_back(bigint_from_json(v, "basis.columns[][]"));
    cols.push_back(std::move(col));
  }
  try {
    return LatticeBasis(std::move(cols));
  } catch (const std::invalid_argument& e) {
    bad("basis.columns", e.what());
  }
}

BoundsQuery bounds_query_from_json(const Json& j) {
  check_keys(j, {"n", "p", "R", "Q", "R_hat", "Q_hat", "sigma", "eps", "c", "W_inf", "N"}, "query");
  BoundsQuery q;
  if (j.contains("n")) q.n = long_from_json(j["n"], "query.n");
  if (j.contains("p")) q.p = long_from_json(j["p"], "query.p");
  if (j.contains("R")) q.R = rational_from_json(j["R"], "query.R");
  if (j.contains("Q")) q.Q = rational_from_json(j["Q"], "query.Q");
  q.R_hat = j.contains("R_hat") ? rational_from_json(j["R_hat"], "query.R_hat") : q.R;
  q.Q_hat = j.contains("Q_hat") ? rational_from_json(j["Q_hat"], "query.Q_hat") : q.Q;
  if (j.contains("sigma")) {
    const std::string s = j["sigma"].is_number() ? j["sigma"].dump() : string_from_json(j["sigma"], "query.sigma");
    try {
      q.sigma = parse_sigma(s, 256);
    } catch (const std::invalid_argument& e) {
      bad("query.sigma", e.what());
    }
  }
  if (j.contains("eps")) q.eps = rational_from_json(j["eps"], "query.eps");
  if (j.contains("c")) q.c = rational_from_json(j["c"], "query.c");
  if (j.contains("W_inf")) q.W_inf = rational_from_json(j["W_inf"], "query.W_inf");
  if (j.contains("N")) q.N = long_from_json(j["N"], "query.N");
  try {
    validate(q);
  } catch (const std::invalid_argument& e) {
    bad("query", e.what());
  }
  return q;
}

Json bounds_report(const BoundsQuery& q) {
  validate(q);
  auto threshold = [](const Threshold& t) { return Json{{"value", t.value}, {"rhs_upper", rational_json(t.rhs_upper)}}; };
  auto lbr = [&](bool iid) {
    auto N = n_threshold_lbr(q, iid);
    if (!N) return Json{{"value", "Infeasible"}};
    return Json{{"value", *N}, {"rhs_upper", rational_json(lbr_rhs_upper(q, iid, *N))}};
  };
  auto real = [](const PrecReal& x) { return Json{{"value", real_json(x)}, {"summary", x.to_summary()}}; };
  Json j;
  j["query"] = Json{{"n", q.n},
                    {"p", q.p},
                    {"R", rational_json(q.R)},
                    {"Q", rational_json(q.Q)},
                    {"R_hat", rational_json(q.R_hat)},
                    {"Q_hat", rational_json(q.Q_hat)},
                    {"sigma", real_json(q.sigma)},
                    {"eps", rational_json(q.eps)},
                    {"c", rational_json(q.c)},
                    {"W_inf", rational_json(q.W_inf)}};
  if (q.N) j["query"]["N"] = *q.N;
  j["n_threshold_elo"] = threshold(n_threshold_elo(q));
  j["n_threshold_mirr"] = threshold(n_threshold_mirr(q));
  j["n_threshold_lbr_adversarial"] = lbr(false);
  j["n_threshold_lbr_iid"] = lbr(true);
  j["n_threshold_mirr_c"] = n_threshold_mirr_c(q);
  const Cor2Window w = n_window_cor2(q);
  j["n_window_cor2"] = Json{{"lower", w.lower},
                            {"upper", w.upper ? Json(*w.upper) : Json(nullptr)},
                            {"premise_ok", w.premise_ok},
                            {"nonempty", w.nonempty()}};
  j["sigma_info_bound"] = real(sigma_info_bound(q.n, q.p, q.Q, q.R));
  if (q.N) j["jirss_condition_value"] = real(jirss_condition_value(q.n, q.p, *q.N, q.c));
  j["sigma0_optimal"] = real(sigma0_optimal(q.p, q.n, q.R, q.Q));
  return j;
}

}  // namespace latrec
