// Command-line front end: solvers, calculators, instance generation and sweeps.
// Exit codes: 0 success, 2 solver Failure, 1 usage or input error.

#include "latrec/instruments.hpp"
#include "latrec/lattice.hpp"
#include "latrec/relation.hpp"
#include "latrec/serialize.hpp"
#include "latrec/sweep.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace latrec;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Inline JSON text, or "@path" to read a file.
Json load_json(const std::string& arg) {
  const std::string text = !arg.empty() && arg.front() == '@' ? read_file(arg.substr(1)) : arg;
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw UsageError(std::string("malformed JSON: ") + e.what());
  }
}

Json load_json_file(const std::string& path) {
  try {
    return Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw UsageError("malformed JSON in '" + path + "': " + e.what());
  }
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw UsageError("cannot write '" + out + "'");
  f << text;
}

void emit_json(const Json& j, const std::string& out) { emit(j.dump(2) + "\n", out); }

std::string pslq_status(const PslqResult& r) {
  if (std::holds_alternative<Relation>(r)) return "relation";
  if (std::holds_alternative<NotFound>(r)) return "not_found";
  return "precision_exhausted";
}

struct SolverArgs {
  std::string instance;
  std::string params;
  std::uint64_t seed = 0;
  long precision_bits = 0;
  std::string out;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact recovery of structured coefficient vectors via lattice reduction and integer relations"};
  app.require_subcommand(1);
  int exit_code = 0;

  // lll
  std::string lll_input, lll_delta = "3/4", lll_out;
  auto* lll = app.add_subcommand("lll", "LLL-reduce a basis given as {\"columns\": [[...], ...]}");
  lll->add_option("--input", lll_input, "basis JSON (inline or @file)")->required();
  lll->add_option("--delta", lll_delta, "Lovasz parameter as a rational");
  lll->add_option("--out", lll_out, "output file (default stdout)");
  lll->callback([&] {
    const LatticeBasis basis = basis_from_json(load_json(lll_input));
    const Rational delta = parse_rational(lll_delta);
    const LatticeBasis reduced = lll_reduce(basis, delta);
    Json j{{"input", to_json(basis)},
           {"delta", to_string(delta)},
           {"reduced", to_json(reduced)},
           {"first_norm_sq", to_string(norm_sq(reduced.column(0)))}};
    emit_json(j, lll_out);
  });

  // pslq
  std::vector<std::string> pslq_values;
  long pslq_bits = 0, pslq_coeff_bits = 32;
  std::string pslq_out;
  auto* pslq = app.add_subcommand("pslq", "search for an integer relation among real expressions");
  pslq->add_option("values", pslq_values, "expressions such as 1 \"1/2+1/2*sqrt(5)\"")->required()->expected(2, -1);
  pslq->add_option("--coeff-bits", pslq_coeff_bits, "expected relation size in bits (selects the default policy)");
  pslq->add_option("--precision-bits", pslq_bits, "working precision override");
  pslq->add_option("--out", pslq_out, "output file (default stdout)");
  pslq->callback([&] {
    PrecisionPolicy policy = default_policy(pslq_values.size(), pslq_coeff_bits);
    if (pslq_bits > 0) {
      policy.working_bits = pslq_bits;
      policy.detect_tolerance_bits = pslq_bits / 2;
      policy.relation_bound_bits = std::min(policy.relation_bound_bits, pslq_bits - pslq_bits / 2);
    }
    validate_policy(policy);
    const mpfr_prec_t bits = policy.working_bits + 64;
    RealVector b;
    for (const auto& e : pslq_values) b.push_back(parse_real_expr(e, bits));
    const PslqResult r = pslq_with_retry(b, policy);
    Json input = Json::array();
    for (const auto& v : b) input.push_back(v.to_canonical());
    Json j{{"input", input}, {"policy", to_json(policy)}, {"status", pslq_status(r)}};
    if (const auto* rel = std::get_if<Relation>(&r)) {
      Json m = Json::array();
      for (const auto& v : rel->m) m.push_back(to_string(v));
      j["relation"] = m;
      j["residual"] = rel->residual.to_canonical();
      j["iterations"] = rel->iterations;
      j["working_bits"] = rel->working_bits;
    } else if (const auto* nf = std::get_if<NotFound>(&r)) {
      j["iterations"] = nf->iterations;
      j["norm_bound_log2"] = nf->norm_bound_log2;
    } else {
      const auto& pe = std::get<PrecisionExhausted>(r);
      j["iterations"] = pe.iterations;
      j["detail"] = pe.detail;
    }
    emit_json(j, pslq_out);
    exit_code = std::holds_alternative<Relation>(r) ? 0 : 2;
  });

  // screen-support
  std::vector<std::string> screen_values;
  bool screen_with_one = false;
  long screen_bits = 0;
  std::string screen_out;
  auto* screen = app.add_subcommand("screen-support", "screen candidate support values for rational independence");
  screen->add_option("values", screen_values, "expressions such as sqrt(2) sqrt(3)")->required();
  screen->add_flag("--with-one", screen_with_one, "also require independence from 1");
  screen->add_option("--precision-bits", screen_bits, "precision of the probe values");
  screen->add_option("--out", screen_out, "output file (default stdout)");
  screen->callback([&] {
    std::vector<std::string> exprs = screen_values;
    if (screen_with_one) exprs.insert(exprs.begin(), "1");
    const PrecisionPolicy policy = screening_policy(exprs.size());
    const mpfr_prec_t bits = std::max<long>(screen_bits, policy.working_bits + 64);
    RealVector vals;
    for (const auto& e : exprs) vals.push_back(parse_real_expr(e, bits));
    const ScreenResult r = screen_rational_independence(vals, policy);
    Json j{{"values", exprs}, {"policy", to_json(policy)}};
    if (const auto* ind = std::get_if<IndependentUpToBound>(&r)) {
      j["status"] = "independent";
      j["bound_bits"] = ind->bound_bits;
      j["iterations"] = ind->iterations;
    } else if (const auto* dep = std::get_if<DependentWithRelation>(&r)) {
      j["status"] = "dependent";
      Json m = Json::array();
      for (const auto& v : dep->relation.m) m.push_back(to_string(v));
      j["relation"] = m;
      exit_code = 2;
    } else {
      j["status"] = "precision_exhausted";
      j["detail"] = std::get<PrecisionExhausted>(r).detail;
      exit_code = 2;
    }
    emit_json(j, screen_out);
  });

  // Solvers share one shape.
  const std::vector<std::pair<std::string, Kind>> solvers = {
      {"subset-sum", Kind::subsetsum}, {"subset-sum-dep", Kind::dep_subsetsum}, {"solve-elo", Kind::elo},
      {"solve-lbr", Kind::lbr},        {"solve-jirss", Kind::jirss},            {"solve-ihdr", Kind::ihdr},
      {"solve-mirr", Kind::mirr},      {"solve-mirrc", Kind::mirrc},            {"solve-mixed-ira", Kind::mixed_ira},
      {"solve-phase-d", Kind::phase_d}, {"solve-phase-c", Kind::phase_c}};
  std::vector<SolverArgs> solver_args(solvers.size());
  for (std::size_t i = 0; i < solvers.size(); ++i) {
    const auto [name, kind] = solvers[i];
    SolverArgs& a = solver_args[i];
    auto* sub = app.add_subcommand(name, "solve a " + kind_name(kind) + " instance and print the report");
    auto* inst_opt = sub->add_option("--instance", a.instance, "instance JSON file");
    auto* params_opt = sub->add_option("--params", a.params, "generation parameters (inline JSON or @file)");
    inst_opt->excludes(params_opt);
    sub->add_option("--seed", a.seed, "seed for --params generation");
    sub->add_option("--precision-bits", a.precision_bits, "raise the solver precision to at least this");
    sub->add_option("--out", a.out, "output file (default stdout)");
    sub->callback([&, kind = kind, name = name] {
      Instance inst;
      if (!a.instance.empty()) {
        inst = instance_from_json(load_json_file(a.instance));
        if (inst.kind != kind) throw UsageError(name + " expects a " + kind_name(kind) + " instance, got " + kind_name(inst.kind));
      } else if (!a.params.empty()) {
        inst = gen_instance(kind, params_from_json(load_json(a.params)), a.seed);
      } else {
        throw UsageError(name + ": one of --instance or --params is required");
      }
      if (a.precision_bits > 0) inst.params.precision_bits = a.precision_bits;
      const RecoveryReport rep = solve_instance(inst);
      emit_json(to_json(rep, inst), a.out);
      exit_code = rep.failure ? 2 : 0;
    });
  }

  // bounds
  std::string bounds_query, bounds_out;
  auto* bounds = app.add_subcommand("bounds", "evaluate every applicable threshold for a query");
  bounds->add_option("--query", bounds_query, "query JSON (inline or @file), e.g. {\"n\":1,\"p\":15}")->required();
  bounds->add_option("--out", bounds_out, "output file (default stdout)");
  bounds->callback([&] { emit_json(bounds_report(bounds_query_from_json(load_json(bounds_query))), bounds_out); });

  // gen
  std::string gen_kind, gen_params = "{}", gen_out;
  std::uint64_t gen_seed = 0;
  long gen_bits = 0;
  auto* gen = app.add_subcommand("gen", "generate a planted instance");
  gen->add_option("--kind", gen_kind, "instance kind")->required();
  gen->add_option("--params", gen_params, "generation parameters (inline JSON or @file)");
  gen->add_option("--seed", gen_seed, "instance seed");
  gen->add_option("--precision-bits", gen_bits, "minimum construction and solver precision");
  gen->add_option("--out", gen_out, "output file (default stdout)");
  gen->callback([&] {
    GenParams p = params_from_json(load_json(gen_params));
    if (gen_bits > 0) p.precision_bits = gen_bits;
    emit_json(to_json(gen_instance(parse_kind(gen_kind), p, gen_seed)), gen_out);
  });

  // sweep
  std::string sweep_config, sweep_out, sweep_format;
  std::optional<std::uint64_t> sweep_seed;
  std::optional<long> sweep_trials, sweep_bits;
  auto* sweep = app.add_subcommand("sweep", "run a parameter sweep and write CSV and JSON tables");
  sweep->add_option("--config", sweep_config, "sweep config JSON file")->required();
  sweep->add_option("--seed", sweep_seed, "override the master seed");
  sweep->add_option("--trials", sweep_trials, "override trials per cell");
  sweep->add_option("--precision-bits", sweep_bits, "minimum precision for every cell");
  sweep->add_option("--out", sweep_out, "output prefix; writes <prefix>.csv and <prefix>.json");
  sweep->add_option("--format", sweep_format, "write only this format")->check(CLI::IsMember({"csv", "json"}));
  sweep->callback([&] {
    SweepConfig cfg = sweep_config_from_json(load_json_file(sweep_config));
    if (sweep_seed) cfg.seed = *sweep_seed;
    if (sweep_trials) {
      if (*sweep_trials < 1) throw UsageError("--trials must be >= 1");
      cfg.trials = *sweep_trials;
    }
    if (sweep_bits) cfg.base.precision_bits = *sweep_bits;
    const SweepResult r = run_sweep(cfg);
    const std::string csv = sweep_csv(r);
    const std::string json = sweep_json(r).dump(2) + "\n";
    std::string csv_path = cfg.csv_path, json_path = cfg.json_path;
    if (!sweep_out.empty()) {
      csv_path = sweep_out + ".csv";
      json_path = sweep_out + ".json";
    }
    const bool want_csv = sweep_format.empty() || sweep_format == "csv";
    const bool want_json = sweep_format.empty() || sweep_format == "json";
    if (csv_path.empty() && json_path.empty()) {
      if (want_csv) std::cout << csv;
      if (want_json && !want_csv) std::cout << json;
      return;
    }
    if (want_csv && !csv_path.empty()) emit(csv, csv_path);
    if (want_json && !json_path.empty()) emit(json, json_path);
  });

  // coprime-experiment
  std::uint64_t cp_samples = 100000, cp_range = 1000000, cp_seed = 0;
  std::string cp_out;
  auto* cp = app.add_subcommand("coprime-experiment", "fraction of coprime pairs among uniform draws");
  cp->add_option("--samples", cp_samples, "number of pairs");
  cp->add_option("--range-hi", cp_range, "draw from {1..range_hi}");
  cp->add_option("--seed", cp_seed, "seed");
  cp->add_option("--out", cp_out, "output file (default stdout)");
  cp->callback([&] {
    const double f = coprime_fraction_experiment(cp_samples, cp_range, cp_seed);
    const double target = 6.0 / (M_PI * M_PI);
    emit_json(Json{{"samples", cp_samples}, {"range_hi", cp_range}, {"seed", cp_seed}, {"fraction", f},
                   {"six_over_pi_squared", target}, {"deviation", f - target}},
              cp_out);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return exit_code;
}
