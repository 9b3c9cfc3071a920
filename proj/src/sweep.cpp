#include "latrec/sweep.hpp"

#include "latrec/rng.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace latrec {

namespace {

const std::vector<std::string> kKnobs = {"n", "p", "Q", "R", "Q_hat", "R_hat", "x_bits", "N", "N_factor", "sigma", "support"};

[[noreturn]] void bad(const std::string& field, const std::string& what) {
  throw std::invalid_argument(field + ": " + what);
}

bool truncates(Kind k) { return k == Kind::lbr || k == Kind::mirrc; }

std::string json_text(const Json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

void apply_knob(GenParams& p, const std::string& knob, const Json& v, Kind kind) {
  const std::string field = "grid." + knob;
  Json single = Json::object();
  if (knob == "n" || knob == "p" || knob == "Q" || knob == "R" || knob == "Q_hat" || knob == "R_hat" ||
      knob == "x_bits" || knob == "sigma" || knob == "support") {
    single[knob] = v;
    GenParams parsed = params_from_json(single);
    if (knob == "n") p.n = parsed.n;
    if (knob == "p") p.p = parsed.p;
    if (knob == "Q") p.Q = parsed.Q;
    if (knob == "R") p.R = parsed.R;
    if (knob == "Q_hat") p.Q_hat = parsed.Q_hat;
    if (knob == "R_hat") p.R_hat = parsed.R_hat;
    if (knob == "x_bits") p.x_bits = parsed.x_bits;
    if (knob == "sigma") p.sigma = parsed.sigma;
    if (knob == "support") p.support = parsed.support;
  } else if (knob == "N") {
    if (!v.is_number_integer() || v.get<long>() < 1) bad(field, "expected a positive integer");
    (truncates(kind) ? p.N : p.x_bits) = v.get<long>();
  } else {
    bad(field, "unknown knob");
  }
}

std::string failure_key(const RecoveryReport& r) {
  if (r.failure) return r.failure->stage + ":" + r.failure->reason;
  return "mismatch";
}

std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

SweepConfig sweep_config_from_json(const Json& j) {
  if (!j.is_object()) bad("config", "expected an object");
  for (const auto& [key, value] : j.items()) {
    static const std::vector<std::string> allowed = {"kind", "base", "grid", "trials", "seed", "threads",
                                                     "record_timing", "precision_bits", "output"};
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) bad("config." + key, "unknown field");
  }
  SweepConfig cfg;
  if (!j.contains("kind") || !j["kind"].is_string()) bad("config.kind", "missing or not a string");
  try {
    cfg.kind = parse_kind(j["kind"].get<std::string>());
  } catch (const std::invalid_argument& e) {
    bad("config.kind", e.what());
  }
  if (j.contains("base")) cfg.base = params_from_json(j["base"]);
  if (j.contains("precision_bits")) {
    if (!j["precision_bits"].is_number_integer()) bad("config.precision_bits", "expected an integer");
    cfg.base.precision_bits = j["precision_bits"].get<long>();
    if (*cfg.base.precision_bits < 64) bad("config.precision_bits", "must be >= 64");
  }
  if (j.contains("trials")) {
    if (!j["trials"].is_number_integer() || j["trials"].get<long>() < 1) bad("config.trials", "must be an integer >= 1");
    cfg.trials = j["trials"].get<long>();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) bad("config.seed", "must be a nonnegative integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("threads")) {
    if (!j["threads"].is_number_unsigned()) bad("config.threads", "must be a nonnegative integer");
    cfg.threads = j["threads"].get<unsigned>();
  }
  if (j.contains("record_timing")) {
    if (!j["record_timing"].is_boolean()) bad("config.record_timing", "must be a boolean");
    cfg.record_timing = j["record_timing"].get<bool>();
  }
  if (j.contains("output")) {
    const Json& o = j["output"];
    if (!o.is_object()) bad("config.output", "expected an object");
    for (const auto& [key, value] : o.items()) {
      if (key != "csv" && key != "json") bad("config.output." + key, "unknown field");
      if (!value.is_string()) bad("config.output." + key, "expected a path string");
    }
    if (o.contains("csv")) cfg.csv_path = o["csv"].get<std::string>();
    if (o.contains("json")) cfg.json_path = o["json"].get<std::string>();
  }
  if (j.contains("grid")) {
    const Json& g = j["grid"];
    if (!g.is_object()) bad("config.grid", "expected an object of knob lists");
    for (const auto& [key, value] : g.items()) {
      if (std::find(kKnobs.begin(), kKnobs.end(), key) == kKnobs.end()) bad("config.grid." + key, "unknown knob");
      if (!value.is_array() || value.empty()) bad("config.grid." + key, "expected a nonempty list");
    }
    if (g.contains("N") && g.contains("N_factor")) bad("config.grid", "N and N_factor are exclusive");
    for (const auto& knob : kKnobs) {
      if (!g.contains(knob)) continue;
      std::vector<Json> values(g[knob].begin(), g[knob].end());
      if (knob == "N_factor") {
        for (const auto& v : values) {
          if (!v.is_number() && !v.is_string()) bad("config.grid.N_factor", "expected numbers");
          Rational f;
          try {
            f = parse_rational(json_text(v));
          } catch (const std::invalid_argument& e) {
            bad("config.grid.N_factor", e.what());
          }
          if (f <= 0) bad("config.grid.N_factor", "factors must be positive");
        }
      }
      cfg.grid.emplace_back(knob, std::move(values));
    }
  }
  // Knob values are parsed (and rejected) here; cells that parse but cannot be
  // resolved, such as an infeasible threshold, are reported per row instead.
  sweep_cells(cfg);
  return cfg;
}

std::vector<SweepCell> sweep_cells(const SweepConfig& cfg) {
  std::vector<SweepCell> cells = {{cfg.base, ""}};
  for (const auto& [knob, values] : cfg.grid) {
    std::vector<SweepCell> next;
    for (const auto& c : cells) {
      for (const auto& v : values) {
        SweepCell cell = c;
        GenParams& p = cell.params;
        if (!cell.error.empty()) {
          // already broken; keep the first error
        } else if (knob == "N_factor") {
          // N = ceil(factor * threshold) for this cell.
          GenParams probe = p;
          (truncates(cfg.kind) ? probe.N : probe.x_bits) = 0;
          try {
            probe = resolve_params(cfg.kind, probe);
          } catch (const std::invalid_argument& e) {
            cell.error = e.what();
            next.push_back(std::move(cell));
            continue;
          }
          const long threshold = truncates(cfg.kind) ? probe.N : probe.x_bits;
          const Rational scaled = parse_rational(json_text(v)) * threshold;
          BigInt ceil_v;
          mpz_cdiv_q(ceil_v.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
          (truncates(cfg.kind) ? p.N : p.x_bits) = std::max(1L, ceil_v.get_si());
        } else {
          apply_knob(p, knob, v, cfg.kind);
        }
        next.push_back(std::move(cell));
      }
    }
    cells = std::move(next);
  }
  return cells;
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t cell, long trial) {
  return derive_seed(derive_seed(master, cell, "cell"), static_cast<std::uint64_t>(trial), "trial");
}

SweepResult run_sweep(const SweepConfig& cfg) {
  const std::vector<SweepCell> cells = sweep_cells(cfg);
  SweepResult out;
  out.kind = cfg.kind;
  out.seed = cfg.seed;
  out.record_timing = cfg.record_timing;
  out.rows.resize(cells.size());

  struct TrialOutcome {
    bool generated = false;
    std::string error;
    long N = 0, bits = 0;
    RecoveryReport report;
  };
  const std::size_t total = cells.size() * static_cast<std::size_t>(cfg.trials);
  std::vector<TrialOutcome> results(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= total) return;
      const std::size_t cell = idx / static_cast<std::size_t>(cfg.trials);
      const long trial = static_cast<long>(idx % static_cast<std::size_t>(cfg.trials));
      TrialOutcome& r = results[idx];
      try {
        if (!cells[cell].error.empty()) throw std::invalid_argument(cells[cell].error);
        const Instance inst = gen_instance(cfg.kind, cells[cell].params, trial_seed(cfg.seed, cell, trial));
        r.generated = true;
        r.N = inst.N;
        r.bits = inst.construction_bits;
        r.report = solve_instance(inst);
      } catch (const std::exception& e) {
        if (!r.generated) {
          r.error = e.what();
        } else {
          r.report.failure = Failure{"harness", "exception", e.what()};
          r.report.exact_match = false;
        }
      }
    }
  };
  unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(total, 1)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (std::size_t cell = 0; cell < cells.size(); ++cell) {
    SweepRow& row = out.rows[cell];
    row.cell = cell;
    row.error = cells[cell].error;
    try {
      if (row.error.empty()) row.params = resolve_params(cfg.kind, cells[cell].params);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    if (!row.error.empty()) row.params = cells[cell].params;
    row.N = truncates(cfg.kind) ? row.params.N : row.params.x_bits;
    row.trials = cfg.trials;
    double sum_ms = 0;
    for (long t = 0; t < cfg.trials; ++t) {
      const TrialOutcome& r = results[cell * static_cast<std::size_t>(cfg.trials) + static_cast<std::size_t>(t)];
      if (!r.generated) {
        ++row.failures["gen:invalid_params"];
        if (row.error.empty()) row.error = r.error;
        continue;
      }
      row.N = r.N;
      row.precision_bits = std::max(row.precision_bits, r.bits);
      row.lll_invocations += r.report.stats.lll_invocations;
      row.pslq_iterations += r.report.stats.pslq_iterations;
      sum_ms += r.report.wall_ms;
      row.max_ms = std::max(row.max_ms, r.report.wall_ms);
      if (r.report.exact_match.value_or(false)) {
        ++row.exact_recoveries;
      } else {
        ++row.failures[failure_key(r.report)];
      }
    }
    row.mean_ms = sum_ms / static_cast<double>(cfg.trials);
  }
  return out;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string failures_text(const std::map<std::string, long>& f) {
  std::string out;
  for (const auto& [key, count] : f) {
    if (!out.empty()) out += ';';
    out += key + "=" + std::to_string(count);
  }
  return out;
}

std::string sigma_summary(const std::string& sigma) {
  try {
    return parse_sigma(sigma, 128).to_summary();
  } catch (const std::exception&) {
    return sigma;
  }
}

}  // namespace

std::string sweep_csv(const SweepResult& r) {
  std::ostringstream os;
  os << "cell,kind,n,p,N,Q_hat,R_hat,sigma,precision_bits,trials,exact_recoveries,success_rate,failures,"
        "lll_invocations,pslq_iterations";
  if (r.record_timing) os << ",mean_ms,max_ms";
  os << "\n";
  for (const auto& row : r.rows) {
    os << row.cell << ',' << kind_name(r.kind) << ',' << row.params.n << ',' << row.params.p << ',' << row.N << ','
       << to_string(row.params.q_hat()) << ',' << to_string(row.params.r_hat()) << ','
       << csv_field(sigma_summary(row.params.sigma)) << ',' << row.precision_bits << ',' << row.trials << ','
       << row.exact_recoveries << ','
       << shortest(static_cast<double>(row.exact_recoveries) / static_cast<double>(row.trials)) << ','
       << csv_field(failures_text(row.failures)) << ',' << row.lll_invocations << ',' << row.pslq_iterations;
    if (r.record_timing) os << ',' << shortest(row.mean_ms) << ',' << shortest(row.max_ms);
    os << "\n";
  }
  return os.str();
}

Json sweep_json(const SweepResult& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    Json j;
    j["cell"] = row.cell;
    j["params"] = to_json(row.params);
    j["N"] = row.N;
    j["sigma"] = row.params.sigma;
    j["precision_bits"] = row.precision_bits;
    j["trials"] = row.trials;
    j["exact_recoveries"] = row.exact_recoveries;
    j["success_rate"] = to_string(Rational(row.exact_recoveries, row.trials));
    j["failures"] = row.failures;
    j["lll_invocations"] = row.lll_invocations;
    j["pslq_iterations"] = row.pslq_iterations;
    if (r.record_timing) {
      j["mean_ms"] = row.mean_ms;
      j["max_ms"] = row.max_ms;
    }
    if (!row.error.empty()) j["error"] = row.error;
    rows.push_back(j);
  }
  return Json{{"kind", kind_name(r.kind)}, {"seed", r.seed}, {"rows", rows}};
}

}  // namespace latrec
