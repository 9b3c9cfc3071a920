#pragma once

#include "latrec/instance.hpp"
#include "latrec/serialize.hpp"

#include <map>
#include <string>
#include <vector>

namespace latrec {

/// One grid value per knob. Knob names: n, p, Q, R, Q_hat, R_hat, x_bits, N, N_factor, sigma, support.
struct SweepConfig {
  Kind kind = Kind::elo;
  GenParams base;
  std::vector<std::pair<std::string, std::vector<Json>>> grid;  // knob order as listed in kKnobs
  long trials = 1;
  std::uint64_t seed = 0;
  unsigned threads = 0;        // 0: hardware concurrency
  bool record_timing = false;  // adds mean_ms / max_ms (not byte-reproducible)
  std::string csv_path, json_path;
};

/// Parses and validates a config document; errors name the offending field.
SweepConfig sweep_config_from_json(const Json& j);

struct SweepRow {
  std::size_t cell = 0;
  GenParams params;  // resolved
  long N = 0;
  long precision_bits = 0;
  long trials = 0;
  long exact_recoveries = 0;
  std::map<std::string, long> failures;  // "stage:reason" -> count (mismatches counted as "mismatch")
  long lll_invocations = 0;
  long pslq_iterations = 0;
  double mean_ms = 0, max_ms = 0;
  std::string error;  // set when the cell could not be generated
};

struct SweepResult {
  Kind kind = Kind::elo;
  std::uint64_t seed = 0;
  bool record_timing = false;
  std::vector<SweepRow> rows;
};

struct SweepCell {
  GenParams params;
  std::string error;  // nonempty when the cell's parameters cannot be resolved
};
/// Cartesian product of the grid in knob order, last knob varying fastest.
std::vector<SweepCell> sweep_cells(const SweepConfig& cfg);
std::uint64_t trial_seed(std::uint64_t master, std::size_t cell, long trial);
SweepResult run_sweep(const SweepConfig& cfg);

/// Frozen column order: cell,kind,n,p,N,Q_hat,R_hat,sigma,precision_bits,trials,exact_recoveries,
/// success_rate,failures,lll_invocations,pslq_iterations[,mean_ms,max_ms].
std::string sweep_csv(const SweepResult& r);
Json sweep_json(const SweepResult& r);

}  // namespace latrec
