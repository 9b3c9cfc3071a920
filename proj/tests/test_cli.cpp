#include "latrec/serialize.hpp"
#include "latrec/sweep.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace latrec;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("latrec_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args, const fs::path& out = {}) {
  std::string cmd = std::string(LATREC_CLI) + " " + args;
  cmd += out.empty() ? " > /dev/null" : " > '" + out.string() + "'";
  cmd += " 2> '" + (scratch() / "stderr.txt").string() + "'";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("solve-elo on a planted instance") {
  const fs::path inst = scratch() / "elo.json";
  REQUIRE(run("gen --kind elo --seed 3 --params '{\"p\":15,\"R\":1,\"beta_lo\":0}' --out '" + inst.string() + "'") == 0);
  const fs::path rep = scratch() / "elo_report.json";
  CHECK(run("solve-elo --instance '" + inst.string() + "'", rep) == 0);
  const Json r = Json::parse(slurp(rep));
  const Json planted = Json::parse(slurp(inst));
  CHECK(r["estimate"] == planted["beta_true"]);
  CHECK(r["exact_match"] == true);
  CHECK(r["seed"] == 3);
  CHECK(r["params"]["p"] == 15);
}

TEST_CASE("usage errors exit 1") {
  const fs::path bad = scratch() / "bad.json";
  write(bad, "{not json");
  CHECK(run("solve-elo --instance '" + bad.string() + "'") == 1);
  CHECK(slurp(scratch() / "stderr.txt").find("malformed JSON") != std::string::npos);
  CHECK(run("solve-elo") == 1);
  CHECK(run("no-such-command") == 1);
  const fs::path inst = scratch() / "jirss.json";
  REQUIRE(run("gen --kind jirss --seed 1 --params '{\"p\":4,\"x_bits\":40}' --out '" + inst.string() + "'") == 0);
  CHECK(run("solve-elo --instance '" + inst.string() + "'") == 1);
  CHECK(run("gen --kind elo --params '{\"p\":0}'") == 1);
  CHECK(slurp(scratch() / "stderr.txt").find("params.p") != std::string::npos);
}

TEST_CASE("forced failure exits 2 with a Failure record") {
  const fs::path inst = scratch() / "unsat.json";
  write(inst, R"({"kind":"subsetsum","params":{"n":1,"p":3,"x_bits":8},"X":[["3","5","7"]],"Y":["100"]})");
  const fs::path rep = scratch() / "unsat_report.json";
  CHECK(run("subset-sum --instance '" + inst.string() + "'", rep) == 2);
  const Json r = Json::parse(slurp(rep));
  CHECK(r["failure"].is_object());
  CHECK(r["failure"]["reason"].is_string());
  CHECK(r["estimate"].is_null());
}

TEST_CASE("calculators, pslq and screening from the command line") {
  const fs::path out = scratch() / "bounds.json";
  REQUIRE(run("bounds --query '{\"n\":1,\"p\":15}'", out) == 0);
  CHECK(Json::parse(slurp(out))["n_threshold_elo"]["value"] == 369);
  const fs::path p = scratch() / "pslq.json";
  CHECK(run("pslq 1 '1/2+1/2*sqrt(5)' '3/2+1/2*sqrt(5)'", p) == 0);
  CHECK(Json::parse(slurp(p))["relation"] == Json::array({"1", "1", "-1"}));
  CHECK(run("screen-support --with-one 'sqrt(2)' 'sqrt(3)'") == 0);
  CHECK(run("screen-support 'sqrt(2)' 'sqrt(8)'") == 2);
  const fs::path l = scratch() / "lll.json";
  CHECK(run("lll --input '{\"columns\":[[\"1\",\"1\",\"1\"],[\"-1\",\"0\",\"2\"],[\"3\",\"5\",\"6\"]]}'", l) == 0);
  CHECK(Json::parse(slurp(l))["first_norm_sq"] == "1");
  CHECK(run("coprime-experiment --samples 1000 --range-hi 1") == 0);
}

TEST_CASE("single-cell sweep writes one data row, reruns are byte-identical") {
  const fs::path cfg = scratch() / "one.json";
  write(cfg, R"({"kind":"subsetsum","trials":3,"seed":5,"base":{"p":8,"x_bits":48}})");
  const fs::path a = scratch() / "a", b = scratch() / "b";
  REQUIRE(run("sweep --config '" + cfg.string() + "' --out '" + a.string() + "'") == 0);
  REQUIRE(run("sweep --config '" + cfg.string() + "' --out '" + b.string() + "'") == 0);
  const std::string csv = slurp(a.string() + ".csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
  CHECK(csv.rfind("cell,kind,n,p,N,Q_hat,R_hat,sigma,precision_bits,trials,exact_recoveries,success_rate,failures,"
                  "lll_invocations,pslq_iterations\n",
                  0) == 0);
  CHECK(csv == slurp(b.string() + ".csv"));
  CHECK(slurp(a.string() + ".json") == slurp(b.string() + ".json"));
  write(scratch() / "badcfg.json", R"({"kind":"elo","trials":0})");
  CHECK(run("sweep --config '" + (scratch() / "badcfg.json").string() + "'") == 1);
  CHECK(slurp(scratch() / "stderr.txt").find("config.trials") != std::string::npos);
}

TEST_CASE("ELO sweep across the threshold") {
  SweepConfig cfg = sweep_config_from_json(Json::parse(
      R"({"kind":"elo","trials":20,"seed":11,"base":{"p":15,"R":1,"beta_lo":0},"grid":{"N_factor":[0.5,0.75,1.0,1.25]}})"));
  const SweepResult r = run_sweep(cfg);
  REQUIRE(r.rows.size() == 4);
  for (std::size_t i = 1; i < 4; ++i) CHECK(r.rows[i].exact_recoveries >= r.rows[i - 1].exact_recoveries);
  CHECK(r.rows[2].exact_recoveries >= 18);
  CHECK(r.rows[3].exact_recoveries >= 18);
  CHECK(r.rows[2].N == 369);
  CHECK(r.rows[0].N == 185);
}

TEST_CASE("sweep errors are per cell") {
  SweepConfig cfg = sweep_config_from_json(Json::parse(
      R"({"kind":"lbr","trials":2,"seed":1,"base":{"p":4,"Q":2,"R":2},"grid":{"sigma":["0","1"]}})"));
  const SweepResult r = run_sweep(cfg);
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[0].error.empty());
  CHECK_FALSE(r.rows[1].error.empty());
  CHECK(r.rows[1].exact_recoveries == 0);
  CHECK(r.rows[1].failures.at("gen:invalid_params") == 2);
}

}
