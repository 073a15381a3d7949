// End-to-end checks of the command-line surface: real subprocesses, real
// files, the documented exit codes.
#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <catch2/catch_amalgamated.hpp>

#include "nightsched/json_io.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using namespace nightsched;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path out =
      fs::temp_directory_path() / ("nightsched_cli_" +
                                   std::to_string(::getpid()) + "_" +
                                   std::to_string(counter++) + ".out");
  const std::string cmd =
      std::string(NIGHTSCHED_CLI_PATH) + " " + args + " > " + out.string() +
      " 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult res;
  res.exit_code = WEXITSTATUS(status);
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  res.output = ss.str();
  fs::remove(out);
  return res;
}

fs::path sandbox_dir() {
  const fs::path dir =
      fs::temp_directory_path() / ("nightsched_test_" +
                                   std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

fs::path write_counterexample(const fs::path& dir,
                              std::vector<double> pi = {0, 0, 1, 0}) {
  const fs::path path = dir / "counterexample.json";
  std::ofstream out(path);
  out << instance_to_json(testutil::counterexample(std::move(pi))).dump(2);
  return path;
}

}  // namespace

TEST_CASE("solve reports the counterexample optimum with provenance") {
  const fs::path dir = sandbox_dir();
  const fs::path inst = write_counterexample(dir);
  RunResult res = run_cli("solve " + inst.string());
  REQUIRE(res.exit_code == 0);
  njson j = njson::parse(res.output);
  CHECK(j["etg"].get<double>() == 6.0);
  CHECK(j["proven_optimal"].get<bool>());
  CHECK(j["meta"]["tool"] == "nightsched");
  CHECK(j["meta"]["version"] == kVersion);
  CHECK(j["meta"]["config"].contains("dg"));
  CHECK(validate_schedule(testutil::counterexample(),
                          schedule_from_json(j["schedule"]))
            .ok());

  // Hidden verification flag agrees with the oracle.
  RunResult verified = run_cli("solve --oracle " + inst.string());
  REQUIRE(verified.exit_code == 0);
  njson v = njson::parse(verified.output);
  CHECK(v["oracle_check"]["agrees"].get<bool>());
}

TEST_CASE("solve exit codes: invalid input and unproven results") {
  const fs::path dir = sandbox_dir();

  const fs::path bad = dir / "bad.json";
  std::ofstream(bad) << "{\"nights\": 0}";
  CHECK(run_cli("solve " + bad.string()).exit_code == 2);

  CHECK(run_cli("solve " + (dir / "missing.json").string()).exit_code == 2);

  const fs::path invalid = dir / "invalid.json";
  std::ofstream(invalid) << instance_to_json([] {
                              Instance inst = testutil::counterexample();
                              inst.observations[0].release = 3;  // r == d
                              return inst;
                            }())
                                .dump();
  CHECK(run_cli("solve " + invalid.string()).exit_code == 2);

  // A one-node budget cannot prove optimality.
  const fs::path inst = write_counterexample(dir);
  RunResult limited = run_cli("solve --node-limit 1 " + inst.string());
  CHECK(limited.exit_code == 3);
  njson j = njson::parse(limited.output);
  CHECK_FALSE(j["proven_optimal"].get<bool>());
}

TEST_CASE("generate is reproducible and produces a manifest") {
  const fs::path dir = sandbox_dir();
  const std::string base =
      "generate --nights 3 --observations 6 --len-night 4 --max-gain 5 "
      "--count 4 --seed 11 --prob-model binomial --out ";
  REQUIRE(run_cli(base + (dir / "a").string()).exit_code == 0);
  REQUIRE(run_cli(base + (dir / "b").string()).exit_code == 0);

  for (int i = 1; i <= 4; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "instance_%04d.json", i);
    std::ifstream fa(dir / "a" / name), fb(dir / "b" / name);
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    REQUIRE_FALSE(sa.str().empty());
    CHECK(sa.str() == sb.str());
  }

  std::ifstream mf(dir / "a" / "manifest.json");
  njson manifest = njson::parse(mf);
  CHECK(manifest["instances"].size() == 4);
  CHECK(manifest["master_seed"] == 11);
  CHECK_FALSE(manifest["instances"][0]["p_clear"].is_null());

  // count=0 still succeeds with an empty manifest.
  REQUIRE(run_cli("generate --nights 2 --observations 2 --len-night 2 "
                  "--max-gain 2 --count 0 --seed 1 --out " +
                  (dir / "empty").string())
              .exit_code == 0);
  std::ifstream ef(dir / "empty" / "manifest.json");
  CHECK(njson::parse(ef)["instances"].empty());
}

TEST_CASE("compare emits metrics and dominance-checked curves") {
  const fs::path dir = sandbox_dir();
  const fs::path inst = write_counterexample(dir);
  const fs::path out = dir / "compare.json";
  RunResult res = run_cli("compare " + inst.string() + " --out " +
                          out.string() + " --curves-out " +
                          (dir / "curves").string());
  REQUIRE(res.exit_code == 0);

  std::ifstream in(out);
  njson j = njson::parse(in);
  CHECK(j["greedy"]["etg"].get<double>() == 5.0);
  CHECK(j["stochastic"]["etg"].get<double>() == 6.0);
  CHECK(j["omniscient"]["etg"].get<double>() == 6.0);
  CHECK(j["metrics"]["improvement_stochastic_greedy"].get<double>() == 1.0);
  CHECK(j["curves_dominated_by_omniscient"].get<bool>());

  for (const char* algo : {"greedy", "stochastic", "omniscient"}) {
    std::ifstream csv(dir / ("curves_" + std::string(algo) + ".csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line.rfind("# nightsched", 0) == 0);  // reproducibility header
    std::getline(csv, line);
    CHECK(line == "m,cumulative_gain,pi_m");
  }
}

TEST_CASE("reactive and sweep surfaces") {
  const fs::path dir = sandbox_dir();
  const fs::path inst = write_counterexample(dir, binomial_pi(3, 0.5));

  RunResult res = run_cli("reactive " + inst.string() + " --p-clear 0.5");
  REQUIRE(res.exit_code == 0);
  njson j = njson::parse(res.output);
  CHECK(j["scenarios"].size() == 8);
  CHECK(j["solver_calls"].get<int>() <= 7);
  double total = 0.0;
  for (const auto& sc : j["scenarios"])
    total += sc["probability"].get<double>();
  CHECK(std::fabs(total - 1.0) <= 1e-9);

  CHECK(run_cli("reactive " + inst.string() + " --p-clear 1.5").exit_code ==
        2);

  const fs::path sweep_out = dir / "sweep.csv";
  RunResult sw = run_cli("sweep " + inst.string() + " --grid 5 --out " +
                         sweep_out.string());
  REQUIRE(sw.exit_code == 0);
  std::ifstream csv(sweep_out);
  std::string line;
  std::getline(csv, line);
  CHECK(line.rfind("# nightsched", 0) == 0);
  std::getline(csv, line);
  CHECK(line == "p_clear,etg_stochastic,etg_reactive,upgrade");
  int rows = 0;
  while (std::getline(csv, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 5);
}

TEST_CASE("campaign writes per-instance CSV consistent with stats") {
  const fs::path dir = sandbox_dir();
  const fs::path out_dir = dir / "campaign";
  RunResult res = run_cli(
      "campaign --nights 3 --observations 6 --len-night 4 --max-gain 5 "
      "--count 5 --seed 21 --prob-model binomial "
      "--algorithms greedy,stochastic,omniscient,reactive --out-dir " +
      out_dir.string());
  REQUIRE(res.exit_code == 0);

  std::ifstream sf(out_dir / "stats.json");
  njson stats = njson::parse(sf);
  CHECK(stats["n_instances"] == 5);
  CHECK(stats["all_proven"].get<bool>());
  REQUIRE(stats["pairs"].is_array());

  // Recompute one aggregate from the CSV records.
  std::ifstream csv(out_dir / "instances.csv");
  std::string line;
  std::getline(csv, line);  // header comment
  std::getline(csv, line);  // column names
  int nonzero_sg = 0;
  int rows = 0;
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    ++rows;
    std::stringstream ss(line);
    std::vector<std::string> cols;
    std::string col;
    while (std::getline(ss, col, ',')) cols.push_back(col);
    REQUIRE(cols.size() >= 10);
    const double greedy = std::stod(cols[3]);
    const double stoch = std::stod(cols[4]);
    if (stoch - greedy > 1e-9) ++nonzero_sg;
  }
  CHECK(rows == 5);
  for (const auto& pair : stats["pairs"]) {
    if (pair["a1"] == "stochastic" && pair["a2"] == "greedy")
      CHECK(pair["n_nonzero_gap"].get<int>() == nonzero_sg);
  }

  CHECK(run_cli("campaign --algorithms nope --count 1 --out-dir " +
                (dir / "x").string())
            .exit_code == 2);
}

TEST_CASE("campaign over a pre-generated manifest") {
  const fs::path dir = sandbox_dir();
  REQUIRE(run_cli("generate --nights 3 --observations 6 --len-night 4 "
                  "--max-gain 5 --count 3 --seed 33 --prob-model binomial "
                  "--out " +
                  (dir / "inst").string())
              .exit_code == 0);

  const fs::path out_dir = dir / "manifest_campaign";
  RunResult res = run_cli("campaign --manifest " +
                          (dir / "inst" / "manifest.json").string() +
                          " --algorithms greedy,stochastic,reactive "
                          "--out-dir " +
                          out_dir.string());
  REQUIRE(res.exit_code == 0);
  std::ifstream sf(out_dir / "stats.json");
  njson stats = njson::parse(sf);
  CHECK(stats["n_instances"] == 3);

  // Reactive needs p_clear; uniform-model manifests must be rejected.
  REQUIRE(run_cli("generate --nights 2 --observations 3 --len-night 3 "
                  "--max-gain 3 --count 1 --seed 9 --prob-model uniform "
                  "--out " +
                  (dir / "uni").string())
              .exit_code == 0);
  CHECK(run_cli("campaign --manifest " +
                (dir / "uni" / "manifest.json").string() +
                " --algorithms reactive --out-dir " + (dir / "y").string())
            .exit_code == 2);
}
