// Command-line surface for the night scheduling toolkit: instance
// generation, solving, strategy comparison, reactive simulation, probability
// sweeps, and experiment campaigns with CSV/JSON outputs.
//
// Exit codes: 0 success, 1 internal failure or failed verification,
// 2 invalid input, 3 a solve hit its limit without proving optimality.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nightsched/campaign.hpp"
#include "nightsched/core.hpp"
#include "nightsched/instance_gen.hpp"
#include "nightsched/json_io.hpp"
#include "nightsched/oracle.hpp"
#include "nightsched/reactive.hpp"
#include "nightsched/solver.hpp"
#include "nightsched/strategies.hpp"

namespace fs = std::filesystem;
using namespace nightsched;

namespace {

struct InvalidInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open instance file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  Instance inst;
  try {
    inst = parse_instance_text(buffer.str());
  } catch (const ParseError& e) {
    throw InvalidInput(path + ": " + e.what());
  }
  ValidationReport rep = validate_instance(inst);
  if (!rep.ok()) {
    std::string msg = path + ": invalid instance";
    for (const auto& issue : rep.issues) msg += "\n  - " + issue.message;
    throw InvalidInput(msg);
  }
  return inst;
}

void write_text(const std::optional<std::string>& path,
                const std::string& content) {
  if (!path) {
    std::cout << content;
    return;
  }
  std::ofstream out(*path);
  if (!out) throw InvalidInput("cannot write output file: " + *path);
  out << content;
}

njson config_json(const SolverConfig& cfg) {
  njson j;
  j["time_limit"] = cfg.time_limit;
  j["dg"] = cfg.use_dg;
  j["bo"] = cfg.use_bo;
  j["icg"] = cfg.use_icg;
  if (cfg.node_limit)
    j["node_limit"] = *cfg.node_limit;
  else
    j["node_limit"] = nullptr;
  return j;
}

njson meta_json(const std::string& command, const SolverConfig& cfg) {
  njson meta;
  meta["tool"] = "nightsched";
  meta["version"] = kVersion;
  meta["command"] = command;
  meta["config"] = config_json(cfg);
  return meta;
}

std::string csv_header(const std::string& command, const SolverConfig& cfg,
                       const std::string& extra = "") {
  std::string h = "# nightsched " + std::string(kVersion) + " " + command;
  h += " time_limit=" + format_double(cfg.time_limit);
  h += std::string(" dg=") + (cfg.use_dg ? "1" : "0");
  h += std::string(" bo=") + (cfg.use_bo ? "1" : "0");
  h += std::string(" icg=") + (cfg.use_icg ? "1" : "0");
  if (!extra.empty()) h += " " + extra;
  h += "\n";
  return h;
}

void add_solver_flags(CLI::App* cmd, SolverConfig* cfg,
                      std::optional<std::uint64_t>* node_limit) {
  cmd->add_option("--time-limit", cfg->time_limit,
                  "Solver time limit in seconds (0 = unlimited)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_flag("--dg,!--no-dg", cfg->use_dg,
                "Decreasing-gain dominance pruning");
  cmd->add_flag("--bo,!--no-bo", cfg->use_bo,
                "Bounded-observations pruning");
  cmd->add_flag("--icg,!--no-icg", cfg->use_icg,
                "Increasing-cumulative-gain incumbent check");
  cmd->add_option("--node-limit", *node_limit, "Stop after this many nodes");
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
  GenParams params;
  int count = 1;
  std::string prob_model = "uniform";
  std::optional<double> p_clear;
  std::string out_dir;
};

int run_generate(const GenerateArgs& args) {
  GenParams base = args.params;
  if (args.prob_model == "uniform") {
    base.model = ProbabilityModel::uniform_normalized;
  } else if (args.prob_model == "binomial") {
    base.model = ProbabilityModel::binomial;
    base.fixed_p_clear = args.p_clear;
  } else {
    throw InvalidInput("unknown probability model: " + args.prob_model);
  }

  fs::create_directories(args.out_dir);

  njson manifest;
  manifest["meta"] = meta_json("generate", SolverConfig{});
  manifest["master_seed"] = args.params.seed;
  manifest["params"] = {{"nights", base.nights},
                        {"observations", base.observations},
                        {"len_night", base.len_night},
                        {"max_gain", base.max_gain},
                        {"probability_model", args.prob_model}};
  njson entries = njson::array();

  std::uint64_t state = args.params.seed;
  for (int i = 0; i < args.count; ++i) {
    GenParams params = base;
    params.seed = splitmix64_next(state);
    GeneratedInstance gen = generate_instance(params);

    char name[32];
    std::snprintf(name, sizeof(name), "instance_%04d.json", i + 1);
    const fs::path path = fs::path(args.out_dir) / name;
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write " + path.string());
    out << instance_to_json(gen.instance).dump(2) << "\n";

    njson entry;
    entry["file"] = name;
    entry["seed"] = params.seed;
    if (gen.p_clear)
      entry["p_clear"] = *gen.p_clear;
    else
      entry["p_clear"] = nullptr;
    entries.push_back(std::move(entry));
  }
  manifest["instances"] = std::move(entries);

  std::ofstream mout(fs::path(args.out_dir) / "manifest.json");
  mout << manifest.dump(2) << "\n";
  std::cerr << "wrote " << args.count << " instance(s) to " << args.out_dir
            << "\n";
  return 0;
}

// ------------------------------------------------------------------- solve

int run_solve(const std::string& instance_path, const SolverConfig& cfg,
              bool oracle_check, const std::optional<std::string>& out_path) {
  Instance inst = load_instance(instance_path);
  SolveResult res = solve_stochastic(inst, cfg);

  njson j;
  j["meta"] = meta_json("solve", cfg);
  j["meta"]["instance"] = instance_path;
  j["etg"] = res.etg;
  j["proven_optimal"] = res.proven_optimal;
  j["nodes_explored"] = res.nodes_explored;
  j["elapsed_seconds"] = res.elapsed_seconds;
  j["schedule"] = schedule_to_json(res.schedule);

  int rc = res.proven_optimal ? 0 : 3;
  if (oracle_check) {
    try {
      auto [expected, witness] = oracle::brute_force_etg(inst);
      const bool agrees = std::fabs(expected - res.etg) <= 1e-9;
      j["oracle_check"] = {{"etg", expected}, {"agrees", agrees}};
      if (!agrees) rc = 1;
    } catch (const std::invalid_argument& e) {
      throw InvalidInput(std::string("--oracle: ") + e.what());
    }
  }

  write_text(out_path, j.dump(2) + "\n");
  return rc;
}

// ----------------------------------------------------------------- compare

std::string curve_csv(const std::string& algo, const GainCurve& curve,
                      const SolverConfig& cfg) {
  std::string csv = csv_header("compare", cfg, "algorithm=" + algo);
  csv += "m,cumulative_gain,pi_m\n";
  for (std::size_t m = 0; m < curve.cumulative.size(); ++m) {
    csv += std::to_string(m) + "," + format_double(curve.cumulative[m]) + ",";
    csv += format_double(m < curve.widths.size() ? curve.widths[m] : 0.0);
    csv += "\n";
  }
  return csv;
}

int run_compare(const std::string& instance_path, const SolverConfig& cfg,
                const std::optional<std::string>& out_path,
                const std::optional<std::string>& curves_prefix) {
  Instance inst = load_instance(instance_path);

  StrategyOutcome greedy = greedy_schedule(inst);
  SolveResult stoch = solve_stochastic(inst, cfg);
  OmniscientCurve omni = omniscient_curve(inst, cfg);
  const double omni_etg = omniscient_etg(omni, inst.probabilities);

  njson j;
  j["meta"] = meta_json("compare", cfg);
  j["meta"]["instance"] = instance_path;
  j["greedy"] = {{"etg", greedy.etg},
                 {"per_night_gains", greedy.per_night_gains},
                 {"schedule", schedule_to_json(*greedy.schedule)}};
  j["stochastic"] = {{"etg", stoch.etg},
                     {"proven_optimal", stoch.proven_optimal},
                     {"nodes_explored", stoch.nodes_explored},
                     {"per_night_gains", per_night_gains(inst, stoch.schedule)},
                     {"schedule", schedule_to_json(stoch.schedule)}};
  j["omniscient"] = {{"values", omni.values},
                     {"proven_optimal", omni.proven_optimal},
                     {"etg", omni_etg}};

  njson metrics;
  metrics["upgrade_stochastic_greedy"] =
      greedy.etg > 0.0 ? njson(upgrade(stoch.etg, greedy.etg)) : njson();
  metrics["upgrade_omniscient_stochastic"] =
      stoch.etg > 0.0 ? njson(upgrade(omni_etg, stoch.etg)) : njson();
  metrics["improvement_stochastic_greedy"] =
      omni_etg - greedy.etg > kProbTol
          ? njson(improvement(stoch.etg, greedy.etg, omni_etg))
          : njson();
  j["metrics"] = std::move(metrics);

  // Pointwise dominance report: every cumulative curve under the envelope.
  bool dominated = true;
  auto greedy_curve = gain_curve(inst, greedy.per_night_gains);
  auto stoch_curve = gain_curve(inst, per_night_gains(inst, stoch.schedule));
  for (std::size_t m = 1; m < omni.values.size() + 1; ++m) {
    if (greedy_curve.cumulative[m] > omni.values[m - 1] + 1e-9)
      dominated = false;
    if (stoch_curve.cumulative[m] > omni.values[m - 1] + 1e-9)
      dominated = false;
  }
  j["curves_dominated_by_omniscient"] = dominated;

  if (curves_prefix) {
    write_text(*curves_prefix + "_greedy.csv",
               curve_csv("greedy", greedy_curve, cfg));
    write_text(*curves_prefix + "_stochastic.csv",
               curve_csv("stochastic", stoch_curve, cfg));
    GainCurve omni_curve;
    omni_curve.cumulative.push_back(0.0);
    for (double v : omni.values) omni_curve.cumulative.push_back(v);
    omni_curve.widths = inst.probabilities;
    write_text(*curves_prefix + "_omniscient.csv",
               curve_csv("omniscient", omni_curve, cfg));
  }

  write_text(out_path, j.dump(2) + "\n");
  return stoch.proven_optimal && omni.proven_optimal ? 0 : 3;
}

// ---------------------------------------------------------------- reactive

int run_reactive(const std::string& instance_path, double p_clear,
                 const SolverConfig& cfg,
                 const std::optional<std::string>& out_path) {
  Instance inst = load_instance(instance_path);
  if (p_clear < 0.0 || p_clear > 1.0)
    throw InvalidInput("--p-clear must lie in [0, 1]");

  ReactiveResult res = simulate_reactive(inst.observations, inst.nights,
                                         BinomialWeather{p_clear}, cfg);

  njson j;
  j["meta"] = meta_json("reactive", cfg);
  j["meta"]["instance"] = instance_path;
  j["meta"]["p_clear"] = p_clear;
  j["expected_gain"] = res.expected_gain;
  j["static_etg"] = res.static_etg;
  j["upgrade"] = res.static_etg > 0.0
                     ? njson(upgrade(res.expected_gain, res.static_etg))
                     : njson(0.0);
  j["solver_calls"] = res.solver_calls;
  j["proven_optimal"] = res.proven_optimal;
  njson scenarios = njson::array();
  for (const auto& sc : res.scenarios) {
    njson s;
    s["outcome_mask"] = sc.outcome_mask;
    s["probability"] = sc.probability;
    s["total_gain"] = sc.total_gain;
    scenarios.push_back(std::move(s));
  }
  j["scenarios"] = std::move(scenarios);

  write_text(out_path, j.dump(2) + "\n");
  return res.proven_optimal ? 0 : 3;
}

// ------------------------------------------------------------------- sweep

int run_sweep(const std::string& instance_path, int grid_points,
              const SolverConfig& cfg,
              const std::optional<std::string>& out_path) {
  Instance inst = load_instance(instance_path);
  if (grid_points < 2) throw InvalidInput("--grid needs at least 2 points");

  std::vector<double> grid;
  for (int k = 0; k < grid_points; ++k)
    grid.push_back(static_cast<double>(k) / (grid_points - 1));
  auto curve = sweep_binomial(inst.observations, inst.nights, grid, cfg);

  std::string csv = csv_header("sweep", cfg, "instance=" + instance_path);
  csv += "p_clear,etg_stochastic,etg_reactive,upgrade\n";
  for (const auto& pt : curve) {
    csv += format_double(pt.p_clear) + "," +
           format_double(pt.etg_stochastic) + "," +
           format_double(pt.etg_reactive) + "," + format_double(pt.upgrade) +
           "\n";
  }
  write_text(out_path, csv);
  return 0;
}

// ---------------------------------------------------------------- campaign

struct CampaignArgs {
  GenParams params;
  int count = 0;
  std::string prob_model = "binomial";
  std::string manifest_path;
  std::string algorithms = "greedy,stochastic,omniscient";
  std::string out_dir;
};

AlgorithmSelection parse_algorithms(const std::string& list) {
  AlgorithmSelection sel;
  sel.greedy = sel.stochastic = sel.omniscient = sel.reactive = false;
  std::stringstream ss(list);
  std::string name;
  while (std::getline(ss, name, ',')) {
    if (name == "greedy")
      sel.greedy = true;
    else if (name == "stochastic")
      sel.stochastic = true;
    else if (name == "omniscient")
      sel.omniscient = true;
    else if (name == "reactive")
      sel.reactive = true;
    else
      throw InvalidInput("unknown algorithm: " + name);
  }
  if (!sel.greedy && !sel.stochastic && !sel.omniscient && !sel.reactive)
    throw InvalidInput("--algorithms selected nothing");
  return sel;
}

int run_campaign_cmd(const CampaignArgs& args, const SolverConfig& cfg) {
  std::vector<GeneratedInstance> instances;
  std::vector<std::uint64_t> seeds;

  if (!args.manifest_path.empty()) {
    std::ifstream in(args.manifest_path);
    if (!in) throw InvalidInput("cannot open manifest: " + args.manifest_path);
    njson manifest;
    try {
      in >> manifest;
    } catch (const njson::exception& e) {
      throw InvalidInput(std::string("malformed manifest: ") + e.what());
    }
    const fs::path dir = fs::path(args.manifest_path).parent_path();
    for (const auto& entry : manifest.at("instances")) {
      GeneratedInstance gen;
      gen.instance =
          load_instance((dir / entry.at("file").get<std::string>()).string());
      if (entry.contains("p_clear") && !entry.at("p_clear").is_null())
        gen.p_clear = entry.at("p_clear").get<double>();
      seeds.push_back(entry.value("seed", std::uint64_t{0}));
      instances.push_back(std::move(gen));
    }
  } else {
    if (args.count < 1)
      throw InvalidInput("campaign needs --count or --manifest");
    GenParams base = args.params;
    base.model = args.prob_model == "binomial"
                     ? ProbabilityModel::binomial
                     : ProbabilityModel::uniform_normalized;
    std::uint64_t state = args.params.seed;
    for (int i = 0; i < args.count; ++i) {
      GenParams params = base;
      params.seed = splitmix64_next(state);
      seeds.push_back(params.seed);
      instances.push_back(generate_instance(params));
    }
  }

  AlgorithmSelection algos = parse_algorithms(args.algorithms);
  CampaignStats stats = run_campaign(instances, seeds, algos, cfg);

  fs::create_directories(args.out_dir);

  // Per-instance CSV, fixed column order.
  std::string csv =
      csv_header("campaign", cfg,
                 "algorithms=" + args.algorithms +
                     " master_seed=" + std::to_string(args.params.seed));
  csv +=
      "index,seed,p_clear,etg_greedy,etg_stochastic,etg_omniscient,"
      "etg_reactive,nodes_stochastic,elapsed_stochastic,all_proven\n";
  auto opt = [](const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
  };
  for (const auto& rec : stats.records) {
    csv += std::to_string(rec.index) + "," + std::to_string(rec.seed) + "," +
           opt(rec.p_clear) + "," + opt(rec.etg_greedy) + "," +
           opt(rec.etg_stochastic) + "," + opt(rec.etg_omniscient) + "," +
           opt(rec.etg_reactive) + "," + std::to_string(rec.nodes_stochastic) +
           "," + format_double(rec.elapsed_stochastic) + "," +
           (rec.all_proven ? "1" : "0") + "\n";
  }
  write_text((fs::path(args.out_dir) / "instances.csv").string(), csv);

  njson j;
  j["meta"] = meta_json("campaign", cfg);
  j["meta"]["algorithms"] = args.algorithms;
  j["meta"]["master_seed"] = args.params.seed;
  j["meta"]["filters"] =
      "means over instances with gap > 1e-9; upgrade additionally needs "
      "ETG[A2] > 0; improvement needs omniscient gap > 1e-9";
  j["n_instances"] = stats.n_instances;
  njson pairs = njson::array();
  bool all_proven = true;
  for (const auto& rec : stats.records) all_proven &= rec.all_proven;
  for (const auto& pair : stats.pairs) {
    njson p;
    p["a1"] = pair.a1;
    p["a2"] = pair.a2;
    p["n_instances"] = pair.n_instances;
    p["n_nonzero_gap"] = pair.n_nonzero_gap;
    p["n_upgrade_defined"] = pair.n_upgrade_defined;
    p["mean_upgrade"] =
        pair.n_upgrade_defined > 0 ? njson(pair.mean_upgrade) : njson();
    p["n_improvement_defined"] = pair.n_improvement_defined;
    p["mean_improvement"] = pair.n_improvement_defined > 0
                                ? njson(pair.mean_improvement)
                                : njson();
    pairs.push_back(std::move(p));
  }
  j["pairs"] = std::move(pairs);
  j["all_proven"] = all_proven;

  std::ofstream out(fs::path(args.out_dir) / "stats.json");
  out << j.dump(2) << "\n";
  std::cerr << "campaign finished: " << stats.n_instances << " instance(s), "
            << "results in " << args.out_dir << "\n";
  return all_proven ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scheduling of observations over nights with stochastic "
               "weather: solvers, strategies, and experiment tooling"};
  app.require_subcommand(1);

  // generate
  GenerateArgs gen;
  auto* cmd_gen = app.add_subcommand("generate", "Generate random instances");
  cmd_gen->add_option("--nights", gen.params.nights)->required();
  cmd_gen->add_option("--observations", gen.params.observations)->required();
  cmd_gen->add_option("--len-night", gen.params.len_night)->required();
  cmd_gen->add_option("--max-gain", gen.params.max_gain)->required();
  cmd_gen->add_option("--count", gen.count)->check(CLI::NonNegativeNumber);
  cmd_gen->add_option("--seed", gen.params.seed, "Master seed");
  cmd_gen->add_option("--prob-model", gen.prob_model,
                      "uniform or binomial probability model");
  cmd_gen->add_option("--p-clear", gen.p_clear,
                      "Fix the binomial success probability");
  cmd_gen->add_option("--out", gen.out_dir, "Output directory")->required();

  // solve
  std::string solve_instance;
  SolverConfig solve_cfg;
  std::optional<std::uint64_t> solve_nodes;
  bool solve_oracle = false;
  std::optional<std::string> solve_out;
  auto* cmd_solve =
      app.add_subcommand("solve", "Solve one instance to optimality");
  cmd_solve->add_option("instance", solve_instance)->required();
  add_solver_flags(cmd_solve, &solve_cfg, &solve_nodes);
  cmd_solve->add_option("--out", solve_out, "Write the result here");
  cmd_solve->add_flag("--oracle", solve_oracle)->group("");  // hidden

  // compare
  std::string compare_instance;
  SolverConfig compare_cfg;
  std::optional<std::uint64_t> compare_nodes;
  std::optional<std::string> compare_out;
  std::optional<std::string> compare_curves;
  auto* cmd_compare = app.add_subcommand(
      "compare", "Run greedy, stochastic and omniscient on one instance");
  cmd_compare->add_option("instance", compare_instance)->required();
  add_solver_flags(cmd_compare, &compare_cfg, &compare_nodes);
  cmd_compare->add_option("--out", compare_out);
  cmd_compare->add_option("--curves-out", compare_curves,
                          "Prefix for per-algorithm step-curve CSV files");

  // reactive
  std::string reactive_instance;
  SolverConfig reactive_cfg;
  std::optional<std::uint64_t> reactive_nodes;
  double reactive_p = -1.0;
  std::optional<std::string> reactive_out;
  auto* cmd_reactive = app.add_subcommand(
      "reactive", "Simulate the reactive strategy over the scenario tree");
  cmd_reactive->add_option("instance", reactive_instance)->required();
  cmd_reactive->add_option("--p-clear", reactive_p,
                           "Probability that a night is observable")
      ->required();
  add_solver_flags(cmd_reactive, &reactive_cfg, &reactive_nodes);
  cmd_reactive->add_option("--out", reactive_out);

  // sweep
  std::string sweep_instance;
  SolverConfig sweep_cfg;
  std::optional<std::uint64_t> sweep_nodes;
  int sweep_grid = 21;
  std::optional<std::string> sweep_out;
  auto* cmd_sweep = app.add_subcommand(
      "sweep", "Upgrade of reactive over stochastic across p_clear");
  cmd_sweep->add_option("instance", sweep_instance)->required();
  cmd_sweep->add_option("--grid", sweep_grid, "Number of grid points");
  add_solver_flags(cmd_sweep, &sweep_cfg, &sweep_nodes);
  cmd_sweep->add_option("--out", sweep_out);

  // campaign
  CampaignArgs camp;
  SolverConfig camp_cfg;
  std::optional<std::uint64_t> camp_nodes;
  auto* cmd_campaign = app.add_subcommand(
      "campaign", "Run the algorithms over a batch of instances");
  cmd_campaign->add_option("--nights", camp.params.nights);
  cmd_campaign->add_option("--observations", camp.params.observations);
  cmd_campaign->add_option("--len-night", camp.params.len_night);
  cmd_campaign->add_option("--max-gain", camp.params.max_gain);
  cmd_campaign->add_option("--count", camp.count);
  cmd_campaign->add_option("--seed", camp.params.seed, "Master seed");
  cmd_campaign->add_option("--prob-model", camp.prob_model);
  cmd_campaign->add_option("--manifest", camp.manifest_path,
                           "Run over previously generated instances");
  cmd_campaign->add_option("--algorithms", camp.algorithms,
                           "Comma list: greedy,stochastic,omniscient,reactive");
  cmd_campaign->add_option("--out-dir", camp.out_dir)->required();
  add_solver_flags(cmd_campaign, &camp_cfg, &camp_nodes);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*cmd_gen) return run_generate(gen);
    if (*cmd_solve) {
      solve_cfg.node_limit = solve_nodes;
      return run_solve(solve_instance, solve_cfg, solve_oracle, solve_out);
    }
    if (*cmd_compare) {
      compare_cfg.node_limit = compare_nodes;
      return run_compare(compare_instance, compare_cfg, compare_out,
                         compare_curves);
    }
    if (*cmd_reactive) {
      reactive_cfg.node_limit = reactive_nodes;
      return run_reactive(reactive_instance, reactive_p, reactive_cfg,
                          reactive_out);
    }
    if (*cmd_sweep) {
      sweep_cfg.node_limit = sweep_nodes;
      return run_sweep(sweep_instance, sweep_grid, sweep_cfg, sweep_out);
    }
    if (*cmd_campaign) {
      camp_cfg.node_limit = camp_nodes;
      return run_campaign_cmd(camp, camp_cfg);
    }
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
