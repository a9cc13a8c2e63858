#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "vneap/harness.h"
#include "vneap/io.h"
#include "vneap/lp.h"
#include "vneap/report.h"
#include "vneap/rng.h"

namespace {

using namespace vneap;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitLimit = 4;

void SetupLogging() {
  auto logger = spdlog::stderr_color_mt("vneap");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* level = std::getenv("VNEAP_LOG")) {
    spdlog::set_level(spdlog::level::from_str(level));
  }
}

int ExitFor(const std::string& status) {
  if (status == "ok") return kExitOk;
  if (status == "infeasible") return kExitInfeasible;
  if (status.rfind("limit", 0) == 0) return kExitLimit;
  return kExitInput;
}

struct IngestArgs {
  std::string graphml;
  std::string out;
  TierParams tiers;
};

int RunIngest(const IngestArgs& a) {
  RawTopology topo = ingest_graphml(a.graphml);
  TierAssignment tiers = classify_tiers(topo);
  for (const std::string& w : tiers.warnings) spdlog::warn("{}", w);
  SubstrateNetwork net = assign_costs_capacities(topo, tiers, a.tiers);
  Json j = substrate_to_json(net);
  j["name"] = topo.name;
  write_text_file(a.out, j.dump(2) + "\n");
  return kExitOk;
}

struct GenerateArgs {
  std::string substrate;
  std::string apps;
  std::string out;
  std::string spatial = "uniform";
  std::string origin_cap = "sum";
  RequestParams params;
  uint64_t seed = 1;
};

int RunGenerate(GenerateArgs a) {
  SubstrateNetwork net = substrate_from_json(read_json_file(a.substrate));
  AppCatalog apps = catalog_from_json(read_json_file(a.apps));
  a.params.spatial = a.spatial == "lognormal" ? SpatialLaw::kLogNormal
                                              : SpatialLaw::kUniform;
  a.params.origin_cap = a.origin_cap == "none"  ? OriginCap::kNone
                        : a.origin_cap == "min" ? OriginCap::kMin
                                                : OriginCap::kSum;
  GeneratedRequests gen = generate_requests(net, apps, a.params, a.seed);
  for (const std::string& w : gen.warnings) spdlog::warn("{}", w);
  write_text_file(a.out, requests_to_json(gen.requests).dump(1) + "\n");
  return kExitOk;
}

struct CalibrateArgs {
  std::string substrate;
  std::string apps;
  std::string requests;
  std::string out;
  double node_tu = 1;
  double link_tu = 1;
};

int RunCalibrate(const CalibrateArgs& a) {
  SubstrateNetwork net = substrate_from_json(read_json_file(a.substrate));
  AppCatalog apps = catalog_from_json(read_json_file(a.apps));
  std::vector<Request> reqs = requests_from_json(read_json_file(a.requests));
  SubstrateNetwork out =
      calibrate_target_utilization(net, apps, reqs, a.node_tu, a.link_tu);
  write_text_file(a.out, substrate_to_json(out).dump(2) + "\n");
  return kExitOk;
}

struct SolveArgs {
  std::string substrate;
  std::string apps;
  std::string requests;
  std::string efficiency;
  std::string algo = "tanto";
  std::string out;
  std::string lp_out;
  std::string timings;
  double psi = -1;
  uint64_t seed = 1;
  int jobs = 1;
  double time_limit = 0;
};

int RunSolve(const SolveArgs& a) {
  SubstrateNetwork net = substrate_from_json(read_json_file(a.substrate));
  AppCatalog apps = catalog_from_json(read_json_file(a.apps));
  EfficiencyMap eff;
  if (!a.efficiency.empty()) eff = efficiency_from_json(read_json_file(a.efficiency));
  std::vector<Request> reqs = requests_from_json(read_json_file(a.requests));
  Instance inst(std::move(net), std::move(apps), std::move(eff));
  std::vector<ResolvedRequest> resolved = inst.resolve(reqs);
  const double psi = a.psi >= 0 ? a.psi : compute_rejection_penalty(inst);

  SolveOptions solver;
  solver.time_limit_seconds = a.time_limit;
  if (!a.lp_out.empty()) {
    Model model = a.algo == "milp"
                      ? build_milp(inst, resolved, psi)
                      : build_relaxed_aggregate_lp(inst, aggregate_requests(resolved), psi);
    write_text_file(a.lp_out, export_lp_text(model.lp));
  }
  AlgorithmRun run = run_algorithm(inst, resolved, a.algo, psi, solver,
                                   Rng::Derive(a.seed, a.algo).next(), a.jobs);
  run.row.scenario = "solve";
  run.row.seed = a.seed;

  Json report;
  report["schema_version"] = kSchemaVersion;
  report["algorithm"] = a.algo;
  report["status"] = run.row.status;
  report["seed"] = a.seed;
  report["psi"] = psi;
  Json metrics = Json::object();
  for (const auto& [name, value] : run.row.metrics) metrics[name] = value;
  report["metrics"] = metrics;
  if (run.solution) {
    report["solver"] = {{"status", SolveStatusName(run.solution->status)},
                        {"objective", run.solution->objective},
                        {"iterations", run.solution->stats.iterations},
                        {"branch_and_bound_nodes", run.solution->stats.nodes}};
  }
  if (!run.fractional.empty()) {
    Json values = Json::object();
    for (const auto& [name, value] : run.fractional) values[name] = value;
    report["fractional"] = values;
  }
  if (!run.embeddings.empty()) {
    report["embeddings"] = embeddings_to_json(inst, resolved, run.embeddings);
  }
  write_text_file(a.out, report.dump(2) + "\n");
  if (!a.timings.empty()) {
    run.timing.scenario = "solve";
    write_text_file(a.timings, timings_to_csv({run.timing}));
  }
  return ExitFor(run.row.status);
}

struct CompareArgs {
  std::string scenario;
  std::string out;
  int jobs = 1;
  int repetitions = 0;
  uint64_t seed = 0;
  bool seed_set = false;
};

int RunCompare(const CompareArgs& a) {
  ScenarioConfig config = load_scenario(a.scenario);
  if (a.repetitions > 0) config.repetitions = a.repetitions;
  if (a.seed_set) config.seed = a.seed;
  ScenarioResult result = run_scenario(config, a.jobs);
  std::filesystem::create_directories(a.out);
  const std::filesystem::path dir(a.out);
  write_text_file((dir / "rows.csv").string(), rows_to_csv(result.rows));
  write_text_file((dir / "rows.json").string(),
                  rows_to_json(result.rows).dump(1) + "\n");
  write_text_file((dir / "summary.csv").string(), summary_to_csv(result.summary));
  write_text_file((dir / "timings.csv").string(), timings_to_csv(result.timings));
  int worst = kExitInput;
  for (const ReportRow& row : result.rows) {
    if (row.status == "ok") return kExitOk;
    int code = ExitFor(row.status);
    if (code != kExitInput) worst = code;
  }
  return worst;
}

struct ReportArgs {
  std::string rows;
  std::string out;
};

int RunReport(const ReportArgs& a) {
  std::vector<ReportRow> rows = rows_from_json(read_json_file(a.rows));
  write_text_file(a.out, summary_to_csv(summarize(rows)));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  SetupLogging();
  CLI::App app{"Virtual network embedding with topology alternatives"};
  app.require_subcommand(1, 1);
  int jobs = 1;
  app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "GraphML to substrate JSON");
  ingest_cmd->add_option("--graphml", ingest.graphml)->required()->check(CLI::ExistingFile);
  ingest_cmd->add_option("--out", ingest.out)->required();
  ingest_cmd->add_option("--tier-ratios", ingest.tiers.cost_ratio,
                         "Cost ratio between successive tiers")
      ->check(CLI::PositiveNumber);
  ingest_cmd->add_option("--capacity-ratio", ingest.tiers.capacity_ratio)
      ->check(CLI::PositiveNumber);
  ingest_cmd->add_option("--edge-node-cost", ingest.tiers.edge_node_cost);
  ingest_cmd->add_option("--edge-link-cost", ingest.tiers.edge_link_cost);
  ingest_cmd->add_option("--link-cost-ratio", ingest.tiers.link_cost_ratio)
      ->check(CLI::PositiveNumber);

  GenerateArgs gen;
  auto* gen_cmd = app.add_subcommand("generate", "Draw requests");
  gen_cmd->add_option("--substrate", gen.substrate)->required()->check(CLI::ExistingFile);
  gen_cmd->add_option("--apps", gen.apps)->required()->check(CLI::ExistingFile);
  gen_cmd->add_option("--out", gen.out)->required();
  gen_cmd->add_option("--count", gen.params.count)->required();
  gen_cmd->add_option("--app", gen.params.app);
  gen_cmd->add_option("--size-mean", gen.params.size_mean);
  gen_cmd->add_option("--size-sd", gen.params.size_sd)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--spatial", gen.spatial)
      ->check(CLI::IsMember({"uniform", "lognormal"}));
  gen_cmd->add_option("--lognormal-sigma", gen.params.lognormal_sigma);
  gen_cmd->add_option("--origin-cap", gen.origin_cap)
      ->check(CLI::IsMember({"none", "sum", "min"}));
  gen_cmd->add_option("--seed", gen.seed);

  CalibrateArgs cal;
  auto* cal_cmd = app.add_subcommand("calibrate", "Scale capacities to a target utilization");
  cal_cmd->add_option("--substrate", cal.substrate)->required()->check(CLI::ExistingFile);
  cal_cmd->add_option("--apps", cal.apps)->required()->check(CLI::ExistingFile);
  cal_cmd->add_option("--requests", cal.requests)->required()->check(CLI::ExistingFile);
  cal_cmd->add_option("--out", cal.out)->required();
  cal_cmd->add_option("--node-tu", cal.node_tu)->check(CLI::PositiveNumber);
  cal_cmd->add_option("--link-tu", cal.link_tu)->check(CLI::PositiveNumber);

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Embed requests with one algorithm");
  solve_cmd->add_option("--substrate", solve.substrate)->required()->check(CLI::ExistingFile);
  solve_cmd->add_option("--apps", solve.apps)->required()->check(CLI::ExistingFile);
  solve_cmd->add_option("--requests", solve.requests)->required()->check(CLI::ExistingFile);
  solve_cmd->add_option("--efficiency", solve.efficiency)->check(CLI::ExistingFile);
  solve_cmd->add_option("--algo", solve.algo, "lp, milp, greedy, tanto or vnep:T")
      ->required();
  solve_cmd->add_option("--seed", solve.seed);
  solve_cmd->add_option("--psi", solve.psi, "Rejection penalty (default: derived)");
  solve_cmd->add_option("--time-limit", solve.time_limit);
  solve_cmd->add_option("--out", solve.out)->required();
  solve_cmd->add_option("--lp-out", solve.lp_out, "Also write the model as LP text");
  solve_cmd->add_option("--timings", solve.timings, "Write wall-clock timings here");

  CompareArgs cmp;
  auto* cmp_cmd = app.add_subcommand("compare", "Run a scenario");
  cmp_cmd->add_option("--scenario", cmp.scenario)->required()->check(CLI::ExistingFile);
  cmp_cmd->add_option("--out", cmp.out)->required();
  cmp_cmd->add_option("--repetitions", cmp.repetitions)->check(CLI::PositiveNumber);
  auto* seed_opt = cmp_cmd->add_option("--seed", cmp.seed);

  ReportArgs rep;
  auto* rep_cmd = app.add_subcommand("report", "Summarize rows.json");
  rep_cmd->add_option("--rows", rep.rows)->required()->check(CLI::ExistingFile);
  rep_cmd->add_option("--out", rep.out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }
  try {
    if (*ingest_cmd) return RunIngest(ingest);
    if (*gen_cmd) return RunGenerate(gen);
    if (*cal_cmd) return RunCalibrate(cal);
    if (*solve_cmd) {
      solve.jobs = jobs;
      return RunSolve(solve);
    }
    if (*cmp_cmd) {
      cmp.jobs = jobs;
      cmp.seed_set = seed_opt->count() > 0;
      return RunCompare(cmp);
    }
    if (*rep_cmd) return RunReport(rep);
  } catch (const ResourceLimitError& e) {
    spdlog::error("{}", e.what());
    return kExitLimit;
  } catch (const InputError& e) {
    spdlog::error("{}", e.what());
    return kExitInput;
  } catch (const ParseError& e) {
    spdlog::error("{}", e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitInput;
  }
  return kExitInput;
}
