#include "vneap/harness.h"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <mutex>
#include <thread>

#include <spdlog/spdlog.h>

#include "vneap/formulation.h"
#include "vneap/greedy.h"
#include "vneap/rng.h"
#include "vneap/tanto.h"
#include "vneap/validator.h"

namespace vneap {

namespace {

struct Footprint {
  double node = 0;       // sum of virtual node sizes
  double link = 0;       // sum of virtual link sizes, one hop each
  double root_link = 0;  // links leaving the root
};

Footprint MainFootprint(const Application& app) {
  Footprint f;
  const AlternativeTopology& alt = app.alternatives.at(0);
  for (const VirtualNode& n : alt.nodes) f.node += n.size;
  for (const VirtualLink& l : alt.links) {
    f.link += l.size;
    if (l.parent == alt.root) f.root_link += l.size;
  }
  return f;
}

const Application& AppFor(const AppCatalog& apps, const std::string& id) {
  if (apps.size() == 0) throw InputError("catalog has no applications");
  if (id.empty()) return apps.app(0);
  auto index = apps.app_index(id);
  if (!index) throw InputError("unknown application '" + id + "'");
  return apps.app(*index);
}

double DrawSize(const RequestParams& p, Rng& rng) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    double d = rng.normal(p.size_mean, p.size_sd);
    if (d >= p.size_floor) return d;
  }
  return p.size_floor;
}

std::string AlgorithmStatus(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal:
      return "ok";
    case SolveStatus::kInfeasible:
    case SolveStatus::kUnbounded:
      return "infeasible";
    default:
      return "limit";
  }
}

void SetShares(ReportRow& row, const std::map<int, double>& shares) {
  for (const auto& [t, share] : shares) {
    row.set("share_t" + std::to_string(t), share);
  }
}

void IntegralMetrics(const Instance& inst,
                     const std::vector<ResolvedRequest>& requests,
                     const std::vector<IntegralEmbedding>& embeddings,
                     double psi, ReportRow& row) {
  std::vector<Violation> violations =
      check_feasibility(inst, requests, embeddings);
  row.set("violations", static_cast<double>(violations.size()));
  if (!violations.empty()) {
    row.status = "error: infeasible embedding (" + violations[0].rule + ")";
    return;
  }
  CostBreakdown cost = total_cost(inst, requests, embeddings, psi);
  row.set("total_cost", cost.total);
  row.set("compute_cost", cost.compute);
  row.set("bandwidth_cost", cost.bandwidth);
  row.set("rejection_cost", cost.rejection);
  row.set("rejection_rate", rejection_rate(requests, embeddings));
  SetShares(row, alternative_shares(inst, requests, embeddings));
}

void FractionalMetrics(const Instance& inst,
                       const std::vector<AggregatedRequest>& aggregates,
                       const Model& model, const Solution& sol, double psi,
                       ReportRow& row) {
  FractionalSolution y = fractional_from_values(model, sol.values);
  CostBreakdown cost = fractional_cost(inst, aggregates, y, psi);
  row.set("objective", sol.objective);
  row.set("total_cost", cost.total);
  row.set("compute_cost", cost.compute);
  row.set("bandwidth_cost", cost.bandwidth);
  row.set("rejection_cost", cost.rejection);
  row.set("objective_delta", objective_consistency(sol.objective, cost));
  row.set("rejection_rate", fractional_rejection_rate(inst, aggregates, y));
  SetShares(row, fractional_alternative_shares(inst, aggregates, y));
}

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

GeneratedRequests generate_requests(const SubstrateNetwork& net,
                                    const AppCatalog& apps,
                                    const RequestParams& p, uint64_t seed) {
  GeneratedRequests out;
  const Application& app = AppFor(apps, p.app);
  if (!(p.size_sd > 0) || !(p.size_floor > 0)) {
    throw InputError("request sizes need a positive sd and floor");
  }
  std::vector<int> origins;
  for (size_t v = 0; v < net.node_count(); ++v) {
    if (net.nodes()[v].tier == Tier::kEdge) origins.push_back(static_cast<int>(v));
  }
  if (origins.empty()) {
    out.warnings.push_back("no edge-tier nodes; every node is an origin");
    for (size_t v = 0; v < net.node_count(); ++v) {
      origins.push_back(static_cast<int>(v));
    }
  }
  if (origins.empty()) throw InputError("substrate has no nodes");

  Rng hotspots = Rng::Derive(seed, "hotspots");
  Rng sizes = Rng::Derive(seed, "request-sizes");
  Rng picks = Rng::Derive(seed, "request-origins");
  std::vector<double> weights(origins.size(), 1.0);
  if (p.spatial == SpatialLaw::kLogNormal) {
    for (double& w : weights) w = hotspots.lognormal(p.lognormal_mu, p.lognormal_sigma);
  }

  const Footprint fp = MainFootprint(app);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> cap(origins.size(), inf), used(origins.size(), 0);
  if (p.origin_cap != OriginCap::kNone) {
    for (size_t k = 0; k < origins.size(); ++k) {
      const int v = origins[k];
      double out_cap = 0;
      for (int a : net.out_arcs(v)) out_cap += net.arcs()[a].capacity;
      double by_node = fp.node > 0 ? net.nodes()[v].capacity / fp.node : inf;
      double by_links = fp.root_link > 0 ? out_cap / fp.root_link : inf;
      cap[k] = p.origin_cap == OriginCap::kMin ? std::min(by_node, by_links)
               : (std::isinf(by_node) || std::isinf(by_links))
                   ? inf
                   : by_node + by_links;
    }
  }

  size_t open = origins.size();
  while (out.requests.size() < p.count) {
    double d = DrawSize(p, sizes);
    bool placed = false;
    while (open > 0) {
      size_t k = weighted_random_select(weights, picks);
      if (used[k] + d <= cap[k]) {
        used[k] += d;
        out.requests.push_back({net.nodes()[origins[k]].id, app.id, d});
        placed = true;
        break;
      }
      weights[k] = 0;  // origin saturated
      --open;
    }
    if (!placed) {
      out.warnings.push_back("origin caps reached after " +
                             std::to_string(out.requests.size()) + " of " +
                             std::to_string(p.count) + " requests");
      break;
    }
  }
  return out;
}

Utilization target_utilization(const SubstrateNetwork& net,
                               const AppCatalog& apps,
                               const std::vector<Request>& requests) {
  double node_demand = 0, link_demand = 0;
  for (const Request& r : requests) {
    Footprint fp = MainFootprint(AppFor(apps, r.app));
    node_demand += r.demand * fp.node;
    link_demand += r.demand * fp.link;
  }
  double node_cap = 0, arc_cap = 0;
  for (const SubstrateNode& n : net.nodes()) node_cap += n.capacity;
  for (const SubstrateArc& a : net.arcs()) arc_cap += a.capacity;
  Utilization u;
  u.node = node_cap > 0 ? node_demand / node_cap : 0;
  u.link = arc_cap > 0 ? link_demand / arc_cap : 0;
  return u;
}

SubstrateNetwork calibrate_target_utilization(const SubstrateNetwork& net,
                                              const AppCatalog& apps,
                                              const std::vector<Request>& requests,
                                              double node_tu, double link_tu) {
  if (!(node_tu > 0) || !(link_tu > 0)) {
    throw InputError("target utilization must be positive");
  }
  Utilization current = target_utilization(net, apps, requests);
  if (!(current.node > 0)) {
    throw InputError("calibration needs positive node capacity and demand");
  }
  double node_factor = current.node / node_tu;
  double arc_factor = current.link > 0 ? current.link / link_tu : 1.0;
  return net.WithScaledCapacities(node_factor, arc_factor);
}

std::string ScenarioConfig::resolve(const std::string& path) const {
  std::filesystem::path p(path);
  if (p.is_absolute() || base_dir.empty()) return path;
  return (std::filesystem::path(base_dir) / p).string();
}

ScenarioConfig scenario_from_json(const Json& j, const std::string& base_dir) {
  ScenarioConfig c;
  c.base_dir = base_dir;
  try {
    if (j.value("schema_version", kSchemaVersion) != kSchemaVersion) {
      throw InputError("scenario: unsupported schema_version");
    }
    c.name = j.value("name", c.name);
    if (j.contains("topology")) c.topology = j.at("topology").get<std::string>();
    if (j.contains("substrate")) c.substrate = j.at("substrate").get<std::string>();
    if (c.topology.has_value() == c.substrate.has_value()) {
      throw InputError("scenario: give exactly one of topology or substrate");
    }
    c.apps = j.at("apps").get<std::string>();
    if (j.contains("efficiency")) c.efficiency = j.at("efficiency").get<std::string>();
    if (j.contains("requests_file")) {
      c.requests_file = j.at("requests_file").get<std::string>();
    }
    if (j.contains("tiers")) {
      const Json& t = j.at("tiers");
      c.tiers.cost_ratio = t.value("cost_ratio", c.tiers.cost_ratio);
      c.tiers.capacity_ratio = t.value("capacity_ratio", c.tiers.capacity_ratio);
      c.tiers.edge_node_cost = t.value("edge_node_cost", c.tiers.edge_node_cost);
      c.tiers.edge_link_cost = t.value("edge_link_cost", c.tiers.edge_link_cost);
      c.tiers.link_cost_ratio = t.value("link_cost_ratio", c.tiers.link_cost_ratio);
    }
    if (j.contains("requests")) {
      const Json& r = j.at("requests");
      RequestParams& p = c.requests;
      p.count = r.value("count", p.count);
      p.size_mean = r.value("size_mean", p.size_mean);
      p.size_sd = r.value("size_sd", p.size_sd);
      p.size_floor = r.value("size_floor", p.size_floor);
      p.lognormal_mu = r.value("lognormal_mu", p.lognormal_mu);
      p.lognormal_sigma = r.value("lognormal_sigma", p.lognormal_sigma);
      p.app = r.value("app", p.app);
      std::string spatial = r.value("spatial", std::string("uniform"));
      if (spatial == "uniform") {
        p.spatial = SpatialLaw::kUniform;
      } else if (spatial == "lognormal") {
        p.spatial = SpatialLaw::kLogNormal;
      } else {
        throw InputError("scenario: unknown spatial law '" + spatial + "'");
      }
      std::string cap = r.value("origin_cap", std::string("sum"));
      if (cap == "none") {
        p.origin_cap = OriginCap::kNone;
      } else if (cap == "sum") {
        p.origin_cap = OriginCap::kSum;
      } else if (cap == "min") {
        p.origin_cap = OriginCap::kMin;
      } else {
        throw InputError("scenario: unknown origin_cap '" + cap + "'");
      }
    }
    if (j.contains("calibration")) {
      const Json& k = j.at("calibration");
      c.calibrate = k.value("enabled", true);
      c.calibration_requests = k.value("requests", c.calibration_requests);
      c.node_tu = k.value("node_tu", c.node_tu);
      c.link_tu = k.value("link_tu", c.link_tu);
    } else {
      c.calibrate = false;
    }
    if (j.contains("algorithms")) {
      c.algorithms = j.at("algorithms").get<std::vector<std::string>>();
    }
    c.repetitions = j.value("repetitions", c.repetitions);
    c.seed = j.value("seed", c.seed);
    if (j.contains("psi")) c.psi = j.at("psi").get<double>();
    if (j.contains("solver")) {
      const Json& s = j.at("solver");
      c.solver.iteration_limit = s.value("iteration_limit", c.solver.iteration_limit);
      c.solver.time_limit_seconds =
          s.value("time_limit_seconds", c.solver.time_limit_seconds);
      c.solver.max_binaries = s.value("max_binaries", c.solver.max_binaries);
    }
  } catch (const Json::exception& e) {
    throw InputError(std::string("scenario: ") + e.what());
  }
  if (c.repetitions < 1) throw InputError("scenario: repetitions must be >= 1");
  if (!(c.node_tu > 0) || !(c.link_tu > 0)) {
    throw InputError("scenario: target utilization must be positive");
  }
  if (!(c.requests.size_sd > 0)) throw InputError("scenario: size_sd must be positive");
  for (const std::string& a : c.algorithms) {
    bool known = a == "lp" || a == "milp" || a == "greedy" || a == "tanto" ||
                 (a.rfind("vnep:", 0) == 0 && a.size() > 5);
    if (!known) throw InputError("scenario: unknown algorithm '" + a + "'");
  }
  return c;
}

ScenarioConfig load_scenario(const std::string& path) {
  return scenario_from_json(
      read_json_file(path),
      std::filesystem::path(path).parent_path().string());
}

SubstrateNetwork scenario_substrate(const ScenarioConfig& config,
                                    const AppCatalog& apps) {
  SubstrateNetwork net;
  if (config.topology) {
    RawTopology topo = ingest_graphml(config.resolve(*config.topology));
    TierAssignment tiers = classify_tiers(topo);
    for (const std::string& w : tiers.warnings) {
      spdlog::warn("{}: {}", *config.topology, w);
    }
    net = assign_costs_capacities(topo, tiers, config.tiers);
  } else {
    net = substrate_from_json(read_json_file(config.resolve(*config.substrate)));
  }
  if (config.calibrate) {
    RequestParams p = config.requests;
    p.count = config.calibration_requests;
    p.origin_cap = OriginCap::kNone;
    GeneratedRequests calib =
        generate_requests(net, apps, p, Rng::Derive(config.seed, "calibration").next());
    net = calibrate_target_utilization(net, apps, calib.requests, config.node_tu,
                                       config.link_tu);
  }
  return net;
}

AlgorithmRun run_algorithm(const Instance& inst,
                           const std::vector<ResolvedRequest>& requests,
                           const std::string& algo, double psi,
                           const SolveOptions& solver, uint64_t seed, int jobs) {
  AlgorithmRun run;
  run.row.algorithm = algo;
  run.timing.algorithm = algo;
  auto start = std::chrono::steady_clock::now();
  if (algo == "lp" || algo.rfind("vnep:", 0) == 0) {
    std::optional<Instance> restricted;
    const Instance* target = &inst;
    if (algo != "lp") {
      int t = 0;
      try {
        t = std::stoi(algo.substr(5));
      } catch (const std::exception&) {
        throw InputError("bad alternative in '" + algo + "'");
      }
      restricted.emplace(inst.net(), restrict_to_alternative(inst.apps(), t),
                         restrict_efficiency(inst.efficiency(), t));
      target = &*restricted;
    }
    std::vector<AggregatedRequest> aggs = aggregate_requests(requests);
    Model model = build_relaxed_aggregate_lp(*target, aggs, psi);
    Solution sol = solve_lp(model.lp, solver);
    run.timing.lp_iterations = sol.stats.iterations;
    run.row.status = AlgorithmStatus(sol.status);
    if (sol.status == SolveStatus::kOptimal) {
      FractionalMetrics(*target, aggs, model, sol, psi, run.row);
      for (size_t j = 0; j < sol.values.size(); ++j) {
        if (sol.values[j] != 0) {
          run.fractional.emplace_back(model.lp.variables[j].name, sol.values[j]);
        }
      }
    }
    run.solution = std::move(sol);
  } else if (algo == "milp") {
    Model model = build_milp(inst, requests, psi);
    try {
      Solution sol = solve_milp_exact(model.lp, solver);
      run.timing.lp_iterations = sol.stats.iterations;
      run.row.status = AlgorithmStatus(sol.status);
      if (sol.status == SolveStatus::kOptimal) {
        run.row.set("objective", sol.objective);
        run.embeddings = extract_embeddings(inst, model, sol.values);
        IntegralMetrics(inst, requests, run.embeddings, psi, run.row);
      }
      run.solution = std::move(sol);
    } catch (const ResourceLimitError& e) {
      run.row.status = std::string("limit: ") + e.what();
    }
  } else if (algo == "greedy") {
    GreedyResult g = greedy_embed_all(inst, requests, seed);
    run.embeddings = std::move(g.embeddings);
    IntegralMetrics(inst, requests, run.embeddings, psi, run.row);
  } else if (algo == "tanto") {
    TantoOptions opts;
    opts.lp = solver;
    opts.seed = seed;
    opts.jobs = jobs;
    TantoResult t = tanto(inst, requests, psi, opts);
    run.timing.lp_iterations = t.lp.stats.iterations;
    if (t.lp.status != SolveStatus::kOptimal) {
      run.row.status = AlgorithmStatus(t.lp.status);
    } else {
      run.row.set("lp_objective", t.lp.objective);
      run.embeddings = std::move(t.embeddings);
      IntegralMetrics(inst, requests, run.embeddings, psi, run.row);
      run.row.set("zero_events", static_cast<double>(t.counters.zero_events));
      run.row.set("exhausted", static_cast<double>(t.counters.exhausted));
      run.row.set("initial_nonzero_y",
                  static_cast<double>(t.bounds.initial_nonzero_y));
      run.row.set("lemma1_ok", t.bounds.lemma1_ok ? 1 : 0);
      run.row.set("psi_gap", t.bounds.psi_gap);
      run.row.set("theorem1_bound", t.bounds.theorem1_bound);
      run.row.set("theorem1_ok", t.bounds.theorem1_ok ? 1 : 0);
      run.row.set("steps_max", static_cast<double>(t.counters.steps_max));
      run.row.set("step_bound", static_cast<double>(t.bounds.step_bound));
      run.row.set("lemma3_ok", t.bounds.lemma3_ok ? 1 : 0);
    }
    run.solution = std::move(t.lp);
  } else {
    throw InputError("unknown algorithm '" + algo + "'");
  }
  run.timing.seconds = Seconds(start);
  return run;
}

ScenarioResult run_scenario(const ScenarioConfig& config, int jobs) {
  AppCatalog apps = catalog_from_json(read_json_file(config.resolve(config.apps)));
  EfficiencyMap eff;
  if (config.efficiency) {
    eff = efficiency_from_json(read_json_file(config.resolve(*config.efficiency)));
  }
  std::optional<std::vector<Request>> fixed;
  if (config.requests_file) {
    fixed = requests_from_json(read_json_file(config.resolve(*config.requests_file)));
  }
  const Instance inst(scenario_substrate(config, apps), apps, eff);
  const double psi = config.psi ? *config.psi : compute_rejection_penalty(inst);

  const int reps = config.repetitions;
  jobs = std::max(1, jobs);
  const int outer = std::min(jobs, reps);
  const int inner = outer > 1 ? 1 : jobs;
  std::vector<std::vector<ReportRow>> rows(reps);
  std::vector<std::vector<TimingRow>> timings(reps);

  auto run_rep = [&](int k) {
    const uint64_t seed = Rng::Derive(config.seed, "repetition", k).next();
    std::vector<Request> reqs;
    std::vector<ResolvedRequest> resolved;
    try {
      if (fixed) {
        reqs = *fixed;
      } else {
        GeneratedRequests gen = generate_requests(inst.net(), apps, config.requests, seed);
        for (const std::string& w : gen.warnings) {
          spdlog::warn("{} repetition {}: {}", config.name, k, w);
        }
        reqs = std::move(gen.requests);
      }
      resolved = inst.resolve(reqs);
    } catch (const std::exception& e) {
      for (const std::string& algo : config.algorithms) {
        rows[k].push_back({config.name, k, seed, algo,
                           std::string("error: ") + e.what(), {}});
        timings[k].push_back({config.name, k, algo, 0, 0});
      }
      return;
    }
    double demand = 0;
    for (const ResolvedRequest& r : resolved) demand += r.demand;
    for (const std::string& algo : config.algorithms) {
      const uint64_t algo_seed = Rng::Derive(seed, algo).next();
      AlgorithmRun run;
      try {
        run = run_algorithm(inst, resolved, algo, psi, config.solver, algo_seed, inner);
      } catch (const std::exception& e) {
        run.row.algorithm = algo;
        run.row.status = std::string("error: ") + e.what();
        run.timing.algorithm = algo;
      }
      run.row.scenario = config.name;
      run.row.repetition = k;
      run.row.seed = seed;
      run.row.set("requests", static_cast<double>(resolved.size()));
      run.row.set("demand", demand);
      run.row.set("psi", psi);
      run.timing.scenario = config.name;
      run.timing.repetition = k;
      rows[k].push_back(std::move(run.row));
      timings[k].push_back(run.timing);
    }
  };

  if (outer == 1) {
    for (int k = 0; k < reps; ++k) run_rep(k);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < outer; ++w) {
      pool.emplace_back([&] {
        for (int k = next++; k < reps; k = next++) run_rep(k);
      });
    }
    for (std::thread& t : pool) t.join();
  }

  ScenarioResult result;
  for (int k = 0; k < reps; ++k) {
    for (ReportRow& r : rows[k]) result.rows.push_back(std::move(r));
    for (TimingRow& t : timings[k]) result.timings.push_back(t);
  }
  result.summary = summarize(result.rows);
  return result;
}

}  // namespace vneap
