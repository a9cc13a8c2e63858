#ifndef VNEAP_HARNESS_H
#define VNEAP_HARNESS_H

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vneap/domain.h"
#include "vneap/io.h"
#include "vneap/lp.h"
#include "vneap/report.h"

namespace vneap {

// Undirected topology as read from GraphML.
struct RawTopology {
  struct Node {
    std::string id;
    std::map<std::string, std::string> attributes;  // by attr.name
  };
  struct Edge {
    std::string src;
    std::string dst;
  };
  std::string name;
  std::vector<Node> nodes;
  std::vector<Edge> edges;
};

// Throws InputError (with the line for XML errors).
RawTopology ingest_graphml(const std::string& path);
RawTopology parse_graphml(const std::string& text, const std::string& source);

struct TierAssignment {
  std::vector<Tier> node;  // per RawTopology node
  std::vector<Tier> link;  // per RawTopology edge
  int classes = 0;         // distinct degree classes used (1..3)
  std::vector<std::string> warnings;
};

// Natural breaks (exact Fisher-Jenks) on node degree. With only two classes
// the split is Edge/Core; with one class every node is Edge. A link takes the
// lowest tier of its endpoints.
TierAssignment classify_tiers(const RawTopology& topo);

// Optimal class boundaries of sorted values (weighted by multiplicity):
// returns the class index of every distinct value.
std::vector<int> jenks_classes(const std::vector<double>& distinct_values,
                               const std::vector<double>& counts, int classes);

struct TierParams {
  double cost_ratio = 3;        // node cost edge:transport:core = 9:3:1
  double capacity_ratio = 3;    // capacities 1:3:9, nodes and links
  double edge_node_cost = 0.09;
  double edge_link_cost = 0.02;
  double link_cost_ratio = 1.4142135623730951;  // edge link = 2x core link
  double base_node_capacity = 1;
  double base_link_capacity = 1;
};

SubstrateNetwork assign_costs_capacities(const RawTopology& topo,
                                         const TierAssignment& tiers,
                                         const TierParams& params);

enum class SpatialLaw { kUniform, kLogNormal };
enum class OriginCap { kNone, kSum, kMin };

struct RequestParams {
  size_t count = 1000;
  double size_mean = 10;
  double size_sd = 2;
  double size_floor = 0.1;
  SpatialLaw spatial = SpatialLaw::kUniform;
  double lognormal_mu = 0;
  double lognormal_sigma = 1;
  std::string app;              // empty: first application
  OriginCap origin_cap = OriginCap::kSum;
};

struct GeneratedRequests {
  std::vector<Request> requests;
  std::vector<std::string> warnings;
};

// Origins are Edge-tier nodes. Demands are N(mean, sd) resampled below the
// floor. With an origin cap, an origin stops receiving requests once its
// demand would exceed what its datacenter (kMin: and, kSum: plus) its
// outgoing links can carry under the main alternative's footprint.
GeneratedRequests generate_requests(const SubstrateNetwork& net,
                                    const AppCatalog& apps,
                                    const RequestParams& params, uint64_t seed);

// Node and arc capacities scaled (each set by one factor, so tier ratios are
// kept) to total main-alternative demand divided by the target utilization.
// Link demand counts one hop per virtual link.
SubstrateNetwork calibrate_target_utilization(const SubstrateNetwork& net,
                                              const AppCatalog& apps,
                                              const std::vector<Request>& requests,
                                              double node_tu, double link_tu);

struct Utilization {
  double node = 0;
  double link = 0;
};
Utilization target_utilization(const SubstrateNetwork& net, const AppCatalog& apps,
                               const std::vector<Request>& requests);

struct ScenarioConfig {
  std::string name = "scenario";
  std::string base_dir;  // for relative paths
  std::optional<std::string> topology;       // GraphML
  std::optional<std::string> substrate;      // substrate JSON
  std::string apps;
  std::optional<std::string> efficiency;
  std::optional<std::string> requests_file;  // fixed requests, no generation
  TierParams tiers;
  RequestParams requests;
  bool calibrate = true;
  size_t calibration_requests = 60000;
  double node_tu = 1;
  double link_tu = 1;
  std::vector<std::string> algorithms{"lp", "greedy", "tanto"};
  int repetitions = 30;
  uint64_t seed = 1;
  std::optional<double> psi;
  SolveOptions solver;

  std::string resolve(const std::string& path) const;
};

// Throws InputError on schema violations.
ScenarioConfig scenario_from_json(const Json& j, const std::string& base_dir);
ScenarioConfig load_scenario(const std::string& path);

struct ScenarioResult {
  std::vector<ReportRow> rows;  // repetition-major, algorithm order as given
  std::vector<SummaryRow> summary;
  std::vector<TimingRow> timings;
};

// Builds the (possibly calibrated) substrate a scenario runs on.
SubstrateNetwork scenario_substrate(const ScenarioConfig& config,
                                    const AppCatalog& apps);

ScenarioResult run_scenario(const ScenarioConfig& config, int jobs = 1);

// Runs one algorithm on one instance. `algo` is lp, milp, greedy, tanto or
// vnep:T.
struct AlgorithmRun {
  ReportRow row;
  TimingRow timing;
  std::vector<IntegralEmbedding> embeddings;  // empty for fractional runs
  std::vector<std::pair<std::string, double>> fractional;  // nonzero LP values
  std::optional<Solution> solution;
};
AlgorithmRun run_algorithm(const Instance& instance,
                           const std::vector<ResolvedRequest>& requests,
                           const std::string& algo, double psi,
                           const SolveOptions& solver, uint64_t seed, int jobs);

}  // namespace vneap

#endif  // VNEAP_HARNESS_H
