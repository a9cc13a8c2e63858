#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <unordered_map>

#include "vneap/harness.h"

namespace vneap {

std::vector<int> jenks_classes(const std::vector<double>& values,
                               const std::vector<double>& counts, int classes) {
  const int n = static_cast<int>(values.size());
  if (n == 0) return {};
  classes = std::clamp(classes, 1, n);
  // Prefix sums for weighted within-class squared deviation of [a, b).
  std::vector<double> w(n + 1, 0), s(n + 1, 0), q(n + 1, 0);
  for (int i = 0; i < n; ++i) {
    w[i + 1] = w[i] + counts[i];
    s[i + 1] = s[i] + counts[i] * values[i];
    q[i + 1] = q[i] + counts[i] * values[i] * values[i];
  }
  auto sse = [&](int a, int b) {
    double ww = w[b] - w[a];
    double ss = s[b] - s[a];
    return std::max(0.0, (q[b] - q[a]) - ss * ss / ww);
  };
  const double inf = std::numeric_limits<double>::infinity();
  // best[k][j]: k+1 classes over the first j values.
  std::vector<std::vector<double>> best(classes, std::vector<double>(n + 1, inf));
  std::vector<std::vector<int>> split(classes, std::vector<int>(n + 1, 0));
  for (int j = 1; j <= n; ++j) best[0][j] = sse(0, j);
  for (int k = 1; k < classes; ++k) {
    for (int j = k + 1; j <= n; ++j) {
      for (int m = k; m < j; ++m) {
        double c = best[k - 1][m] + sse(m, j);
        // Later breaks win ties so boundary values stay in the lower class.
        if (c <= best[k][j] + 1e-12 * std::max(1.0, std::fabs(c))) {
          best[k][j] = c;
          split[k][j] = m;
        }
      }
    }
  }
  std::vector<int> out(n, 0);
  int end = n;
  for (int k = classes - 1; k >= 0; --k) {
    int begin = k == 0 ? 0 : split[k][end];
    for (int i = begin; i < end; ++i) out[i] = k;
    end = begin;
  }
  return out;
}

TierAssignment classify_tiers(const RawTopology& topo) {
  TierAssignment out;
  std::unordered_map<std::string, size_t> index;
  for (size_t i = 0; i < topo.nodes.size(); ++i) index[topo.nodes[i].id] = i;
  std::vector<int> degree(topo.nodes.size(), 0);
  std::vector<std::vector<size_t>> adj(topo.nodes.size());
  for (const auto& e : topo.edges) {
    size_t a = index.at(e.src), b = index.at(e.dst);
    ++degree[a];
    ++degree[b];
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  if (!topo.nodes.empty()) {
    std::vector<bool> seen(topo.nodes.size(), false);
    std::queue<size_t> bfs;
    bfs.push(0);
    seen[0] = true;
    size_t reached = 1;
    while (!bfs.empty()) {
      size_t u = bfs.front();
      bfs.pop();
      for (size_t v : adj[u]) {
        if (!seen[v]) {
          seen[v] = true;
          ++reached;
          bfs.push(v);
        }
      }
    }
    if (reached != topo.nodes.size()) {
      out.warnings.push_back("topology is not connected");
    }
  }

  std::map<int, double> histogram;
  for (int d : degree) histogram[d] += 1;
  std::vector<double> values, counts;
  for (const auto& [d, c] : histogram) {
    values.push_back(d);
    counts.push_back(c);
  }
  out.classes = std::min<int>(3, static_cast<int>(values.size()));
  std::vector<int> cls = jenks_classes(values, counts, out.classes);
  std::map<int, Tier> tier_of_degree;
  for (size_t i = 0; i < values.size(); ++i) {
    Tier t = Tier::kEdge;
    if (out.classes == 3) t = static_cast<Tier>(cls[i]);
    if (out.classes == 2) t = cls[i] == 0 ? Tier::kEdge : Tier::kCore;
    tier_of_degree[static_cast<int>(values[i])] = t;
  }
  if (out.classes == 2) {
    out.warnings.push_back("only two degree classes: no transport tier");
  } else if (out.classes == 1) {
    out.warnings.push_back("uniform degree: every node is an edge node");
  }
  for (int d : degree) out.node.push_back(tier_of_degree[d]);
  for (const auto& e : topo.edges) {
    Tier a = out.node[index.at(e.src)], b = out.node[index.at(e.dst)];
    out.link.push_back(std::min(a, b));
  }
  return out;
}

SubstrateNetwork assign_costs_capacities(const RawTopology& topo,
                                         const TierAssignment& tiers,
                                         const TierParams& p) {
  if (tiers.node.size() != topo.nodes.size() ||
      tiers.link.size() != topo.edges.size()) {
    throw InputError("tier assignment does not match the topology");
  }
  std::vector<SubstrateNode> nodes;
  for (size_t i = 0; i < topo.nodes.size(); ++i) {
    int level = static_cast<int>(tiers.node[i]);
    nodes.push_back({topo.nodes[i].id,
                     p.edge_node_cost / std::pow(p.cost_ratio, level),
                     p.base_node_capacity * std::pow(p.capacity_ratio, level),
                     tiers.node[i]});
  }
  std::vector<SubstrateArc> links;
  for (size_t i = 0; i < topo.edges.size(); ++i) {
    int level = static_cast<int>(tiers.link[i]);
    links.push_back({topo.edges[i].src, topo.edges[i].dst,
                     p.edge_link_cost / std::pow(p.link_cost_ratio, level),
                     p.base_link_capacity * std::pow(p.capacity_ratio, level),
                     tiers.link[i]});
  }
  return SubstrateNetwork::FromUndirected(std::move(nodes), links);
}

}  // namespace vneap
