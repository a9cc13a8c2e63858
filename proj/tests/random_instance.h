#ifndef VNEAP_TESTS_RANDOM_INSTANCE_H
#define VNEAP_TESTS_RANDOM_INSTANCE_H

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "vneap/domain.h"

namespace vneap::testing {

struct RandomSpec {
  int min_nodes = 2;
  int max_nodes = 10;
  int max_alternatives = 3;
  int max_vnodes = 4;  // including the root
  int apps = 1;
  int requests = 8;
  double forbid_probability = 0;
  double capacity_scale = 1;  // <1 makes capacities binding
};

struct RandomCase {
  SubstrateNetwork net;
  AppCatalog apps;
  EfficiencyMap efficiency;
  std::vector<Request> requests;
};

// Connected substrate with at least one Edge node, tree applications rooted
// at "theta" and requests originating at Edge nodes. Independent of the
// library's RNG so the generator cannot share a bug with it.
inline RandomCase MakeRandomCase(uint64_t seed, const RandomSpec& spec) {
  std::mt19937_64 gen(seed * 0x9E3779B97F4A7C15ULL + 17);
  auto uni = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen);
  };
  auto pick = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(gen);
  };
  RandomCase rc;
  const int n = pick(spec.min_nodes, spec.max_nodes);
  std::vector<SubstrateNode> nodes;
  for (int v = 0; v < n; ++v) {
    Tier tier = v == 0 ? Tier::kEdge : static_cast<Tier>(pick(0, 2));
    double mult = tier == Tier::kEdge ? 1 : tier == Tier::kTransport ? 3 : 9;
    nodes.push_back({"s" + std::to_string(v), uni(0.5, 1.5) * 9 / mult,
                     spec.capacity_scale * uni(50, 400) * mult, tier});
  }
  std::set<std::pair<int, int>> edges;
  for (int v = 1; v < n; ++v) edges.insert({pick(0, v - 1), v});
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (uni(0, 1) < 0.25) edges.insert({u, v});
    }
  }
  std::vector<SubstrateArc> links;
  for (auto [u, v] : edges) {
    links.push_back({nodes[u].id, nodes[v].id, uni(0.2, 2),
                     spec.capacity_scale * uni(50, 600), Tier::kEdge});
  }
  rc.net = SubstrateNetwork::FromUndirected(nodes, links);

  std::vector<Application> apps;
  for (int a = 0; a < spec.apps; ++a) {
    Application app;
    app.id = "app" + std::to_string(a);
    const int alts = pick(1, spec.max_alternatives);
    for (int t = 1; t <= alts; ++t) {
      AlternativeTopology alt;
      alt.app = app.id;
      alt.index = t;
      alt.root = "theta";
      alt.nodes.push_back({"theta", 0});
      const int k = pick(2, std::max(2, spec.max_vnodes));
      for (int i = 1; i < k; ++i) {
        alt.nodes.push_back({"f" + std::to_string(i), uni(0.5, 6)});
        const int parent = pick(0, i - 1);
        alt.links.push_back({alt.nodes[parent].id, alt.nodes[i].id, uni(0.5, 6)});
      }
      app.alternatives.push_back(alt);
    }
    apps.push_back(app);
  }
  rc.apps = AppCatalog(apps);

  if (spec.forbid_probability > 0) {
    for (const Application& app : apps) {
      for (const AlternativeTopology& alt : app.alternatives) {
        for (const VirtualNode& vn : alt.nodes) {
          if (vn.id == alt.root) continue;
          for (const SubstrateNode& sn : nodes) {
            double roll = uni(0, 1);
            if (roll < spec.forbid_probability) {
              rc.efficiency.set_node(app.id, alt.index, vn.id, sn.id, std::nullopt);
            } else if (roll < 2 * spec.forbid_probability) {
              rc.efficiency.set_node(app.id, alt.index, vn.id, sn.id, uni(0.5, 2));
            }
          }
        }
        for (const VirtualLink& vl : alt.links) {
          for (const SubstrateArc& arc : rc.net.arcs()) {
            double roll = uni(0, 1);
            if (roll < spec.forbid_probability / 2) {
              rc.efficiency.set_link(app.id, alt.index, vl.parent, vl.child,
                                     arc.src, arc.dst, std::nullopt);
            } else if (roll < spec.forbid_probability) {
              rc.efficiency.set_link(app.id, alt.index, vl.parent, vl.child,
                                     arc.src, arc.dst, uni(0.5, 2));
            }
          }
        }
      }
    }
  }

  std::vector<std::string> edge_ids;
  for (const SubstrateNode& sn : nodes) {
    if (sn.tier == Tier::kEdge) edge_ids.push_back(sn.id);
  }
  for (int r = 0; r < spec.requests; ++r) {
    rc.requests.push_back(
        {edge_ids[pick(0, static_cast<int>(edge_ids.size()) - 1)],
         apps[pick(0, spec.apps - 1)].id, uni(1, 10)});
  }
  return rc;
}

}  // namespace vneap::testing

#endif  // VNEAP_TESTS_RANDOM_INSTANCE_H
