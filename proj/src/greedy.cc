#include "vneap/greedy.h"

#include <algorithm>
#include <functional>
#include <limits>
#include <queue>

#include "vneap/rng.h"

namespace vneap {

ResidualState ResidualState::FromNetwork(const SubstrateNetwork& net) {
  ResidualState r;
  for (const SubstrateNode& n : net.nodes()) r.node.push_back(n.capacity);
  for (const SubstrateArc& a : net.arcs()) r.arc.push_back(a.capacity);
  return r;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Loads may exceed residual by this much relative slack (rounding noise).
constexpr double kFitSlack = 1e-9;

bool Fits(double load, double residual) {
  return load <= residual + kFitSlack * std::max(1.0, residual);
}

struct LinkRoute {
  std::vector<double> best;    // cost of routing + child subtree from v
  std::vector<int> next_arc;   // -1: place the child at v
};

class TreeDp {
 public:
  TreeDp(const Instance& instance, int app, int alternative, double demand,
         const ResidualState& residual)
      : inst_(instance),
        alt_(instance.alternative(app, alternative)),
        lay_(instance.layout(app, alternative)),
        demand_(demand),
        residual_(residual) {}

  // Fills subtree costs for every virtual node and a route table per link.
  void Solve() {
    const SubstrateNetwork& net = inst_.net();
    const size_t nv = net.node_count();
    subtree_.assign(alt_.nodes.size(), std::vector<double>(nv, kInf));
    for (size_t j = 0; j < alt_.nodes.size(); ++j) {
      for (size_t v = 0; v < nv; ++v) {
        double coef = lay_.node_coef[j][v];
        if (coef < 0) continue;
        double load = demand_ * alt_.nodes[j].size * coef;
        if (!Fits(load, residual_.node[v])) continue;
        subtree_[j][v] = load * net.nodes()[v].cost;
      }
    }
    routes_.assign(alt_.links.size(), {});
    for (auto it = lay_.preorder.rbegin(); it != lay_.preorder.rend(); ++it) {
      const int l = *it;
      routes_[l] = Route(l);
      const int parent = lay_.link_parent[l];
      for (size_t v = 0; v < nv; ++v) subtree_[parent][v] += routes_[l].best[v];
    }
  }

  double Cost(int vnode, int v) const { return subtree_[vnode][v]; }

  // Places the subtree below `vnode` (already placed at node_map[vnode]).
  void Reconstruct(int vnode, std::vector<int>& node_map,
                   std::vector<std::vector<int>>& link_map) const {
    for (int l : lay_.child_links[vnode]) {
      int v = node_map[vnode];
      std::vector<int> path;
      while (routes_[l].next_arc[v] >= 0) {
        path.push_back(routes_[l].next_arc[v]);
        v = inst_.net().arc_dst(routes_[l].next_arc[v]);
      }
      link_map[l] = std::move(path);
      node_map[lay_.link_child[l]] = v;
      Reconstruct(lay_.link_child[l], node_map, link_map);
    }
  }

  const LinkRoute& route(int l) const { return routes_[l]; }

 private:
  // Multi-source Dijkstra on reversed arcs seeded with the child's subtree
  // costs.
  LinkRoute Route(int l) const {
    const SubstrateNetwork& net = inst_.net();
    const int child = lay_.link_child[l];
    const size_t nv = net.node_count();
    LinkRoute r{subtree_[child], std::vector<int>(nv, -1)};
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    for (size_t v = 0; v < nv; ++v) {
      if (r.best[v] < kInf) heap.push({r.best[v], static_cast<int>(v)});
    }
    std::vector<char> done(nv, 0);
    while (!heap.empty()) {
      auto [d, w] = heap.top();
      heap.pop();
      if (done[w] || d > r.best[w]) continue;
      done[w] = 1;
      for (int a : net.in_arcs(w)) {
        double coef = lay_.link_coef[l][a];
        if (coef < 0) continue;
        double load = demand_ * alt_.links[l].size * coef;
        if (!Fits(load, residual_.arc[a])) continue;
        int u = net.arc_src(a);
        double cand = d + load * net.arcs()[a].cost;
        if (cand < r.best[u]) {
          r.best[u] = cand;
          r.next_arc[u] = a;
          heap.push({cand, u});
        }
      }
    }
    return r;
  }

  const Instance& inst_;
  const AlternativeTopology& alt_;
  const AlternativeLayout& lay_;
  double demand_;
  const ResidualState& residual_;
  std::vector<std::vector<double>> subtree_;
  std::vector<LinkRoute> routes_;
};

struct Loads {
  std::vector<double> node;
  std::vector<double> arc;
};

Loads CandidateLoads(const Instance& inst, const AlternativeTopology& alt,
                     const AlternativeLayout& lay, double demand,
                     const std::vector<int>& node_map,
                     const std::vector<std::vector<int>>& link_map) {
  Loads loads{std::vector<double>(inst.net().node_count(), 0),
              std::vector<double>(inst.net().arc_count(), 0)};
  for (size_t j = 0; j < alt.nodes.size(); ++j) {
    if (node_map[j] < 0) continue;
    loads.node[node_map[j]] +=
        demand * alt.nodes[j].size * lay.node_coef[j][node_map[j]];
  }
  for (size_t l = 0; l < alt.links.size(); ++l) {
    for (int a : link_map[l]) {
      loads.arc[a] += demand * alt.links[l].size * lay.link_coef[l][a];
    }
  }
  return loads;
}

bool LoadsFit(const Loads& loads, const ResidualState& residual) {
  for (size_t v = 0; v < loads.node.size(); ++v) {
    if (!Fits(loads.node[v], residual.node[v])) return false;
  }
  for (size_t a = 0; a < loads.arc.size(); ++a) {
    if (!Fits(loads.arc[a], residual.arc[a])) return false;
  }
  return true;
}

double CandidateCost(const Instance& inst, const Loads& loads) {
  double cost = 0;
  for (size_t v = 0; v < loads.node.size(); ++v) {
    cost += loads.node[v] * inst.net().nodes()[v].cost;
  }
  for (size_t a = 0; a < loads.arc.size(); ++a) {
    cost += loads.arc[a] * inst.net().arcs()[a].cost;
  }
  return cost;
}

}  // namespace

std::optional<MinvCandidate> minv_embed(const Instance& instance, int app,
                                        int alternative, int origin,
                                        double demand,
                                        const ResidualState& residual) {
  const AlternativeTopology& alt = instance.alternative(app, alternative);
  const AlternativeLayout& lay = instance.layout(app, alternative);
  MinvCandidate c;
  c.node_map.assign(alt.nodes.size(), -1);
  c.link_map.assign(alt.links.size(), {});

  TreeDp dp(instance, app, alternative, demand, residual);
  dp.Solve();
  if (!(dp.Cost(lay.root, origin) < kInf)) return std::nullopt;
  c.node_map[lay.root] = origin;
  dp.Reconstruct(lay.root, c.node_map, c.link_map);
  Loads loads = CandidateLoads(instance, alt, lay, demand, c.node_map, c.link_map);
  if (LoadsFit(loads, residual)) {
    c.cost = CandidateCost(instance, loads);
    return c;
  }

  // Elements of this request compete for the same residual. Commit links one
  // at a time in preorder, re-solving the rest against what is left.
  ResidualState work = residual;
  std::fill(c.node_map.begin(), c.node_map.end(), -1);
  for (auto& path : c.link_map) path.clear();
  c.node_map[lay.root] = origin;
  work.node[origin] -= demand * alt.nodes[lay.root].size *
                       std::max(0.0, lay.node_coef[lay.root][origin]);
  for (int l : lay.preorder) {
    TreeDp step(instance, app, alternative, demand, work);
    step.Solve();
    const int parent = lay.link_parent[l];
    const int child = lay.link_child[l];
    int v = c.node_map[parent];
    if (!(step.route(l).best[v] < kInf)) return std::nullopt;
    std::vector<int> path;
    while (step.route(l).next_arc[v] >= 0) {
      int a = step.route(l).next_arc[v];
      path.push_back(a);
      work.arc[a] -= demand * alt.links[l].size * lay.link_coef[l][a];
      v = instance.net().arc_dst(a);
    }
    c.link_map[l] = std::move(path);
    c.node_map[child] = v;
    work.node[v] -= demand * alt.nodes[child].size * lay.node_coef[child][v];
  }
  loads = CandidateLoads(instance, alt, lay, demand, c.node_map, c.link_map);
  if (!LoadsFit(loads, residual)) return std::nullopt;
  c.cost = CandidateCost(instance, loads);
  return c;
}

GreedyResult greedy_embed_all(const Instance& instance,
                              const std::vector<ResolvedRequest>& requests,
                              uint64_t order_seed) {
  GreedyResult out;
  out.order.resize(requests.size());
  for (size_t i = 0; i < requests.size(); ++i) out.order[i] = i;
  Rng rng = Rng::Derive(order_seed, "greedy-order");
  rng.shuffle(out.order);

  ResidualState residual = ResidualState::FromNetwork(instance.net());
  out.embeddings.resize(requests.size());
  out.chosen_cost.assign(requests.size(), 0);
  for (size_t k = 0; k < requests.size(); ++k) {
    out.embeddings[k] = IntegralEmbedding::Rejected(k);
  }
  for (size_t idx : out.order) {
    const ResolvedRequest& r = requests[idx];
    if (r.id != idx) throw InputError("request ids must equal their positions");
    const Application& app = instance.apps().app(r.app);
    std::optional<MinvCandidate> best;
    int best_pos = -1;
    for (size_t p = 0; p < app.alternatives.size(); ++p) {
      auto cand = minv_embed(instance, r.app, static_cast<int>(p), r.origin,
                             r.demand, residual);
      if (cand && (!best || cand->cost < best->cost)) {
        best = std::move(cand);
        best_pos = static_cast<int>(p);
      }
    }
    if (!best) continue;
    const AlternativeTopology& alt = instance.alternative(r.app, best_pos);
    const AlternativeLayout& lay = instance.layout(r.app, best_pos);
    Loads loads = CandidateLoads(instance, alt, lay, r.demand, best->node_map,
                                 best->link_map);
    for (size_t v = 0; v < loads.node.size(); ++v) {
      residual.node[v] = std::max(0.0, residual.node[v] - loads.node[v]);
    }
    for (size_t a = 0; a < loads.arc.size(); ++a) {
      residual.arc[a] = std::max(0.0, residual.arc[a] - loads.arc[a]);
    }
    IntegralEmbedding& e = out.embeddings[idx];
    e.alternative = best_pos;
    e.node_map = std::move(best->node_map);
    e.link_map = std::move(best->link_map);
    out.chosen_cost[idx] = best->cost;
  }
  return out;
}

}  // namespace vneap
