#include "vneap/formulation.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <stdexcept>

#include <spdlog/spdlog.h>

namespace vneap {

size_t LinearProgram::binary_count() const {
  return static_cast<size_t>(
      std::count_if(variables.begin(), variables.end(),
                    [](const Variable& v) { return v.binary; }));
}

LinearProgram LinearProgram::relaxed() const {
  LinearProgram out = *this;
  for (Variable& v : out.variables) v.binary = false;
  return out;
}

double LinearProgram::evaluate(const std::vector<double>& values) const {
  double total = objective_offset;
  for (size_t j = 0; j < objective.size(); ++j) total += objective[j] * values[j];
  return total;
}

std::vector<AggregatedRequest> aggregate_requests(
    const std::vector<ResolvedRequest>& requests) {
  std::map<std::pair<int, int>, AggregatedRequest> buckets;
  for (const ResolvedRequest& r : requests) {
    AggregatedRequest& agg = buckets[{r.origin, r.app}];
    agg.origin = r.origin;
    agg.app = r.app;
    agg.demand += r.demand;
    agg.members.push_back(r.id);
  }
  std::vector<AggregatedRequest> out;
  out.reserve(buckets.size());
  for (auto& [key, agg] : buckets) out.push_back(std::move(agg));
  return out;
}

namespace {

// Nodes reachable from `sources` using arcs with allowed[arc] set.
std::vector<char> Reach(const SubstrateNetwork& net,
                        const std::vector<char>& sources,
                        const std::vector<char>& allowed, bool forward) {
  std::vector<char> seen = sources;
  std::deque<int> queue;
  for (size_t v = 0; v < seen.size(); ++v) {
    if (seen[v]) queue.push_back(static_cast<int>(v));
  }
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    const auto& arcs = forward ? net.out_arcs(v) : net.in_arcs(v);
    for (int a : arcs) {
      if (!allowed[a]) continue;
      int w = forward ? net.arc_dst(a) : net.arc_src(a);
      if (!seen[w]) {
        seen[w] = 1;
        queue.push_back(w);
      }
    }
  }
  return seen;
}

std::string VarName(size_t group, int t, char kind, int element,
                    int substrate) {
  return "y_g" + std::to_string(group) + "_t" + std::to_string(t) + "_" +
         kind + std::to_string(element) + "_" + std::to_string(substrate);
}

}  // namespace

Model build_model(const Instance& instance,
                  const std::vector<AggregatedRequest>& groups, double psi,
                  bool binary) {
  if (!(psi >= 0) || !std::isfinite(psi)) {
    throw InputError("rejection penalty psi must be >= 0");
  }
  const SubstrateNetwork& net = instance.net();
  const size_t nv = net.node_count();
  const size_t na = net.arc_count();

  Model model;
  model.groups = groups;
  model.psi = psi;
  LinearProgram& lp = model.lp;

  // Capacity rows accumulate terms as variables are created.
  std::vector<Constraint> node_cap(nv), arc_cap(na);
  for (size_t v = 0; v < nv; ++v) {
    node_cap[v].name = "cap_v" + std::to_string(v);
    node_cap[v].rhs = net.nodes()[v].capacity;
  }
  for (size_t a = 0; a < na; ++a) {
    arc_cap[a].name = "cap_a" + std::to_string(a);
    arc_cap[a].rhs = net.arcs()[a].capacity;
  }

  auto add_var = [&](std::string name, const VariableKey& key,
                     double cost) -> int {
    Variable var;
    var.name = std::move(name);
    var.lower = 0;
    var.upper = 1;
    var.binary = binary;
    var.key = key;
    lp.variables.push_back(std::move(var));
    lp.objective.push_back(cost);
    return static_cast<int>(lp.variables.size() - 1);
  };

  std::vector<Constraint> rows;
  model.index.resize(groups.size());
  for (size_t g = 0; g < groups.size(); ++g) {
    const AggregatedRequest& grp = groups[g];
    if (grp.app < 0 || grp.app >= static_cast<int>(instance.apps().size()) ||
        grp.origin < 0 || grp.origin >= static_cast<int>(nv)) {
      throw InputError("demand group references unknown origin or app");
    }
    if (!(grp.demand > 0)) throw InputError("demand group with demand <= 0");
    const double D = grp.demand;
    lp.objective_offset += psi * D;
    const Application& app = instance.apps().app(grp.app);
    Constraint one_alt;
    one_alt.name = "alt_g" + std::to_string(g);
    one_alt.sense = Sense::kLessEqual;
    one_alt.rhs = 1;

    model.index[g].resize(app.alternatives.size());
    for (size_t p = 0; p < app.alternatives.size(); ++p) {
      const AlternativeTopology& alt = app.alternatives[p];
      const AlternativeLayout& lay = instance.layout(grp.app, static_cast<int>(p));
      const int t = alt.index;
      GroupAlternativeIndex& idx = model.index[g][p];
      idx.node_vars.assign(alt.nodes.size(), std::vector<int>(nv, -1));
      idx.link_vars.assign(alt.links.size(), std::vector<int>(na, -1));

      VariableKey root_key{g, static_cast<int>(p), VarKind::kNode, lay.root,
                           grp.origin};
      idx.root = add_var(VarName(g, t, 'n', lay.root, grp.origin), root_key,
                         -psi * D);
      idx.node_vars[lay.root][grp.origin] = idx.root;
      one_alt.terms.push_back({idx.root, 1.0});

      // Allowed placements, derived top-down along the preorder.
      std::vector<std::vector<char>> placeable(alt.nodes.size(),
                                               std::vector<char>(nv, 0));
      placeable[lay.root][grp.origin] = 1;
      for (int l : lay.preorder) {
        const int i = lay.link_parent[l];
        const int j = lay.link_child[l];
        std::vector<char> allowed(na, 0);
        for (size_t a = 0; a < na; ++a) allowed[a] = lay.link_coef[l][a] >= 0;
        std::vector<char> fwd = Reach(net, placeable[i], allowed, true);
        for (size_t v = 0; v < nv; ++v) {
          placeable[j][v] = fwd[v] && lay.node_coef[j][v] >= 0;
        }
        std::vector<char> back = Reach(net, placeable[j], allowed, false);

        for (size_t v = 0; v < nv; ++v) {
          if (!placeable[j][v]) continue;
          const double coef = lay.node_coef[j][v];
          const double load = D * alt.nodes[j].size * coef;
          VariableKey key{g, static_cast<int>(p), VarKind::kNode, j,
                          static_cast<int>(v)};
          int var = add_var(VarName(g, t, 'n', j, static_cast<int>(v)), key,
                            load * net.nodes()[v].cost);
          idx.node_vars[j][v] = var;
          if (load != 0) node_cap[v].terms.push_back({var, load});
        }
        for (size_t a = 0; a < na; ++a) {
          if (!allowed[a]) continue;
          if (!fwd[net.arc_src(static_cast<int>(a))] ||
              !back[net.arc_dst(static_cast<int>(a))]) {
            continue;
          }
          const double load = D * alt.links[l].size * lay.link_coef[l][a];
          VariableKey key{g, static_cast<int>(p), VarKind::kLink, l,
                          static_cast<int>(a)};
          int var = add_var(VarName(g, t, 'l', l, static_cast<int>(a)), key,
                            load * net.arcs()[a].cost);
          idx.link_vars[l][a] = var;
          if (load != 0) arc_cap[a].terms.push_back({var, load});
        }

        // Flow preservation: y(j,v) = y(i,v) + inflow(v) - outflow(v).
        for (size_t v = 0; v < nv; ++v) {
          Constraint row;
          row.name = "flow_g" + std::to_string(g) + "_t" + std::to_string(t) +
                     "_l" + std::to_string(l) + "_v" + std::to_string(v);
          row.sense = Sense::kEqual;
          row.rhs = 0;
          if (idx.node_vars[j][v] >= 0) row.terms.push_back({idx.node_vars[j][v], 1.0});
          if (idx.node_vars[i][v] >= 0) row.terms.push_back({idx.node_vars[i][v], -1.0});
          for (int a : net.in_arcs(static_cast<int>(v))) {
            if (idx.link_vars[l][a] >= 0) row.terms.push_back({idx.link_vars[l][a], -1.0});
          }
          for (int a : net.out_arcs(static_cast<int>(v))) {
            if (idx.link_vars[l][a] >= 0) row.terms.push_back({idx.link_vars[l][a], 1.0});
          }
          if (!row.terms.empty()) rows.push_back(std::move(row));
        }
      }
    }
    rows.push_back(std::move(one_alt));
  }

  lp.constraints = std::move(rows);
  for (auto& c : node_cap) lp.constraints.push_back(std::move(c));
  for (auto& c : arc_cap) lp.constraints.push_back(std::move(c));
  return model;
}

Model build_milp(const Instance& instance,
                 const std::vector<ResolvedRequest>& requests, double psi) {
  std::vector<AggregatedRequest> groups;
  groups.reserve(requests.size());
  for (const ResolvedRequest& r : requests) {
    groups.push_back({r.origin, r.app, r.demand, {r.id}});
  }
  return build_model(instance, groups, psi, /*binary=*/true);
}

Model build_relaxed_aggregate_lp(
    const Instance& instance, const std::vector<AggregatedRequest>& aggregates,
    double psi) {
  return build_model(instance, aggregates, psi, /*binary=*/false);
}

double FractionalSolution::value(const VariableKey& key) const {
  for (size_t i = 0; i < keys.size(); ++i) {
    if (keys[i] == key) return values[i];
  }
  return 0;
}

FractionalSolution fractional_from_values(const Model& model,
                                          const std::vector<double>& values) {
  FractionalSolution out;
  out.keys.reserve(values.size());
  for (size_t j = 0; j < model.lp.variables.size(); ++j) {
    out.keys.push_back(model.lp.variables[j].key);
    out.values.push_back(values[j]);
  }
  out.objective = model.lp.evaluate(values);
  return out;
}

namespace {

// request id -> (aggregate index, demand)
std::map<size_t, std::pair<size_t, double>> Membership(
    const std::vector<AggregatedRequest>& aggregates,
    const std::vector<ResolvedRequest>& requests) {
  std::map<size_t, double> demand;
  for (const ResolvedRequest& r : requests) demand[r.id] = r.demand;
  std::map<size_t, std::pair<size_t, double>> out;
  for (size_t g = 0; g < aggregates.size(); ++g) {
    for (size_t id : aggregates[g].members) {
      auto it = demand.find(id);
      if (it == demand.end()) {
        throw InputError("aggregate member " + std::to_string(id) +
                         " is not a known request");
      }
      out[id] = {g, it->second};
    }
  }
  return out;
}

}  // namespace

FractionalSolution split_solution(
    const FractionalSolution& aggregate_solution,
    const std::vector<AggregatedRequest>& aggregates,
    const std::vector<ResolvedRequest>& requests) {
  auto members = Membership(aggregates, requests);
  for (const ResolvedRequest& r : requests) {
    if (!members.count(r.id)) {
      throw InputError("request " + std::to_string(r.id) +
                       " is not in any aggregate");
    }
  }
  FractionalSolution out;
  out.objective = aggregate_solution.objective;
  for (size_t k = 0; k < aggregate_solution.keys.size(); ++k) {
    const VariableKey& key = aggregate_solution.keys[k];
    const AggregatedRequest& agg = aggregates.at(key.group);
    for (size_t id : agg.members) {
      VariableKey rk = key;
      rk.group = id;
      out.keys.push_back(rk);
      out.values.push_back(aggregate_solution.values[k] * members[id].second /
                           agg.demand);
    }
  }
  return out;
}

FractionalSolution merge_solution(
    const FractionalSolution& request_solution,
    const std::vector<AggregatedRequest>& aggregates,
    const std::vector<ResolvedRequest>& requests) {
  auto members = Membership(aggregates, requests);
  std::map<VariableKey, double> sums;
  for (size_t k = 0; k < request_solution.keys.size(); ++k) {
    VariableKey key = request_solution.keys[k];
    auto it = members.find(key.group);
    if (it == members.end()) {
      throw InputError("request " + std::to_string(key.group) +
                       " is not in any aggregate");
    }
    key.group = it->second.first;
    sums[key] += request_solution.values[k];
  }
  FractionalSolution out;
  out.objective = request_solution.objective;
  for (const auto& [key, value] : sums) {
    out.keys.push_back(key);
    out.values.push_back(value);
  }
  return out;
}

AppCatalog restrict_to_alternative(const AppCatalog& apps, int t) {
  std::vector<Application> out;
  for (const Application& app : apps.apps()) {
    auto pos = app.alternative_position(t);
    if (!pos) {
      throw InputError("application " + app.id + " has no alternative " +
                       std::to_string(t));
    }
    out.push_back(Application{app.id, {app.alternatives[*pos]}});
  }
  return AppCatalog(std::move(out));
}

EfficiencyMap restrict_efficiency(const EfficiencyMap& efficiency, int t) {
  EfficiencyMap out;
  for (const auto& [key, value] : efficiency.node_entries()) {
    const auto& [app, alt, vnode, sub] = key;
    if (alt == t) out.set_node(app, alt, vnode, sub, value);
  }
  for (const auto& [key, value] : efficiency.link_entries()) {
    const auto& [app, alt, parent, child, src, dst] = key;
    if (alt == t) out.set_link(app, alt, parent, child, src, dst, value);
  }
  return out;
}

double compute_rejection_penalty(const Instance& instance) {
  const SubstrateNetwork& net = instance.net();
  bool has_edge = false;
  for (const SubstrateNode& n : net.nodes()) {
    has_edge = has_edge || n.tier == Tier::kEdge;
  }
  if (!has_edge) {
    spdlog::warn("no edge-tier node; rejection penalty taken over all nodes");
  }
  double psi = 0;
  for (size_t a = 0; a < instance.apps().size(); ++a) {
    const AlternativeTopology& main = instance.alternative(static_cast<int>(a), 0);
    const AlternativeLayout& lay = instance.layout(static_cast<int>(a), 0);
    for (size_t v = 0; v < net.node_count(); ++v) {
      if (has_edge && net.nodes()[v].tier != Tier::kEdge) continue;
      double per_unit = 0;
      bool allowed = true;
      for (size_t i = 0; i < main.nodes.size(); ++i) {
        if (main.nodes[i].size == 0) continue;
        if (lay.node_coef[i][v] < 0) {
          allowed = false;
          break;
        }
        per_unit += main.nodes[i].size * lay.node_coef[i][v] * net.nodes()[v].cost;
      }
      if (allowed) psi = std::max(psi, per_unit);
    }
  }
  return psi;
}

std::vector<IntegralEmbedding> extract_embeddings(
    const Instance& instance, const Model& model,
    const std::vector<double>& values) {
  const SubstrateNetwork& net = instance.net();
  std::vector<IntegralEmbedding> out;
  for (size_t g = 0; g < model.groups.size(); ++g) {
    const AggregatedRequest& grp = model.groups[g];
    if (grp.members.size() != 1) {
      throw InputError("extract_embeddings needs single-member groups");
    }
    IntegralEmbedding emb = IntegralEmbedding::Rejected(grp.members.front());
    for (size_t p = 0; p < model.index[g].size(); ++p) {
      const GroupAlternativeIndex& idx = model.index[g][p];
      if (values[idx.root] < 0.5) continue;
      const AlternativeTopology& alt = instance.alternative(grp.app, static_cast<int>(p));
      const AlternativeLayout& lay = instance.layout(grp.app, static_cast<int>(p));
      emb.alternative = static_cast<int>(p);
      emb.node_map.assign(alt.nodes.size(), -1);
      emb.link_map.assign(alt.links.size(), {});
      for (size_t i = 0; i < alt.nodes.size(); ++i) {
        for (size_t v = 0; v < net.node_count(); ++v) {
          int var = idx.node_vars[i][v];
          if (var >= 0 && values[var] >= 0.5) emb.node_map[i] = static_cast<int>(v);
        }
      }
      for (size_t l = 0; l < alt.links.size(); ++l) {
        const int from = emb.node_map[lay.link_parent[l]];
        const int to = emb.node_map[lay.link_child[l]];
        if (from < 0 || to < 0 || from == to) continue;
        // Breadth-first search over arcs selected for this link.
        std::vector<int> via(net.node_count(), -1);
        std::vector<char> seen(net.node_count(), 0);
        std::deque<int> queue{from};
        seen[from] = 1;
        while (!queue.empty() && !seen[to]) {
          int v = queue.front();
          queue.pop_front();
          for (int a : net.out_arcs(v)) {
            int var = idx.link_vars[l][a];
            if (var < 0 || values[var] < 0.5) continue;
            int w = net.arc_dst(a);
            if (seen[w]) continue;
            seen[w] = 1;
            via[w] = a;
            queue.push_back(w);
          }
        }
        std::vector<int> path;
        for (int v = to; v != from && via[v] >= 0; v = net.arc_src(via[v])) {
          path.push_back(via[v]);
        }
        std::reverse(path.begin(), path.end());
        emb.link_map[l] = std::move(path);
      }
      break;
    }
    out.push_back(std::move(emb));
  }
  return out;
}

}  // namespace vneap
