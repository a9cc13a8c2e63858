#include "vneap/validator.h"

#include <algorithm>
#include <cmath>
#include <set>

namespace vneap {

namespace {

double NodeCoef(const Instance& inst, const AlternativeTopology& alt,
                const VirtualNode& vn, int v) {
  auto c = inst.efficiency().node(alt.app, alt.index, vn.id,
                                  inst.net().nodes()[v].id);
  return c ? *c : -1;
}

double LinkCoef(const Instance& inst, const AlternativeTopology& alt,
                const VirtualLink& vl, int a) {
  const SubstrateArc& arc = inst.net().arcs()[a];
  auto c = inst.efficiency().link(alt.app, alt.index, vl.parent, vl.child,
                                  arc.src, arc.dst);
  return c ? *c : -1;
}

const AlternativeTopology* AlternativeOf(const Instance& inst,
                                         const ResolvedRequest& r,
                                         const IntegralEmbedding& e) {
  const Application& app = inst.apps().app(r.app);
  if (!e.alternative || *e.alternative < 0 ||
      *e.alternative >= static_cast<int>(app.alternatives.size())) {
    return nullptr;
  }
  return &app.alternatives[*e.alternative];
}

std::string Name(size_t request) { return "request " + std::to_string(request); }

}  // namespace

std::vector<Violation> check_feasibility(
    const Instance& instance, const std::vector<ResolvedRequest>& requests,
    const std::vector<IntegralEmbedding>& embeddings,
    double capacity_tolerance) {
  const SubstrateNetwork& net = instance.net();
  const int nv = static_cast<int>(net.node_count());
  const int na = static_cast<int>(net.arc_count());
  std::vector<Violation> out;
  std::vector<double> node_load(nv, 0), arc_load(na, 0);
  std::set<size_t> seen;

  for (const IntegralEmbedding& e : embeddings) {
    const std::string who = Name(e.request);
    if (e.request >= requests.size()) {
      out.push_back({"UnknownRequest", who, "no such request"});
      continue;
    }
    if (!seen.insert(e.request).second) {
      out.push_back({"MultipleEmbeddings", who,
                     "request embedded more than once"});
      continue;
    }
    const ResolvedRequest& r = requests[e.request];
    if (e.rejected()) {
      if (!e.node_map.empty() || !e.link_map.empty()) {
        out.push_back({"RejectedWithMapping", who, "rejected but mapped"});
      }
      continue;
    }
    const AlternativeTopology* alt = AlternativeOf(instance, r, e);
    if (!alt) {
      out.push_back({"UnknownAlternative", who, "alternative out of range"});
      continue;
    }
    if (e.node_map.size() != alt->nodes.size() ||
        e.link_map.size() != alt->links.size()) {
      out.push_back({"MapSizeMismatch", who, "maps do not cover the alternative"});
      continue;
    }
    bool nodes_ok = true;
    for (size_t i = 0; i < alt->nodes.size(); ++i) {
      int v = e.node_map[i];
      if (v < 0 || v >= nv) {
        out.push_back({"NodeUnmapped", who, "virtual node " + alt->nodes[i].id});
        nodes_ok = false;
        continue;
      }
      if (alt->nodes[i].id == alt->root && v != r.origin) {
        out.push_back({"RootMisplaced", who,
                       "root on " + net.nodes()[v].id + ", origin " +
                           net.nodes()[r.origin].id});
      }
      double coef = NodeCoef(instance, *alt, alt->nodes[i], v);
      if (coef < 0) {
        out.push_back({"ForbiddenPlacement", who,
                       alt->nodes[i].id + " on " + net.nodes()[v].id});
        continue;
      }
      node_load[v] += r.demand * alt->nodes[i].size * coef;
    }
    if (!nodes_ok) continue;
    for (size_t l = 0; l < alt->links.size(); ++l) {
      const VirtualLink& vl = alt->links[l];
      const int from = e.node_map[*alt->node_position(vl.parent)];
      const int to = e.node_map[*alt->node_position(vl.child)];
      const std::vector<int>& path = e.link_map[l];
      const std::string link = vl.parent + "->" + vl.child;
      if (from == to) {
        if (!path.empty()) {
          out.push_back({"PathNotEmpty", who, link + " has collocated endpoints"});
        }
        continue;
      }
      int at = from;
      bool broken = false;
      for (int a : path) {
        if (a < 0 || a >= na || net.arc_src(a) != at) {
          broken = true;
          break;
        }
        double coef = LinkCoef(instance, *alt, vl, a);
        if (coef < 0) {
          out.push_back({"ForbiddenArc", who,
                         link + " on " + net.arcs()[a].src + "->" + net.arcs()[a].dst});
        } else {
          arc_load[a] += r.demand * vl.size * coef;
        }
        at = net.arc_dst(a);
      }
      if (broken || at != to) {
        out.push_back({"PathBroken", who, link + " path is not contiguous"});
      }
    }
  }

  for (int v = 0; v < nv; ++v) {
    double cap = net.nodes()[v].capacity;
    if (node_load[v] > cap + capacity_tolerance * std::max(1.0, cap)) {
      out.push_back({"CapacityViolation", "node " + net.nodes()[v].id,
                     "load " + std::to_string(node_load[v]) + " > " +
                         std::to_string(cap)});
    }
  }
  for (int a = 0; a < na; ++a) {
    double cap = net.arcs()[a].capacity;
    if (arc_load[a] > cap + capacity_tolerance * std::max(1.0, cap)) {
      out.push_back({"CapacityViolation",
                     "arc " + net.arcs()[a].src + "->" + net.arcs()[a].dst,
                     "load " + std::to_string(arc_load[a]) + " > " +
                         std::to_string(cap)});
    }
  }
  return out;
}

LoadVector compute_loads(const Instance& instance,
                         const std::vector<ResolvedRequest>& requests,
                         const std::vector<IntegralEmbedding>& embeddings) {
  const SubstrateNetwork& net = instance.net();
  LoadVector loads{std::vector<double>(net.node_count(), 0),
                   std::vector<double>(net.arc_count(), 0)};
  for (const IntegralEmbedding& e : embeddings) {
    if (e.rejected()) continue;
    if (e.request >= requests.size()) throw InputError("unknown request");
    const ResolvedRequest& r = requests[e.request];
    const AlternativeTopology* alt = AlternativeOf(instance, r, e);
    if (!alt || e.node_map.size() != alt->nodes.size() ||
        e.link_map.size() != alt->links.size()) {
      throw InputError(Name(e.request) + ": malformed embedding");
    }
    for (size_t i = 0; i < alt->nodes.size(); ++i) {
      double coef = NodeCoef(instance, *alt, alt->nodes[i], e.node_map[i]);
      if (coef < 0) throw InputError(Name(e.request) + ": forbidden placement");
      loads.node[e.node_map[i]] += r.demand * alt->nodes[i].size * coef;
    }
    for (size_t l = 0; l < alt->links.size(); ++l) {
      for (int a : e.link_map[l]) {
        double coef = LinkCoef(instance, *alt, alt->links[l], a);
        if (coef < 0) throw InputError(Name(e.request) + ": forbidden arc");
        loads.arc[a] += r.demand * alt->links[l].size * coef;
      }
    }
  }
  return loads;
}

CostBreakdown total_cost(const Instance& instance,
                         const std::vector<ResolvedRequest>& requests,
                         const std::vector<IntegralEmbedding>& embeddings,
                         double psi) {
  auto violations = check_feasibility(instance, requests, embeddings);
  if (!violations.empty()) {
    throw InputError("cannot cost infeasible embeddings: " +
                     violations.front().rule + " (" + violations.front().entity +
                     ")");
  }
  LoadVector loads = compute_loads(instance, requests, embeddings);
  CostBreakdown c;
  for (size_t v = 0; v < loads.node.size(); ++v) {
    c.compute += loads.node[v] * instance.net().nodes()[v].cost;
  }
  for (size_t a = 0; a < loads.arc.size(); ++a) {
    c.bandwidth += loads.arc[a] * instance.net().arcs()[a].cost;
  }
  std::vector<char> served(requests.size(), 0);
  for (const IntegralEmbedding& e : embeddings) {
    if (!e.rejected()) served[e.request] = 1;
  }
  for (size_t r = 0; r < requests.size(); ++r) {
    if (!served[r]) c.rejection += psi * requests[r].demand;
  }
  c.total = c.compute + c.bandwidth + c.rejection;
  return c;
}

double rejection_rate(const std::vector<ResolvedRequest>& requests,
                      const std::vector<IntegralEmbedding>& embeddings) {
  std::vector<char> served(requests.size(), 0);
  for (const IntegralEmbedding& e : embeddings) {
    if (!e.rejected() && e.request < requests.size()) served[e.request] = 1;
  }
  double total = 0, rejected = 0;
  for (size_t r = 0; r < requests.size(); ++r) {
    total += requests[r].demand;
    if (!served[r]) rejected += requests[r].demand;
  }
  return total > 0 ? rejected / total : 0;
}

std::map<int, double> alternative_shares(
    const Instance& instance, const std::vector<ResolvedRequest>& requests,
    const std::vector<IntegralEmbedding>& embeddings) {
  std::map<int, double> shares;
  double served = 0;
  for (const IntegralEmbedding& e : embeddings) {
    if (e.rejected()) continue;
    const ResolvedRequest& r = requests.at(e.request);
    const AlternativeTopology* alt = AlternativeOf(instance, r, e);
    if (!alt) throw InputError(Name(e.request) + ": unknown alternative");
    shares[alt->index] += r.demand;
    served += r.demand;
  }
  for (auto& [t, s] : shares) s /= served;
  return shares;
}

namespace {

struct FractionalTotals {
  CostBreakdown cost;
  double demand = 0;
  double rejected = 0;
  std::map<int, double> served;  // by alternative index
};

FractionalTotals Accumulate(const Instance& instance,
                            const std::vector<AggregatedRequest>& aggregates,
                            const FractionalSolution& y, double psi) {
  const SubstrateNetwork& net = instance.net();
  FractionalTotals t;
  std::vector<double> root_mass(aggregates.size(), 0);
  for (size_t k = 0; k < y.keys.size(); ++k) {
    const VariableKey& key = y.keys[k];
    const double value = y.values[k];
    if (key.group >= aggregates.size()) throw InputError("unknown aggregate");
    const AggregatedRequest& agg = aggregates[key.group];
    const AlternativeTopology& alt = instance.alternative(agg.app, key.alternative);
    if (key.kind == VarKind::kNode) {
      const VirtualNode& vn = alt.nodes.at(key.element);
      if (vn.id == alt.root) {
        if (key.substrate != agg.origin) throw InputError("root off origin");
        root_mass[key.group] += value;
        t.served[alt.index] += value * agg.demand;
      }
      double coef = NodeCoef(instance, alt, vn, key.substrate);
      if (coef < 0) throw InputError("forbidden placement in fractional solution");
      t.cost.compute += value * agg.demand * vn.size * coef *
                        net.nodes()[key.substrate].cost;
    } else {
      const VirtualLink& vl = alt.links.at(key.element);
      double coef = LinkCoef(instance, alt, vl, key.substrate);
      if (coef < 0) throw InputError("forbidden arc in fractional solution");
      t.cost.bandwidth += value * agg.demand * vl.size * coef *
                          net.arcs()[key.substrate].cost;
    }
  }
  for (size_t g = 0; g < aggregates.size(); ++g) {
    t.demand += aggregates[g].demand;
    t.rejected += aggregates[g].demand * (1 - root_mass[g]);
  }
  t.cost.rejection = psi * t.rejected;
  t.cost.total = t.cost.compute + t.cost.bandwidth + t.cost.rejection;
  return t;
}

}  // namespace

CostBreakdown fractional_cost(const Instance& instance,
                              const std::vector<AggregatedRequest>& aggregates,
                              const FractionalSolution& y, double psi) {
  return Accumulate(instance, aggregates, y, psi).cost;
}

double fractional_rejection_rate(const Instance& instance,
                                 const std::vector<AggregatedRequest>& aggregates,
                                 const FractionalSolution& y) {
  FractionalTotals t = Accumulate(instance, aggregates, y, 0);
  return t.demand > 0 ? std::clamp(t.rejected / t.demand, 0.0, 1.0) : 0;
}

std::map<int, double> fractional_alternative_shares(
    const Instance& instance, const std::vector<AggregatedRequest>& aggregates,
    const FractionalSolution& y) {
  FractionalTotals t = Accumulate(instance, aggregates, y, 0);
  double served = 0;
  for (auto& [k, s] : t.served) served += s;
  std::map<int, double> out;
  if (served <= 0) return out;
  for (auto& [k, s] : t.served) {
    if (s > 0) out[k] = s / served;
  }
  return out;
}

double objective_consistency(double solver_objective,
                             const CostBreakdown& recomputed) {
  return std::fabs(solver_objective - recomputed.total);
}

}  // namespace vneap
