#include "vneap/domain.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace vneap {

const char* TierName(Tier tier) {
  switch (tier) {
    case Tier::kEdge:
      return "edge";
    case Tier::kTransport:
      return "transport";
    case Tier::kCore:
      return "core";
  }
  return "?";
}

std::optional<Tier> ParseTier(const std::string& name) {
  if (name == "edge" || name == "Edge") return Tier::kEdge;
  if (name == "transport" || name == "Transport") return Tier::kTransport;
  if (name == "core" || name == "Core") return Tier::kCore;
  return std::nullopt;
}

SubstrateNetwork::SubstrateNetwork(std::vector<SubstrateNode> nodes,
                                   std::vector<SubstrateArc> arcs)
    : nodes_(std::move(nodes)), arcs_(std::move(arcs)) {
  for (size_t i = 0; i < nodes_.size(); ++i) {
    node_lookup_.emplace(nodes_[i].id, static_cast<int>(i));
  }
  out_.resize(nodes_.size());
  in_.resize(nodes_.size());
  arc_src_.resize(arcs_.size(), -1);
  arc_dst_.resize(arcs_.size(), -1);
  for (size_t a = 0; a < arcs_.size(); ++a) {
    auto s = node_index(arcs_[a].src);
    auto d = node_index(arcs_[a].dst);
    if (!s || !d) continue;
    arc_src_[a] = *s;
    arc_dst_[a] = *d;
    out_[*s].push_back(static_cast<int>(a));
    in_[*d].push_back(static_cast<int>(a));
    arc_lookup_.emplace(std::make_pair(*s, *d), static_cast<int>(a));
  }
}

SubstrateNetwork SubstrateNetwork::FromUndirected(
    std::vector<SubstrateNode> nodes, const std::vector<SubstrateArc>& links) {
  std::vector<SubstrateArc> arcs;
  arcs.reserve(2 * links.size());
  for (const SubstrateArc& link : links) {
    arcs.push_back(link);
    SubstrateArc back = link;
    std::swap(back.src, back.dst);
    arcs.push_back(std::move(back));
  }
  return SubstrateNetwork(std::move(nodes), std::move(arcs));
}

std::optional<int> SubstrateNetwork::node_index(const std::string& id) const {
  auto it = node_lookup_.find(id);
  if (it == node_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> SubstrateNetwork::arc_index(int src, int dst) const {
  auto it = arc_lookup_.find({src, dst});
  if (it == arc_lookup_.end()) return std::nullopt;
  return it->second;
}

SubstrateNetwork SubstrateNetwork::WithScaledCapacities(
    double node_factor, double arc_factor) const {
  std::vector<SubstrateNode> nodes = nodes_;
  std::vector<SubstrateArc> arcs = arcs_;
  for (auto& n : nodes) n.capacity *= node_factor;
  for (auto& a : arcs) a.capacity *= arc_factor;
  return SubstrateNetwork(std::move(nodes), std::move(arcs));
}

SubstrateNetwork SubstrateNetwork::WithCapacities(
    const std::vector<double>& node_caps,
    const std::vector<double>& arc_caps) const {
  std::vector<SubstrateNode> nodes = nodes_;
  std::vector<SubstrateArc> arcs = arcs_;
  for (size_t i = 0; i < nodes.size(); ++i) nodes[i].capacity = node_caps[i];
  for (size_t i = 0; i < arcs.size(); ++i) arcs[i].capacity = arc_caps[i];
  return SubstrateNetwork(std::move(nodes), std::move(arcs));
}

std::optional<int> AlternativeTopology::node_position(
    const std::string& id) const {
  for (size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].id == id) return static_cast<int>(i);
  }
  return std::nullopt;
}

std::optional<int> Application::alternative_position(int index) const {
  for (size_t i = 0; i < alternatives.size(); ++i) {
    if (alternatives[i].index == index) return static_cast<int>(i);
  }
  return std::nullopt;
}

AppCatalog::AppCatalog(std::vector<Application> apps) : apps_(std::move(apps)) {
  for (size_t i = 0; i < apps_.size(); ++i) {
    lookup_.emplace(apps_[i].id, static_cast<int>(i));
  }
}

std::optional<int> AppCatalog::app_index(const std::string& id) const {
  auto it = lookup_.find(id);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

void EfficiencyMap::set_node(const std::string& app, int alternative,
                             const std::string& vnode,
                             const std::string& substrate,
                             std::optional<double> coefficient) {
  nodes_[{app, alternative, vnode, substrate}] = coefficient;
}

void EfficiencyMap::set_link(const std::string& app, int alternative,
                             const std::string& parent,
                             const std::string& child, const std::string& src,
                             const std::string& dst,
                             std::optional<double> coefficient) {
  links_[{app, alternative, parent, child, src, dst}] = coefficient;
}

std::optional<double> EfficiencyMap::node(const std::string& app,
                                          int alternative,
                                          const std::string& vnode,
                                          const std::string& substrate) const {
  auto it = nodes_.find({app, alternative, vnode, substrate});
  if (it == nodes_.end()) return 1.0;
  return it->second;
}

std::optional<double> EfficiencyMap::link(const std::string& app,
                                          int alternative,
                                          const std::string& parent,
                                          const std::string& child,
                                          const std::string& src,
                                          const std::string& dst) const {
  auto it = links_.find({app, alternative, parent, child, src, dst});
  if (it == links_.end()) return 1.0;
  return it->second;
}

namespace {

std::string ArcName(const SubstrateArc& arc) {
  return arc.src + "->" + arc.dst;
}

bool Finite(double x) { return std::isfinite(x); }

}  // namespace

std::vector<Violation> validate_substrate(const SubstrateNetwork& net) {
  std::vector<Violation> out;
  std::set<std::string> seen;
  for (const SubstrateNode& n : net.nodes()) {
    if (!seen.insert(n.id).second) {
      out.push_back({"DuplicateNode", n.id, "node id appears twice"});
    }
    if (!Finite(n.cost) || n.cost < 0) {
      out.push_back({"NegativeCost", n.id, "node cost must be >= 0"});
    }
    if (!Finite(n.capacity) || n.capacity < 0) {
      out.push_back({"NegativeCapacity", n.id, "node capacity must be >= 0"});
    }
  }
  std::set<std::pair<std::string, std::string>> pairs;
  for (size_t a = 0; a < net.arcs().size(); ++a) {
    const SubstrateArc& arc = net.arcs()[a];
    std::string name = ArcName(arc);
    if (net.arc_src(static_cast<int>(a)) < 0 ||
        net.arc_dst(static_cast<int>(a)) < 0) {
      out.push_back({"DanglingArc", name, "arc endpoint is not a known node"});
    }
    if (arc.src == arc.dst) {
      out.push_back({"SelfLoop", name, "arc starts and ends at the same node"});
    }
    if (!pairs.insert({arc.src, arc.dst}).second) {
      out.push_back({"DuplicateArc", name, "more than one arc for the pair"});
    }
    if (!Finite(arc.cost) || arc.cost < 0) {
      out.push_back({"NegativeCost", name, "arc cost must be >= 0"});
    }
    if (!Finite(arc.capacity) || arc.capacity < 0) {
      out.push_back({"NegativeCapacity", name, "arc capacity must be >= 0"});
    }
  }
  return out;
}

namespace {

// Tree check shared by validation and preorder. Fills `order` with link
// positions in preorder; returns a violation rule name on failure.
std::optional<Violation> TreeOrder(const AlternativeTopology& alt,
                                   std::vector<int>* order) {
  const std::string entity = alt.app + "#" + std::to_string(alt.index);
  auto root = alt.node_position(alt.root);
  if (!root) return Violation{"UnknownRoot", entity, "root " + alt.root};
  const size_t n = alt.nodes.size();
  std::vector<std::vector<int>> children(n);
  std::vector<int> parents(n, 0);
  for (size_t l = 0; l < alt.links.size(); ++l) {
    auto p = alt.node_position(alt.links[l].parent);
    auto c = alt.node_position(alt.links[l].child);
    if (!p || !c) {
      return Violation{"UnknownLinkEndpoint", entity,
                       alt.links[l].parent + "->" + alt.links[l].child};
    }
    children[*p].push_back(static_cast<int>(l));
    ++parents[*c];
  }
  if (parents[*root] != 0) {
    return Violation{"NotATree", entity, "root has a parent"};
  }
  for (size_t i = 0; i < n; ++i) {
    if (static_cast<int>(i) != *root && parents[i] != 1) {
      return Violation{"NotATree", entity,
                       alt.nodes[i].id + " has " + std::to_string(parents[i]) +
                           " parents"};
    }
  }
  // Depth-first preorder; children in declaration order.
  std::vector<char> visited(n, 0);
  std::vector<int> stack;
  order->clear();
  visited[*root] = 1;
  for (auto it = children[*root].rbegin(); it != children[*root].rend(); ++it) {
    stack.push_back(*it);
  }
  while (!stack.empty()) {
    int l = stack.back();
    stack.pop_back();
    int c = *alt.node_position(alt.links[l].child);
    if (visited[c]) return Violation{"NotATree", entity, "cycle"};
    visited[c] = 1;
    order->push_back(l);
    for (auto it = children[c].rbegin(); it != children[c].rend(); ++it) {
      stack.push_back(*it);
    }
  }
  if (order->size() != alt.links.size() ||
      std::count(visited.begin(), visited.end(), 1) != static_cast<long>(n)) {
    return Violation{"NotATree", entity, "nodes unreachable from root"};
  }
  return std::nullopt;
}

}  // namespace

std::vector<Violation> validate_application(const Application& app) {
  std::vector<Violation> out;
  if (app.alternatives.empty()) {
    out.push_back({"NoAlternatives", app.id, "application has no alternatives"});
  }
  std::set<int> indices;
  for (const AlternativeTopology& alt : app.alternatives) {
    const std::string entity = app.id + "#" + std::to_string(alt.index);
    if (!indices.insert(alt.index).second) {
      out.push_back({"DuplicateAlternative", entity, "alternative index reused"});
    }
    std::set<std::string> ids;
    for (const VirtualNode& v : alt.nodes) {
      if (!ids.insert(v.id).second) {
        out.push_back({"DuplicateNode", entity, v.id});
      }
      if (!Finite(v.size) || v.size < 0) {
        out.push_back({"NegativeSize", entity, v.id});
      }
    }
    for (const VirtualLink& l : alt.links) {
      if (!Finite(l.size) || l.size < 0) {
        out.push_back({"NegativeSize", entity, l.parent + "->" + l.child});
      }
    }
    if (auto r = alt.node_position(alt.root); r && alt.nodes[*r].size != 0) {
      out.push_back({"RootSizeNonzero", entity, "root size must be 0"});
    }
    std::vector<int> order;
    if (auto v = TreeOrder(alt, &order)) out.push_back(*v);
  }
  return out;
}

std::vector<int> link_preorder(const AlternativeTopology& alt) {
  std::vector<int> order;
  if (auto v = TreeOrder(alt, &order)) {
    throw InputError(v->rule + " in " + v->entity + ": " + v->detail);
  }
  return order;
}

namespace {

[[noreturn]] void ThrowViolations(const std::string& what,
                                  const std::vector<Violation>& vs) {
  std::ostringstream os;
  os << "invalid " << what << ":";
  for (const Violation& v : vs) {
    os << " [" << v.rule << " " << v.entity << ": " << v.detail << "]";
  }
  throw InputError(os.str());
}

}  // namespace

Instance::Instance(SubstrateNetwork net, AppCatalog apps,
                   EfficiencyMap efficiency)
    : net_(std::move(net)),
      apps_(std::move(apps)),
      efficiency_(std::move(efficiency)) {
  if (auto vs = validate_substrate(net_); !vs.empty()) {
    ThrowViolations("substrate", vs);
  }
  std::set<std::string> app_ids;
  for (const Application& app : apps_.apps()) {
    if (!app_ids.insert(app.id).second) {
      throw InputError("duplicate application id " + app.id);
    }
    if (auto vs = validate_application(app); !vs.empty()) {
      ThrowViolations("application " + app.id, vs);
    }
  }

  // Efficiency entries must reference known elements.
  for (const auto& [key, value] : efficiency_.node_entries()) {
    const auto& [app, t, vnode, sub] = key;
    auto a = apps_.app_index(app);
    std::optional<int> pos;
    if (a) pos = apps_.app(*a).alternative_position(t);
    if (!a || !pos || !apps_.app(*a).alternatives[*pos].node_position(vnode) ||
        !net_.node_index(sub)) {
      throw InputError("efficiency entry references unknown element: " + app +
                       "#" + std::to_string(t) + " " + vnode + "@" + sub);
    }
    if (value && (!(*value > 0) || !Finite(*value))) {
      throw InputError("efficiency coefficient must be > 0: " + vnode + "@" +
                       sub);
    }
  }
  for (const auto& [key, value] : efficiency_.link_entries()) {
    const auto& [app, t, parent, child, src, dst] = key;
    auto a = apps_.app_index(app);
    auto s = net_.node_index(src);
    auto d = net_.node_index(dst);
    if (!a || !apps_.app(*a).alternative_position(t) || !s || !d ||
        !net_.arc_index(*s, *d)) {
      throw InputError("efficiency entry references unknown element: " + app +
                       "#" + std::to_string(t) + " " + parent + "->" + child);
    }
    if (value && (!(*value > 0) || !Finite(*value))) {
      throw InputError("efficiency coefficient must be > 0: " + parent + "->" +
                       child);
    }
  }

  const size_t nv = net_.node_count();
  const size_t na = net_.arc_count();
  layouts_.resize(apps_.size());
  for (size_t a = 0; a < apps_.size(); ++a) {
    const Application& app = apps_.app(static_cast<int>(a));
    for (const AlternativeTopology& alt : app.alternatives) {
      AlternativeLayout lay;
      lay.root = *alt.node_position(alt.root);
      lay.preorder = link_preorder(alt);
      lay.child_links.resize(alt.nodes.size());
      for (size_t l = 0; l < alt.links.size(); ++l) {
        int p = *alt.node_position(alt.links[l].parent);
        int c = *alt.node_position(alt.links[l].child);
        lay.link_parent.push_back(p);
        lay.link_child.push_back(c);
        lay.child_links[p].push_back(static_cast<int>(l));
      }
      lay.node_coef.assign(alt.nodes.size(), std::vector<double>(nv, 1.0));
      lay.link_coef.assign(alt.links.size(), std::vector<double>(na, 1.0));
      if (!efficiency_.empty()) {
        for (size_t i = 0; i < alt.nodes.size(); ++i) {
          for (size_t v = 0; v < nv; ++v) {
            auto c = efficiency_.node(app.id, alt.index, alt.nodes[i].id,
                                      net_.nodes()[v].id);
            lay.node_coef[i][v] = c ? *c : -1.0;
          }
        }
        for (size_t l = 0; l < alt.links.size(); ++l) {
          for (size_t e = 0; e < na; ++e) {
            const SubstrateArc& arc = net_.arcs()[e];
            auto c = efficiency_.link(app.id, alt.index, alt.links[l].parent,
                                      alt.links[l].child, arc.src, arc.dst);
            lay.link_coef[l][e] = c ? *c : -1.0;
          }
        }
      }
      layouts_[a].push_back(std::move(lay));
    }
  }
}

size_t Instance::total_alternative_size() const {
  size_t total = 0;
  for (const Application& app : apps_.apps()) {
    for (const AlternativeTopology& alt : app.alternatives) {
      total += alt.element_count();
    }
  }
  return total;
}

size_t Instance::max_alternative_size(int app) const {
  size_t best = 0;
  for (const AlternativeTopology& alt : apps_.app(app).alternatives) {
    best = std::max(best, alt.element_count());
  }
  return best;
}

ResolvedRequest Instance::resolve(const Request& request, size_t id) const {
  auto origin = net_.node_index(request.origin);
  if (!origin) throw InputError("request origin unknown: " + request.origin);
  auto app = apps_.app_index(request.app);
  if (!app) throw InputError("request application unknown: " + request.app);
  if (!(request.demand > 0) || !Finite(request.demand)) {
    throw InputError("request demand must be > 0");
  }
  return ResolvedRequest{id, *origin, *app, request.demand};
}

std::vector<ResolvedRequest> Instance::resolve(
    const std::vector<Request>& requests) const {
  std::vector<ResolvedRequest> out;
  out.reserve(requests.size());
  for (size_t i = 0; i < requests.size(); ++i) {
    out.push_back(resolve(requests[i], i));
  }
  return out;
}

}  // namespace vneap
