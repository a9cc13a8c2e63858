#ifndef VNEAP_DOMAIN_H
#define VNEAP_DOMAIN_H

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

namespace vneap {

// Thrown when an input references unknown entities or breaks an invariant
// that an algorithm requires. Validation functions never throw; they return
// violations as data.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Tier { kEdge = 0, kTransport = 1, kCore = 2 };

const char* TierName(Tier tier);
std::optional<Tier> ParseTier(const std::string& name);

struct SubstrateNode {
  std::string id;
  double cost = 0;      // per unit of induced compute load
  double capacity = 0;  // compute units
  std::optional<Tier> tier;
};

struct SubstrateArc {
  std::string src;
  std::string dst;
  double cost = 0;      // per unit of induced bandwidth load
  double capacity = 0;  // bandwidth units
  std::optional<Tier> tier;
};

// Directed capacitated substrate. Nodes and arcs get dense indices in the
// order they are given. Arcs that reference unknown nodes are kept (so that
// validation can report them) but have endpoint index -1.
class SubstrateNetwork {
 public:
  SubstrateNetwork() = default;
  SubstrateNetwork(std::vector<SubstrateNode> nodes,
                   std::vector<SubstrateArc> arcs);

  // Undirected links expand into two opposing arcs, each with the full
  // stated capacity and cost.
  static SubstrateNetwork FromUndirected(std::vector<SubstrateNode> nodes,
                                         const std::vector<SubstrateArc>& links);

  const std::vector<SubstrateNode>& nodes() const { return nodes_; }
  const std::vector<SubstrateArc>& arcs() const { return arcs_; }
  size_t node_count() const { return nodes_.size(); }
  size_t arc_count() const { return arcs_.size(); }

  std::optional<int> node_index(const std::string& id) const;
  std::optional<int> arc_index(int src, int dst) const;
  int arc_src(int arc) const { return arc_src_[arc]; }
  int arc_dst(int arc) const { return arc_dst_[arc]; }
  const std::vector<int>& out_arcs(int node) const { return out_[node]; }
  const std::vector<int>& in_arcs(int node) const { return in_[node]; }

  // Copy with node capacities and arc capacities multiplied by the factors.
  SubstrateNetwork WithScaledCapacities(double node_factor,
                                        double arc_factor) const;
  SubstrateNetwork WithCapacities(const std::vector<double>& node_caps,
                                  const std::vector<double>& arc_caps) const;

 private:
  std::vector<SubstrateNode> nodes_;
  std::vector<SubstrateArc> arcs_;
  std::unordered_map<std::string, int> node_lookup_;
  std::map<std::pair<int, int>, int> arc_lookup_;
  std::vector<int> arc_src_;
  std::vector<int> arc_dst_;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> in_;
};

struct VirtualNode {
  std::string id;
  double size = 0;  // compute units per unit of demand
};

struct VirtualLink {
  std::string parent;
  std::string child;
  double size = 0;  // bandwidth units per unit of demand
};

// One rooted virtual tree. `index` is the 1-based alternative number t used
// in reports and efficiency keys; it survives restriction to a single
// alternative.
struct AlternativeTopology {
  std::string app;
  int index = 1;
  std::string root;
  std::vector<VirtualNode> nodes;
  std::vector<VirtualLink> links;

  std::optional<int> node_position(const std::string& id) const;
  size_t element_count() const { return nodes.size() + links.size(); }
};

struct Application {
  std::string id;
  std::vector<AlternativeTopology> alternatives;  // position 0 is the main one

  std::optional<int> alternative_position(int index) const;
};

class AppCatalog {
 public:
  AppCatalog() = default;
  explicit AppCatalog(std::vector<Application> apps);

  const std::vector<Application>& apps() const { return apps_; }
  std::optional<int> app_index(const std::string& id) const;
  const Application& app(int index) const { return apps_[index]; }
  size_t size() const { return apps_.size(); }

 private:
  std::vector<Application> apps_;
  std::unordered_map<std::string, int> lookup_;
};

// Per-pair (in)efficiency coefficients. Unspecified pairs default to 1.0;
// std::nullopt stored as a value marks the pairing FORBIDDEN.
class EfficiencyMap {
 public:
  using NodeKey = std::tuple<std::string, int, std::string, std::string>;
  using LinkKey = std::tuple<std::string, int, std::string, std::string,
                             std::string, std::string>;

  void set_node(const std::string& app, int alternative,
                const std::string& vnode, const std::string& substrate,
                std::optional<double> coefficient);
  void set_link(const std::string& app, int alternative,
                const std::string& parent, const std::string& child,
                const std::string& src, const std::string& dst,
                std::optional<double> coefficient);

  std::optional<double> node(const std::string& app, int alternative,
                             const std::string& vnode,
                             const std::string& substrate) const;
  std::optional<double> link(const std::string& app, int alternative,
                             const std::string& parent,
                             const std::string& child, const std::string& src,
                             const std::string& dst) const;

  const std::map<NodeKey, std::optional<double>>& node_entries() const {
    return nodes_;
  }
  const std::map<LinkKey, std::optional<double>>& link_entries() const {
    return links_;
  }
  bool empty() const { return nodes_.empty() && links_.empty(); }

 private:
  std::map<NodeKey, std::optional<double>> nodes_;
  std::map<LinkKey, std::optional<double>> links_;
};

struct Request {
  std::string origin;
  std::string app;
  double demand = 0;
};

struct Violation {
  std::string rule;    // e.g. "DanglingArc"
  std::string entity;  // which element broke it
  std::string detail;
};

std::vector<Violation> validate_substrate(const SubstrateNetwork& net);
std::vector<Violation> validate_application(const Application& app);

// Links ordered so that each link's parent is the root or the child of an
// earlier link. Returns positions into alt.links. Throws InputError when the
// links do not form a tree rooted at alt.root.
std::vector<int> link_preorder(const AlternativeTopology& alt);

// Chosen alternative plus node and link mappings, all by dense index.
// `alternative` is the position inside the application's alternatives.
struct IntegralEmbedding {
  size_t request = 0;
  std::optional<int> alternative;      // nullopt => rejected
  std::vector<int> node_map;           // per virtual node position
  std::vector<std::vector<int>> link_map;  // per virtual link position: arcs

  bool rejected() const { return !alternative.has_value(); }
  static IntegralEmbedding Rejected(size_t request) {
    IntegralEmbedding e;
    e.request = request;
    return e;
  }
};

// Request with ids resolved to dense indices.
struct ResolvedRequest {
  size_t id = 0;
  int origin = -1;
  int app = -1;
  double demand = 0;
};

// Precomputed per-alternative structure used by every algorithm.
struct AlternativeLayout {
  int root = 0;                      // virtual node position of the root
  std::vector<int> preorder;         // link positions
  std::vector<int> link_parent;      // per link: parent node position
  std::vector<int> link_child;       // per link: child node position
  std::vector<std::vector<int>> child_links;  // per node: outgoing links
  // Efficiency coefficient, negative when FORBIDDEN.
  std::vector<std::vector<double>> node_coef;  // [vnode][substrate node]
  std::vector<std::vector<double>> link_coef;  // [vlink][arc]
};

// Validated, immutable bundle of substrate, catalog and efficiency map with
// dense lookup tables. Safe to share across threads.
class Instance {
 public:
  Instance(SubstrateNetwork net, AppCatalog apps, EfficiencyMap efficiency = {});

  const SubstrateNetwork& net() const { return net_; }
  const AppCatalog& apps() const { return apps_; }
  const EfficiencyMap& efficiency() const { return efficiency_; }

  const AlternativeTopology& alternative(int app, int pos) const {
    return apps_.app(app).alternatives[pos];
  }
  const AlternativeLayout& layout(int app, int pos) const {
    return layouts_[app][pos];
  }

  // Total number of virtual elements over all alternatives of all apps.
  size_t total_alternative_size() const;
  size_t max_alternative_size(int app) const;

  ResolvedRequest resolve(const Request& request, size_t id) const;
  std::vector<ResolvedRequest> resolve(const std::vector<Request>& requests) const;

 private:
  SubstrateNetwork net_;
  AppCatalog apps_;
  EfficiencyMap efficiency_;
  std::vector<std::vector<AlternativeLayout>> layouts_;
};

}  // namespace vneap

#endif  // VNEAP_DOMAIN_H
