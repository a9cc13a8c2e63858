#include "vneap/io.h"

#include <fstream>
#include <sstream>

namespace vneap {

namespace {

template <typename T>
T Field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw InputError(where + ": missing field '" + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw InputError(where + ": field '" + key + "' has the wrong type");
  }
}

template <typename T>
T FieldOr(const Json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return Field<T>(j, key, where);
}

const Json& ArrayField(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key) || !j.at(key).is_array()) {
    throw InputError(where + ": '" + key + "' must be an array");
  }
  return j.at(key);
}

void CheckSchema(const Json& j, const std::string& what) {
  if (!j.is_object()) throw InputError(what + ": expected a JSON object");
  int version = FieldOr<int>(j, "schema_version", kSchemaVersion, what);
  if (version != kSchemaVersion) {
    throw InputError(what + ": unsupported schema_version " +
                     std::to_string(version));
  }
}

std::optional<Tier> TierField(const Json& j, const std::string& where) {
  if (!j.contains("tier") || j.at("tier").is_null()) return std::nullopt;
  auto name = Field<std::string>(j, "tier", where);
  auto tier = ParseTier(name);
  if (!tier) throw InputError(where + ": unknown tier '" + name + "'");
  return tier;
}

std::optional<double> Coefficient(const Json& j, const std::string& where) {
  if (!j.contains("coefficient")) return 1.0;
  const Json& c = j.at("coefficient");
  if (c.is_string() && c.get<std::string>() == "FORBIDDEN") return std::nullopt;
  if (!c.is_number()) {
    throw InputError(where + ": coefficient must be a number or \"FORBIDDEN\"");
  }
  return c.get<double>();
}

Json CoefficientJson(const std::optional<double>& c) {
  if (!c) return "FORBIDDEN";
  return *c;
}

}  // namespace

Json read_json_file(const std::string& path) {
  std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
  if (!out) throw InputError("failed writing " + path);
}

SubstrateNetwork substrate_from_json(const Json& j) {
  CheckSchema(j, "substrate");
  std::vector<SubstrateNode> nodes;
  for (const Json& n : ArrayField(j, "nodes", "substrate")) {
    SubstrateNode node;
    node.id = Field<std::string>(n, "id", "substrate node");
    std::string where = "substrate node " + node.id;
    node.cost = Field<double>(n, "cost", where);
    node.capacity = Field<double>(n, "capacity", where);
    node.tier = TierField(n, where);
    nodes.push_back(std::move(node));
  }
  const bool undirected = j.contains("links");
  if (undirected == j.contains("arcs")) {
    throw InputError("substrate: give exactly one of 'arcs' or 'links'");
  }
  std::vector<SubstrateArc> arcs;
  for (const Json& a : ArrayField(j, undirected ? "links" : "arcs", "substrate")) {
    SubstrateArc arc;
    arc.src = Field<std::string>(a, "src", "substrate arc");
    arc.dst = Field<std::string>(a, "dst", "substrate arc");
    std::string where = "substrate arc " + arc.src + "->" + arc.dst;
    arc.cost = Field<double>(a, "cost", where);
    arc.capacity = Field<double>(a, "capacity", where);
    arc.tier = TierField(a, where);
    arcs.push_back(std::move(arc));
  }
  if (undirected) return SubstrateNetwork::FromUndirected(std::move(nodes), arcs);
  return SubstrateNetwork(std::move(nodes), std::move(arcs));
}

Json substrate_to_json(const SubstrateNetwork& net) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["nodes"] = Json::array();
  for (const SubstrateNode& n : net.nodes()) {
    Json o{{"id", n.id}, {"cost", n.cost}, {"capacity", n.capacity}};
    if (n.tier) o["tier"] = TierName(*n.tier);
    j["nodes"].push_back(o);
  }
  j["arcs"] = Json::array();
  for (const SubstrateArc& a : net.arcs()) {
    Json o{{"src", a.src}, {"dst", a.dst}, {"cost", a.cost}, {"capacity", a.capacity}};
    if (a.tier) o["tier"] = TierName(*a.tier);
    j["arcs"].push_back(o);
  }
  return j;
}

AppCatalog catalog_from_json(const Json& j) {
  CheckSchema(j, "catalog");
  std::vector<Application> apps;
  for (const Json& a : ArrayField(j, "apps", "catalog")) {
    Application app;
    app.id = Field<std::string>(a, "id", "application");
    std::string where = "application " + app.id;
    int next_index = 1;
    for (const Json& t : ArrayField(a, "alternatives", where)) {
      AlternativeTopology alt;
      alt.app = app.id;
      alt.index = FieldOr<int>(t, "index", next_index, where);
      next_index = alt.index + 1;
      std::string at = where + " alternative " + std::to_string(alt.index);
      alt.root = Field<std::string>(t, "root", at);
      for (const Json& n : ArrayField(t, "nodes", at)) {
        alt.nodes.push_back({Field<std::string>(n, "id", at),
                             Field<double>(n, "size", at)});
      }
      for (const Json& l : ArrayField(t, "links", at)) {
        alt.links.push_back({Field<std::string>(l, "parent", at),
                             Field<std::string>(l, "child", at),
                             Field<double>(l, "size", at)});
      }
      app.alternatives.push_back(std::move(alt));
    }
    apps.push_back(std::move(app));
  }
  return AppCatalog(std::move(apps));
}

Json catalog_to_json(const AppCatalog& apps) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["apps"] = Json::array();
  for (const Application& app : apps.apps()) {
    Json a{{"id", app.id}, {"alternatives", Json::array()}};
    for (const AlternativeTopology& alt : app.alternatives) {
      Json t{{"index", alt.index}, {"root", alt.root},
             {"nodes", Json::array()}, {"links", Json::array()}};
      for (const VirtualNode& n : alt.nodes) {
        t["nodes"].push_back({{"id", n.id}, {"size", n.size}});
      }
      for (const VirtualLink& l : alt.links) {
        t["links"].push_back({{"parent", l.parent}, {"child", l.child}, {"size", l.size}});
      }
      a["alternatives"].push_back(t);
    }
    j["apps"].push_back(a);
  }
  return j;
}

EfficiencyMap efficiency_from_json(const Json& j) {
  CheckSchema(j, "efficiency");
  EfficiencyMap map;
  if (j.contains("nodes")) {
    for (const Json& e : ArrayField(j, "nodes", "efficiency")) {
      map.set_node(Field<std::string>(e, "app", "efficiency node"),
                   Field<int>(e, "alternative", "efficiency node"),
                   Field<std::string>(e, "vnode", "efficiency node"),
                   Field<std::string>(e, "substrate", "efficiency node"),
                   Coefficient(e, "efficiency node"));
    }
  }
  if (j.contains("links")) {
    for (const Json& e : ArrayField(j, "links", "efficiency")) {
      map.set_link(Field<std::string>(e, "app", "efficiency link"),
                   Field<int>(e, "alternative", "efficiency link"),
                   Field<std::string>(e, "parent", "efficiency link"),
                   Field<std::string>(e, "child", "efficiency link"),
                   Field<std::string>(e, "src", "efficiency link"),
                   Field<std::string>(e, "dst", "efficiency link"),
                   Coefficient(e, "efficiency link"));
    }
  }
  return map;
}

Json efficiency_to_json(const EfficiencyMap& map) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["nodes"] = Json::array();
  for (const auto& [key, c] : map.node_entries()) {
    const auto& [app, alt, vnode, sub] = key;
    j["nodes"].push_back({{"app", app}, {"alternative", alt}, {"vnode", vnode},
                          {"substrate", sub}, {"coefficient", CoefficientJson(c)}});
  }
  j["links"] = Json::array();
  for (const auto& [key, c] : map.link_entries()) {
    const auto& [app, alt, parent, child, src, dst] = key;
    j["links"].push_back({{"app", app}, {"alternative", alt}, {"parent", parent},
                          {"child", child}, {"src", src}, {"dst", dst},
                          {"coefficient", CoefficientJson(c)}});
  }
  return j;
}

std::vector<Request> requests_from_json(const Json& j) {
  CheckSchema(j, "requests");
  std::vector<Request> out;
  for (const Json& r : ArrayField(j, "requests", "requests")) {
    out.push_back({Field<std::string>(r, "origin", "request"),
                   Field<std::string>(r, "app", "request"),
                   Field<double>(r, "demand", "request")});
  }
  return out;
}

Json requests_to_json(const std::vector<Request>& requests) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["requests"] = Json::array();
  for (const Request& r : requests) {
    j["requests"].push_back({{"origin", r.origin}, {"app", r.app}, {"demand", r.demand}});
  }
  return j;
}

Json embeddings_to_json(const Instance& instance,
                        const std::vector<ResolvedRequest>& requests,
                        const std::vector<IntegralEmbedding>& embeddings) {
  const SubstrateNetwork& net = instance.net();
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["embeddings"] = Json::array();
  for (const IntegralEmbedding& e : embeddings) {
    Json o{{"request", e.request}};
    if (e.rejected()) {
      o["status"] = "Rejected";
      j["embeddings"].push_back(o);
      continue;
    }
    const ResolvedRequest& r = requests.at(e.request);
    const AlternativeTopology& alt = instance.alternative(r.app, *e.alternative);
    o["status"] = "Embedded";
    o["alternative"] = alt.index;
    Json nodes = Json::object();
    for (size_t i = 0; i < alt.nodes.size(); ++i) {
      nodes[alt.nodes[i].id] = net.nodes()[e.node_map[i]].id;
    }
    o["node_map"] = nodes;
    Json links = Json::array();
    for (size_t l = 0; l < alt.links.size(); ++l) {
      Json path = Json::array();
      for (int a : e.link_map[l]) {
        path.push_back({net.arcs()[a].src, net.arcs()[a].dst});
      }
      links.push_back({{"parent", alt.links[l].parent},
                       {"child", alt.links[l].child},
                       {"path", path}});
    }
    o["link_map"] = links;
    j["embeddings"].push_back(o);
  }
  return j;
}

std::vector<IntegralEmbedding> embeddings_from_json(
    const Instance& instance, const std::vector<ResolvedRequest>& requests,
    const Json& j) {
  CheckSchema(j, "embeddings");
  const SubstrateNetwork& net = instance.net();
  std::vector<IntegralEmbedding> out;
  for (const Json& o : ArrayField(j, "embeddings", "embeddings")) {
    size_t id = Field<size_t>(o, "request", "embedding");
    if (id >= requests.size()) throw InputError("embedding for unknown request");
    std::string where = "embedding " + std::to_string(id);
    IntegralEmbedding e = IntegralEmbedding::Rejected(id);
    if (Field<std::string>(o, "status", where) == "Rejected") {
      out.push_back(e);
      continue;
    }
    const ResolvedRequest& r = requests[id];
    int index = Field<int>(o, "alternative", where);
    auto pos = instance.apps().app(r.app).alternative_position(index);
    if (!pos) throw InputError(where + ": unknown alternative");
    e.alternative = *pos;
    const AlternativeTopology& alt = instance.alternative(r.app, *pos);
    e.node_map.assign(alt.nodes.size(), -1);
    const Json& nodes = o.at("node_map");
    for (size_t i = 0; i < alt.nodes.size(); ++i) {
      if (!nodes.contains(alt.nodes[i].id)) continue;
      auto v = net.node_index(nodes.at(alt.nodes[i].id).get<std::string>());
      if (!v) throw InputError(where + ": unknown substrate node");
      e.node_map[i] = *v;
    }
    e.link_map.assign(alt.links.size(), {});
    for (const Json& l : ArrayField(o, "link_map", where)) {
      std::string parent = Field<std::string>(l, "parent", where);
      std::string child = Field<std::string>(l, "child", where);
      size_t k = 0;
      while (k < alt.links.size() &&
             (alt.links[k].parent != parent || alt.links[k].child != child)) {
        ++k;
      }
      if (k == alt.links.size()) throw InputError(where + ": unknown virtual link");
      for (const Json& hop : ArrayField(l, "path", where)) {
        auto s = net.node_index(hop.at(0).get<std::string>());
        auto d = net.node_index(hop.at(1).get<std::string>());
        std::optional<int> a;
        if (s && d) a = net.arc_index(*s, *d);
        if (!a) throw InputError(where + ": unknown arc in path");
        e.link_map[k].push_back(*a);
      }
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace vneap
