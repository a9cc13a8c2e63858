#include <set>
#include <sstream>
#include <unordered_map>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <spdlog/spdlog.h>

#include "vneap/harness.h"

namespace vneap {

namespace pt = boost::property_tree;

RawTopology parse_graphml(const std::string& text, const std::string& source) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw InputError(source + ":" + std::to_string(e.line()) + ": " +
                     e.message());
  }
  const pt::ptree* root = nullptr;
  if (auto g = tree.get_child_optional("graphml")) root = &*g;
  if (root == nullptr) throw InputError(source + ": missing <graphml> element");
  const pt::ptree* graph = nullptr;
  if (auto g = root->get_child_optional("graph")) graph = &*g;
  if (graph == nullptr) throw InputError(source + ": missing <graph> element");

  std::unordered_map<std::string, std::string> key_names;
  for (const auto& [tag, child] : *root) {
    if (tag != "key") continue;
    std::string id = child.get<std::string>("<xmlattr>.id", "");
    // "attr.name" contains the default path separator.
    std::string name = child.get<std::string>(pt::ptree::path_type("<xmlattr>/attr.name", '/'), id);
    if (!id.empty()) key_names[id] = name;
  }
  auto data_of = [&](const pt::ptree& element) {
    std::map<std::string, std::string> attrs;
    for (const auto& [tag, child] : element) {
      if (tag != "data") continue;
      std::string key = child.get<std::string>("<xmlattr>.key", "");
      auto it = key_names.find(key);
      attrs[it == key_names.end() ? key : it->second] = child.data();
    }
    return attrs;
  };

  RawTopology topo;
  topo.name = graph->get<std::string>("<xmlattr>.id", source);
  std::unordered_map<std::string, size_t> index;
  std::set<std::pair<size_t, size_t>> seen;
  for (const auto& [tag, child] : *graph) {
    if (tag != "node") continue;
    std::string id = child.get<std::string>("<xmlattr>.id", "");
    if (id.empty()) throw InputError(source + ": node without an id");
    if (!index.emplace(id, topo.nodes.size()).second) {
      throw InputError(source + ": duplicate node id '" + id + "'");
    }
    topo.nodes.push_back({id, data_of(child)});
  }
  for (const auto& [tag, child] : *graph) {
    if (tag != "edge") continue;
    std::string src = child.get<std::string>("<xmlattr>.source", "");
    std::string dst = child.get<std::string>("<xmlattr>.target", "");
    auto s = index.find(src);
    auto d = index.find(dst);
    if (s == index.end() || d == index.end()) {
      throw InputError(source + ": edge " + src + "-" + dst +
                       " references an unknown node");
    }
    if (s->second == d->second) {
      spdlog::warn("{}: dropping self-loop at {}", source, src);
      continue;
    }
    auto key = std::minmax(s->second, d->second);
    if (!seen.insert(key).second) {
      spdlog::warn("{}: merging parallel edge {}-{}", source, src, dst);
      continue;
    }
    topo.edges.push_back({src, dst});
  }
  if (topo.nodes.empty()) throw InputError(source + ": graph has no nodes");
  return topo;
}

RawTopology ingest_graphml(const std::string& path) {
  return parse_graphml(read_text_file(path), path);
}

}  // namespace vneap
