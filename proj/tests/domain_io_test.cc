#include <algorithm>

#include "doctest.h"
#include "random_instance.h"
#include "test_util.h"
#include "vneap/formulation.h"
#include "vneap/greedy.h"
#include "vneap/io.h"

using namespace vneap;
using namespace vneap::testing;

namespace {

bool HasRule(const std::vector<Violation>& vs, const std::string& rule) {
  return std::any_of(vs.begin(), vs.end(),
                     [&](const Violation& v) { return v.rule == rule; });
}

AlternativeTopology Chain(const std::string& app, int index) {
  return {app, index, "theta",
          {{"theta", 0}, {"a", 1}, {"b", 2}},
          {{"theta", "a", 1}, {"a", "b", 1}}};
}

}  // namespace

TEST_SUITE("domain") {

TEST_CASE("substrate validation reports structural problems as data") {
  SubstrateNetwork net({{"u", 1, 10, Tier::kEdge}, {"u", 1, -1, std::nullopt}},
                       {{"u", "ghost", 1, 1, std::nullopt},
                        {"u", "u", 1, 1, std::nullopt},
                        {"u", "ghost", -1, 1, std::nullopt}});
  auto vs = validate_substrate(net);
  CHECK(HasRule(vs, "DuplicateNode"));
  CHECK(HasRule(vs, "NegativeCapacity"));
  CHECK(HasRule(vs, "DanglingArc"));
  CHECK(HasRule(vs, "SelfLoop"));
  CHECK(HasRule(vs, "NegativeCost"));
  CHECK(validate_substrate(ToyInstance().net()).empty());
}

TEST_CASE("application validation") {
  Application ok{"app", {Chain("app", 1)}};
  CHECK(validate_application(ok).empty());

  Application empty{"app", {}};
  CHECK(HasRule(validate_application(empty), "NoAlternatives"));

  Application dup{"app", {Chain("app", 1), Chain("app", 1)}};
  CHECK(HasRule(validate_application(dup), "DuplicateAlternative"));

  AlternativeTopology cyclic = Chain("app", 1);
  cyclic.links.push_back({"b", "a", 1});
  CHECK(HasRule(validate_application({"app", {cyclic}}), "NotATree"));

  AlternativeTopology heavy_root = Chain("app", 1);
  heavy_root.nodes[0].size = 3;
  CHECK(HasRule(validate_application({"app", {heavy_root}}), "RootSizeNonzero"));

  AlternativeTopology dangling = Chain("app", 1);
  dangling.links.push_back({"a", "zz", 1});
  CHECK(HasRule(validate_application({"app", {dangling}}), "UnknownLinkEndpoint"));

  AlternativeTopology no_root = Chain("app", 1);
  no_root.root = "nope";
  CHECK(HasRule(validate_application({"app", {no_root}}), "UnknownRoot"));
}

TEST_CASE("link preorder visits parents before children") {
  AlternativeTopology alt{"app", 1, "theta",
                          {{"theta", 0}, {"a", 1}, {"b", 1}, {"c", 1}},
                          {{"b", "c", 1}, {"a", "b", 1}, {"theta", "a", 1}}};
  std::vector<int> order = link_preorder(alt);
  REQUIRE(order.size() == 3);
  std::vector<std::string> placed{"theta"};
  for (int l : order) {
    CHECK(std::find(placed.begin(), placed.end(), alt.links[l].parent) !=
          placed.end());
    placed.push_back(alt.links[l].child);
  }
  alt.links.push_back({"c", "a", 1});
  CHECK_THROWS_AS(link_preorder(alt), InputError);
}

TEST_CASE("efficiency map defaults to one and stores FORBIDDEN") {
  EfficiencyMap m;
  CHECK(*m.node("app", 1, "a", "u") == 1.0);
  m.set_node("app", 1, "a", "u", std::nullopt);
  m.set_node("app", 1, "b", "u", 0.5);
  CHECK_FALSE(m.node("app", 1, "a", "u").has_value());
  CHECK(*m.node("app", 1, "b", "u") == 0.5);
  CHECK(*m.node("app", 2, "a", "u") == 1.0);
  m.set_link("app", 1, "a", "b", "u", "v", std::nullopt);
  CHECK_FALSE(m.link("app", 1, "a", "b", "u", "v").has_value());
  CHECK(*m.link("app", 1, "a", "b", "v", "u") == 1.0);
}

TEST_CASE("instance rejects bad references") {
  Instance inst = ToyInstance();
  CHECK_THROWS_AS(inst.resolve(Request{"nowhere", "toy", 1}, 0), InputError);
  CHECK_THROWS_AS(inst.resolve(Request{"edge", "nope", 1}, 0), InputError);
  CHECK_THROWS_AS(inst.resolve(Request{"edge", "toy", 0}, 0), InputError);

  EfficiencyMap bad;
  bad.set_node("toy", 1, "ghost", "edge", 2.0);
  CHECK_THROWS_AS(Instance(inst.net(), inst.apps(), bad), InputError);
  EfficiencyMap nonpositive;
  nonpositive.set_node("toy", 1, "A", "edge", 0.0);
  CHECK_THROWS_AS(Instance(inst.net(), inst.apps(), nonpositive), InputError);
}

TEST_CASE("undirected links expand into two full-capacity arcs") {
  Instance inst = ToyInstance();
  REQUIRE(inst.net().arc_count() == 2);
  for (const SubstrateArc& a : inst.net().arcs()) CHECK(a.capacity == 10000);
  CHECK(inst.net().arc_index(0, 1).has_value());
  CHECK(inst.net().arc_index(1, 0).has_value());
  CHECK(inst.total_alternative_size() == 5 + 7);
  CHECK(inst.max_alternative_size(0) == 7);
}

}  // TEST_SUITE

TEST_SUITE("io") {

TEST_CASE("substrate, catalog, efficiency and requests round-trip") {
  RandomSpec spec;
  spec.forbid_probability = 0.2;
  spec.apps = 2;
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    RandomCase rc = MakeRandomCase(seed, spec);
    Json s = substrate_to_json(rc.net);
    CHECK(substrate_to_json(substrate_from_json(s)) == s);
    Json c = catalog_to_json(rc.apps);
    CHECK(catalog_to_json(catalog_from_json(c)) == c);
    Json e = efficiency_to_json(rc.efficiency);
    CHECK(efficiency_to_json(efficiency_from_json(e)) == e);
    Json r = requests_to_json(rc.requests);
    CHECK(requests_to_json(requests_from_json(r)) == r);
  }
}

TEST_CASE("embeddings round-trip through JSON") {
  RandomCase rc = MakeRandomCase(3, {});
  Instance inst(rc.net, rc.apps, rc.efficiency);
  auto reqs = inst.resolve(rc.requests);
  GreedyResult g = greedy_embed_all(inst, reqs, 7);
  Json j = embeddings_to_json(inst, reqs, g.embeddings);
  auto back = embeddings_from_json(inst, reqs, j);
  CHECK(embeddings_to_json(inst, reqs, back) == j);
}

TEST_CASE("schema and field errors are input errors") {
  CHECK_THROWS_AS(read_json_file(DataPath("does/not/exist.json")), InputError);
  CHECK_THROWS_AS(substrate_from_json(Json::parse(R"({"schema_version": 99,
      "nodes": [], "arcs": []})")), InputError);
  CHECK_THROWS_AS(substrate_from_json(Json::parse(R"({"schema_version": 1,
      "nodes": [{"id": "a"}], "arcs": []})")), InputError);
  CHECK_THROWS_AS(efficiency_from_json(Json::parse(R"({"schema_version": 1,
      "nodes": [{"app": "x", "alternative": 1, "vnode": "a", "substrate": "u",
                 "coefficient": "NEVER"}]})")), InputError);
  Json forbidden = Json::parse(R"({"schema_version": 1,
      "nodes": [{"app": "x", "alternative": 1, "vnode": "a", "substrate": "u",
                 "coefficient": "FORBIDDEN"}]})");
  CHECK_FALSE(efficiency_from_json(forbidden).node("x", 1, "a", "u").has_value());
}

}  // TEST_SUITE
