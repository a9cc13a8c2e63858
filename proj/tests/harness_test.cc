#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "doctest.h"
#include "test_util.h"
#include "vneap/harness.h"
#include "vneap/io.h"
#include "vneap/report.h"

using namespace vneap;
using namespace vneap::testing;

namespace {

RawTopology Graph(int n, const std::vector<std::pair<int, int>>& edges) {
  RawTopology t;
  for (int i = 0; i < n; ++i) t.nodes.push_back({"n" + std::to_string(i), {}});
  for (auto [a, b] : edges) {
    t.edges.push_back({"n" + std::to_string(a), "n" + std::to_string(b)});
  }
  return t;
}

AppCatalog Cctv() {
  return catalog_from_json(read_json_file(DataPath("catalogs/cctv.json")));
}

SubstrateNetwork Arnes(const TierParams& params = {}) {
  RawTopology topo = ingest_graphml(DataPath("topologies/Arnes.graphml"));
  return assign_costs_capacities(topo, classify_tiers(topo), params);
}

// Share of requests at the top tenth of origins (at least one origin).
double TopDecileShare(const std::vector<Request>& reqs) {
  std::map<std::string, double> per;
  for (const Request& r : reqs) per[r.origin] += 1;
  std::vector<double> counts;
  for (const auto& [o, c] : per) counts.push_back(c);
  std::sort(counts.rbegin(), counts.rend());
  size_t top = std::max<size_t>(1, counts.size() / 10);
  return std::accumulate(counts.begin(), counts.begin() + top, 0.0) / reqs.size();
}

ScenarioConfig ToyScenario(const std::string& file) {
  return load_scenario(DataPath("scenarios/toy/" + file));
}

ScenarioConfig DeskScenario() {
  ScenarioConfig c = load_scenario(DataPath("scenarios/desk/scenario.json"));
  c.requests.count = 60;
  c.calibration_requests = 60;
  return c;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("GraphML topologies load with their attributes") {
  RawTopology arnes = ingest_graphml(DataPath("topologies/Arnes.graphml"));
  CHECK(arnes.nodes.size() == 34);
  CHECK(arnes.edges.size() == 46);
  CHECK(arnes.nodes[0].attributes.count("label") == 1);
  CHECK(arnes.nodes[0].attributes.count("Latitude") == 1);
  // The available Amres conversion has 21 nodes and 20 links.
  RawTopology amres = ingest_graphml(DataPath("topologies/Amres.graphml"));
  CHECK(amres.nodes.size() == 21);
  CHECK(amres.edges.size() == 20);
}

TEST_CASE("GraphML errors carry a location") {
  CHECK_THROWS_AS(parse_graphml("<graphml><graph></graph></graphml>", "empty"),
                  InputError);
  try {
    parse_graphml("<graphml>\n<graph>\n<node id=\"a\">\n</graph>", "bad.graphml");
    FAIL("expected a parse error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("bad.graphml:4") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_graphml("<graphml><graph><node id=\"a\"/>"
                                "<edge source=\"a\" target=\"b\"/></graph></graphml>",
                                "x"),
                  InputError);
  RawTopology merged = parse_graphml(
      "<graphml><graph><node id=\"a\"/><node id=\"b\"/>"
      "<edge source=\"a\" target=\"b\"/><edge source=\"b\" target=\"a\"/>"
      "<edge source=\"a\" target=\"a\"/></graph></graphml>",
      "x");
  CHECK(merged.edges.size() == 1);
}

TEST_CASE("natural breaks on known clusters") {
  std::vector<double> v{1, 2, 3, 10, 11, 12, 30, 31};
  std::vector<double> w(v.size(), 1);
  CHECK(jenks_classes(v, w, 3) == std::vector<int>{0, 0, 0, 1, 1, 1, 2, 2});
  // Weights pull the break: many 1s and one 2 and 3 against a lone 9.
  CHECK(jenks_classes({1, 2, 3, 9}, {50, 1, 1, 1}, 2) ==
        std::vector<int>{0, 0, 0, 1});
  CHECK(jenks_classes({4}, {3}, 3) == std::vector<int>{0});
}

TEST_CASE("star and path graphs get two tiers") {
  TierAssignment star = classify_tiers(Graph(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}));
  CHECK(star.classes == 2);
  CHECK(star.node[0] == Tier::kCore);
  for (int i = 1; i < 5; ++i) CHECK(star.node[i] == Tier::kEdge);
  for (Tier t : star.link) CHECK(t == Tier::kEdge);
  CHECK_FALSE(star.warnings.empty());

  TierAssignment path = classify_tiers(Graph(3, {{0, 1}, {1, 2}}));
  CHECK(path.node[0] == Tier::kEdge);
  CHECK(path.node[1] != Tier::kEdge);
  CHECK(path.node[2] == Tier::kEdge);

  TierAssignment ring = classify_tiers(Graph(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}));
  CHECK(ring.classes == 1);
  for (Tier t : ring.node) CHECK(t == Tier::kEdge);
}

TEST_CASE("Arnes tiers match the stored snapshot") {
  RawTopology topo = ingest_graphml(DataPath("topologies/Arnes.graphml"));
  TierAssignment tiers = classify_tiers(topo);
  Json golden = read_json_file(std::string(VNEAP_TESTS_DIR) + "/golden/arnes_tiers.json");
  CHECK(tiers.classes == 3);
  for (size_t i = 0; i < topo.nodes.size(); ++i) {
    CAPTURE(topo.nodes[i].id);
    CHECK(golden["tiers"][topo.nodes[i].id].get<std::string>() ==
          TierName(tiers.node[i]));
  }
  // A link is as low as its lowest endpoint.
  std::map<std::string, Tier> by_id;
  for (size_t i = 0; i < topo.nodes.size(); ++i) by_id[topo.nodes[i].id] = tiers.node[i];
  for (size_t e = 0; e < topo.edges.size(); ++e) {
    CHECK(tiers.link[e] == std::min(by_id[topo.edges[e].src], by_id[topo.edges[e].dst]));
  }
}

TEST_CASE("costs and capacities follow the tier ratios") {
  SubstrateNetwork net = Arnes();
  for (const SubstrateNode& n : net.nodes()) {
    double cost = n.tier == Tier::kEdge ? 0.09 : n.tier == Tier::kTransport ? 0.03 : 0.01;
    double cap = n.tier == Tier::kEdge ? 1 : n.tier == Tier::kTransport ? 3 : 9;
    CHECK(n.cost == doctest::Approx(cost).epsilon(1e-12));
    CHECK(n.capacity == doctest::Approx(cap).epsilon(1e-12));
  }
  for (const SubstrateArc& a : net.arcs()) {
    if (a.tier == Tier::kEdge) CHECK(a.cost == doctest::Approx(0.02));
    if (a.tier == Tier::kCore) CHECK(a.cost == doctest::Approx(0.01));
  }
  TierParams flat;
  flat.cost_ratio = flat.capacity_ratio = flat.link_cost_ratio = 1;
  SubstrateNetwork uniform = Arnes(flat);
  for (const SubstrateNode& n : uniform.nodes()) {
    CHECK(n.cost == doctest::Approx(0.09));
    CHECK(n.capacity == 1);
  }
}

TEST_CASE("request generation") {
  SubstrateNetwork net = Arnes();
  AppCatalog apps = Cctv();
  RequestParams p;
  p.count = 4000;
  p.origin_cap = OriginCap::kNone;
  GeneratedRequests a = generate_requests(net, apps, p, 5);
  GeneratedRequests b = generate_requests(net, apps, p, 5);
  REQUIRE(a.requests.size() == 4000);
  CHECK(requests_to_json(a.requests) == requests_to_json(b.requests));
  double sum = 0;
  for (const Request& r : a.requests) {
    sum += r.demand;
    CHECK(r.demand >= 0.1);
    CHECK(net.nodes()[*net.node_index(r.origin)].tier == Tier::kEdge);
  }
  CHECK(std::fabs(sum / 4000 - 10) < 3 * 2 / std::sqrt(4000.0));

  RequestParams skew = p;
  skew.spatial = SpatialLaw::kLogNormal;
  GeneratedRequests hot = generate_requests(net, apps, skew, 5);
  CHECK(TopDecileShare(hot.requests) > TopDecileShare(a.requests));

  // With a binding cap the generator stops early and says so.
  RequestParams capped = p;
  capped.origin_cap = OriginCap::kMin;
  GeneratedRequests few = generate_requests(net, apps, capped, 5);
  CHECK(few.requests.size() < 4000);
  CHECK_FALSE(few.warnings.empty());
}

TEST_CASE("calibration hits the target utilization and keeps tier ratios") {
  SubstrateNetwork net = Arnes();
  AppCatalog apps = Cctv();
  RequestParams p;
  p.count = 3000;
  p.origin_cap = OriginCap::kNone;
  std::vector<Request> reqs = generate_requests(net, apps, p, 2).requests;
  double demand = 0;
  for (const Request& r : reqs) demand += r.demand;

  SubstrateNetwork full = calibrate_target_utilization(net, apps, reqs, 1, 1);
  Utilization u = target_utilization(full, apps, reqs);
  CHECK(std::fabs(u.node - 1) < 1e-9);
  CHECK(std::fabs(u.link - 1) < 1e-9);
  double node_cap = 0;
  for (const SubstrateNode& n : full.nodes()) node_cap += n.capacity;
  CHECK(node_cap == doctest::Approx(demand * 105).epsilon(1e-12));

  SubstrateNetwork half = calibrate_target_utilization(net, apps, reqs, 0.5, 1);
  SubstrateNetwork links = calibrate_target_utilization(net, apps, reqs, 1, 0.5);
  for (size_t v = 0; v < net.node_count(); ++v) {
    CHECK(half.nodes()[v].capacity == doctest::Approx(2 * full.nodes()[v].capacity));
    CHECK(links.nodes()[v].capacity == doctest::Approx(full.nodes()[v].capacity));
    CHECK(full.nodes()[v].capacity / net.nodes()[v].capacity ==
          doctest::Approx(full.nodes()[0].capacity / net.nodes()[0].capacity));
  }
  for (size_t a = 0; a < net.arc_count(); ++a) {
    CHECK(links.arcs()[a].capacity == doctest::Approx(2 * full.arcs()[a].capacity));
    CHECK(half.arcs()[a].capacity == doctest::Approx(full.arcs()[a].capacity));
  }
  Utilization hu = target_utilization(half, apps, reqs);
  CHECK(std::fabs(hu.node - 0.5) < 1e-9);
  CHECK_THROWS_AS(calibrate_target_utilization(net, apps, {}, 1, 1), InputError);
  CHECK_THROWS_AS(calibrate_target_utilization(net, apps, reqs, 0, 1), InputError);
}

TEST_CASE("scenario configuration is validated") {
  Json base = read_json_file(DataPath("scenarios/desk/scenario.json"));
  CHECK_NOTHROW(scenario_from_json(base, ""));
  Json bad = base;
  bad["repetitions"] = 0;
  CHECK_THROWS_AS(scenario_from_json(bad, ""), InputError);
  bad = base;
  bad["calibration"]["node_tu"] = 0;
  CHECK_THROWS_AS(scenario_from_json(bad, ""), InputError);
  bad = base;
  bad["algorithms"] = {"simulated-annealing"};
  CHECK_THROWS_AS(scenario_from_json(bad, ""), InputError);
  bad = base;
  bad["substrate"] = "x.json";
  CHECK_THROWS_AS(scenario_from_json(bad, ""), InputError);
  bad = base;
  bad["requests"]["size_sd"] = 0;
  CHECK_THROWS_AS(scenario_from_json(bad, ""), InputError);
}

TEST_CASE("scenario rows: one per repetition and algorithm") {
  ScenarioConfig c = DeskScenario();
  c.repetitions = 1;
  c.algorithms = {"greedy"};
  CHECK(run_scenario(c).rows.size() == 1);

  c.repetitions = 3;
  c.algorithms = {"lp", "tanto"};
  ScenarioResult r = run_scenario(c);
  CHECK(r.rows.size() == 6);
  for (const ReportRow& row : r.rows) {
    CHECK(row.status == "ok");
    const double* rate = row.get("rejection_rate");
    REQUIRE(rate != nullptr);
    CHECK(*rate >= -1e-12);
    CHECK(*rate <= 1 + 1e-12);
    CHECK(*row.get("requests") > 0);
    CHECK(*row.get("requests") <= 60);
  }

  c.repetitions = 30;
  c.algorithms = {"greedy"};
  ScenarioResult many = run_scenario(c, 3);
  CHECK(many.rows.size() == 30);
  for (const SummaryRow& s : many.summary) {
    CHECK(s.n == 30);
    CHECK(s.variance >= 0);
  }
}

TEST_CASE("repetition errors are recorded per row") {
  ScenarioConfig c = DeskScenario();
  c.repetitions = 2;
  c.algorithms = {"greedy", "lp"};
  c.requests.app = "no-such-app";
  c.calibrate = false;
  ScenarioResult r = run_scenario(c);
  REQUIRE(r.rows.size() == 4);
  for (const ReportRow& row : r.rows) CHECK(row.status.rfind("error:", 0) == 0);
}

TEST_CASE("scenario rows are identical across runs and job counts") {
  ScenarioConfig c = DeskScenario();
  c.repetitions = 4;
  std::string one = rows_to_csv(run_scenario(c, 1).rows);
  CHECK(rows_to_csv(run_scenario(c, 1).rows) == one);
  CHECK(rows_to_csv(run_scenario(c, 4).rows) == one);
}

TEST_CASE("toy scenarios reproduce the hand-computed optima") {
  ScenarioResult plain = run_scenario(ToyScenario("scenario.json"));
  for (const ReportRow& row : plain.rows) {
    CAPTURE(row.algorithm);
    if (row.algorithm == "vnep:2") {
      CHECK(*row.get("total_cost") == doctest::Approx(100 * 215));
    } else {
      CHECK(*row.get("total_cost") == doctest::Approx(100 * 205));
    }
  }
  ScenarioResult tight = run_scenario(ToyScenario("scenario_link5000.json"));
  std::string golden = read_text_file(std::string(VNEAP_TESTS_DIR) +
                                      "/golden/toy_link5000_rows.csv");
  CHECK(rows_to_csv(tight.rows) == golden);
  for (const ReportRow& row : tight.rows) {
    if (row.algorithm == "vnep:1") CHECK(*row.get("total_cost") == doctest::Approx(62750));
    if (row.algorithm == "lp") {
      CHECK(*row.get("total_cost") == doctest::Approx(25857.142857142857));
    }
  }
}

TEST_CASE("report rows round-trip and summarize") {
  std::vector<ReportRow> rows;
  for (int k = 0; k < 3; ++k) {
    ReportRow r{"s", k, 7, "greedy", "ok", {}};
    r.set("total_cost", 10 + k);
    rows.push_back(r);
  }
  rows.push_back({"s", 3, 7, "greedy", "error: boom", {}});
  CHECK(rows_to_json(rows_from_json(rows_to_json(rows))) == rows_to_json(rows));
  auto summary = summarize(rows);
  REQUIRE(summary.size() == 1);
  CHECK(summary[0].n == 3);
  CHECK(summary[0].mean == doctest::Approx(11));
  CHECK(summary[0].variance == doctest::Approx(1));
  std::string csv = rows_to_csv(rows);
  CHECK(csv.find("s,0,7,greedy,ok,total_cost,10\n") != std::string::npos);
  CHECK(csv.find("\"error: boom\"") == std::string::npos);
}

}  // TEST_SUITE
