#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "test_util.h"
#include "vneap/io.h"

using namespace vneap;
using namespace vneap::testing;

namespace {

namespace fs = std::filesystem;

fs::path Scratch() {
  fs::path dir = fs::temp_directory_path() / "vneap_cli_test";
  fs::create_directories(dir);
  return dir;
}

int Run(const std::string& args) {
  std::string cmd = std::string(VNEAP_CLI) + " " + args + " 2>/dev/null";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string Toy(const std::string& file) { return DataPath("scenarios/toy/" + file); }

std::string SolveArgs(const std::string& requests, const std::string& algo,
                      const fs::path& out) {
  return "solve --substrate " + Toy("substrate.json") + " --apps " +
         Toy("apps.json") + " --requests " + Toy(requests) + " --algo " + algo +
         " --out " + out.string();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("ingest writes a tiered substrate") {
  fs::path out = Scratch() / "arnes.json";
  REQUIRE(Run("ingest --graphml " + DataPath("topologies/Arnes.graphml") +
              " --out " + out.string()) == 0);
  SubstrateNetwork net = substrate_from_json(read_json_file(out.string()));
  CHECK(net.node_count() == 34);
  CHECK(net.arc_count() == 92);
  for (const SubstrateNode& n : net.nodes()) CHECK(n.tier.has_value());
}

TEST_CASE("input problems exit with 2") {
  fs::path bad = Scratch() / "bad.graphml";
  write_text_file(bad.string(), "<graphml>\n<graph>\n<node id=\"a\">\n");
  CHECK(Run("ingest --graphml " + bad.string() + " --out " +
            (Scratch() / "x.json").string()) == 2);
  CHECK(Run("ingest --graphml /nonexistent.graphml --out x.json") == 2);
  CHECK(Run("solve --substrate " + Toy("apps.json") + " --apps " + Toy("apps.json") +
            " --requests " + Toy("requests_1.json") + " --algo lp --out " +
            (Scratch() / "x.json").string()) == 2);
  CHECK(Run(SolveArgs("requests_1.json", "annealing", Scratch() / "x.json")) == 2);
  CHECK(Run("frobnicate") == 2);
}

TEST_CASE("solve reports the toy optimum and exit codes") {
  fs::path out = Scratch() / "lp.json";
  REQUIRE(Run(SolveArgs("requests_100.json", "lp", out)) == 0);
  Json j = read_json_file(out.string());
  CHECK(j["metrics"]["total_cost"].get<double>() == doctest::Approx(20500));
  CHECK(j["status"] == "ok");

  fs::path v2 = Scratch() / "vnep2.json";
  REQUIRE(Run(SolveArgs("requests_100.json", "vnep:2", v2)) == 0);
  Json k = read_json_file(v2.string());
  CHECK(k["metrics"]["share_t2"].get<double>() == doctest::Approx(1));
  CHECK_FALSE(k["metrics"].contains("share_t1"));
  for (const auto& [name, value] : k["fractional"].items()) {
    CHECK(name.find("_t2_") != std::string::npos);
  }

  fs::path milp = Scratch() / "milp.json";
  CHECK(Run(SolveArgs("requests_1.json", "milp", milp)) == 0);
  CHECK(read_json_file(milp.string())["metrics"]["total_cost"].get<double>() ==
        doctest::Approx(205));
  CHECK(Run(SolveArgs("requests_100.json", "milp", milp)) == 4);

  fs::path lp_text = Scratch() / "model.lp";
  CHECK(Run(SolveArgs("requests_1.json", "lp", out) + " --lp-out " +
            lp_text.string()) == 0);
  CHECK(read_text_file(lp_text.string()).find("Subject To") != std::string::npos);
}

TEST_CASE("solve is deterministic for a fixed seed") {
  fs::path a = Scratch() / "t1.json", b = Scratch() / "t2.json";
  std::string args = "--substrate " + Toy("substrate_link5000.json") + " --apps " +
                     Toy("apps.json") + " --requests " + Toy("requests_100.json") +
                     " --algo tanto --seed 1 --out ";
  REQUIRE(Run("--jobs 1 solve " + args + a.string()) == 0);
  REQUIRE(Run("--jobs 4 solve " + args + b.string()) == 0);
  CHECK(read_text_file(a.string()) == read_text_file(b.string()));
}

TEST_CASE("generate, calibrate, compare and report") {
  fs::path dir = Scratch();
  fs::path net = dir / "desk.json", reqs = dir / "reqs.json", cal = dir / "cal.json";
  REQUIRE(Run("ingest --graphml " + DataPath("topologies/desk10.graphml") +
              " --out " + net.string()) == 0);
  REQUIRE(Run("generate --substrate " + net.string() + " --apps " +
              DataPath("catalogs/cctv.json") + " --count 50 --origin-cap none --seed 3 --out " +
              reqs.string()) == 0);
  CHECK(requests_from_json(read_json_file(reqs.string())).size() == 50);
  REQUIRE(Run("calibrate --substrate " + net.string() + " --apps " +
              DataPath("catalogs/cctv.json") + " --requests " + reqs.string() +
              " --node-tu 0.5 --out " + cal.string()) == 0);
  CHECK(substrate_from_json(read_json_file(cal.string())).node_count() == 10);

  fs::path out = dir / "cmp";
  REQUIRE(Run("compare --scenario " + DataPath("scenarios/desk/scenario.json") +
              " --repetitions 3 --out " + out.string()) == 0);
  Json rows = read_json_file((out / "rows.json").string());
  CHECK(rows.size() == 3 * 5);
  CHECK(fs::exists(out / "summary.csv"));
  CHECK(fs::exists(out / "timings.csv"));
  REQUIRE(Run("report --rows " + (out / "rows.json").string() + " --out " +
              (dir / "summary.csv").string()) == 0);
  CHECK(read_text_file((dir / "summary.csv").string()) ==
        read_text_file((out / "summary.csv").string()));

  fs::path toy = dir / "toy";
  REQUIRE(Run("compare --scenario " + Toy("scenario_link5000.json") + " --out " +
              toy.string()) == 0);
  CHECK(read_text_file((toy / "rows.csv").string()) ==
        read_text_file(std::string(VNEAP_TESTS_DIR) + "/golden/toy_link5000_rows.csv"));
}

}  // TEST_SUITE
