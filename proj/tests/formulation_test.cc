#include <cmath>

#include "doctest.h"
#include "oracle.h"
#include "random_instance.h"
#include "test_util.h"
#include "vneap/formulation.h"
#include "vneap/lp.h"
#include "vneap/validator.h"

using namespace vneap;
using namespace vneap::testing;

namespace {

bool Satisfies(const LinearProgram& lp, const std::vector<double>& x, double tol) {
  for (size_t j = 0; j < x.size(); ++j) {
    if (x[j] < lp.variables[j].lower - tol || x[j] > lp.variables[j].upper + tol) {
      return false;
    }
  }
  for (const Constraint& c : lp.constraints) {
    double lhs = 0;
    for (auto [j, a] : c.terms) lhs += a * x[j];
    double slack = tol * std::max(1.0, std::fabs(c.rhs));
    if (c.sense == Sense::kLessEqual && lhs > c.rhs + slack) return false;
    if (c.sense == Sense::kGreaterEqual && lhs < c.rhs - slack) return false;
    if (c.sense == Sense::kEqual && std::fabs(lhs - c.rhs) > slack) return false;
  }
  return true;
}

bool Close(double a, double b, double rel) {
  return std::fabs(a - b) <= rel * std::max(1.0, std::fabs(b));
}

RandomSpec Tight() {
  RandomSpec s;
  s.max_nodes = 6;
  s.requests = 6;
  s.capacity_scale = 0.15;
  s.forbid_probability = 0.15;
  s.apps = 2;
  return s;
}

}  // namespace

TEST_SUITE("formulation") {

TEST_CASE("toy model has the hand-counted variables and rows") {
  Instance inst = ToyInstance();
  Model m = build_milp(inst, UnitRequests(inst, 1), 1050);
  // G1: theta pinned (1) + A, B on 2 nodes (4) + 2 links on 2 arcs (4) = 9.
  // G2: theta (1) + A, acc, B (6) + 3 links on 2 arcs (6) = 13.
  CHECK(m.lp.variables.size() == 22);
  CHECK(m.lp.binary_count() == 22);
  // Flow rows: 5 links x 2 nodes; one alternative row; 2 node + 2 arc caps.
  CHECK(m.lp.constraints.size() == 10 + 1 + 4);
  CHECK(m.lp.objective_offset == 1050);
  CHECK(m.lp.variables[m.index[0][0].root].name == "y_g0_t1_n0_0");
}

TEST_CASE("forbidden placements remove variables") {
  Instance base = ToyInstance();
  EfficiencyMap eff;
  eff.set_node("toy", 1, "B", "edge", std::nullopt);
  eff.set_link("toy", 2, "acc", "B", "edge", "core", std::nullopt);
  Instance inst(base.net(), base.apps(), eff);
  Model m = build_milp(inst, UnitRequests(inst, 1), 1050);
  CHECK(m.lp.variables.size() == 20);
  CHECK(m.index[0][0].node_vars[2][0] == -1);
  Solution s = solve_milp_exact(m.lp);
  REQUIRE(s.status == SolveStatus::kOptimal);
  CHECK(s.objective == doctest::Approx(205));
}

TEST_CASE("aggregate LP size does not depend on the request count") {
  Instance inst = ToyInstance();
  auto few = aggregate_requests(UnitRequests(inst, 3));
  auto many = aggregate_requests(UnitRequests(inst, 3000));
  REQUIRE(few.size() == 1);
  REQUIRE(many.size() == 1);
  CHECK(many[0].members.size() == 3000);
  Model a = build_relaxed_aggregate_lp(inst, few, 1050);
  Model b = build_relaxed_aggregate_lp(inst, many, 1050);
  CHECK(a.lp.variables.size() == b.lp.variables.size());
  CHECK(a.lp.constraints.size() == b.lp.constraints.size());
  CHECK(b.lp.binary_count() == 0);
}

TEST_CASE("aggregate LP equals the per-request LP relaxation") {
  for (uint64_t seed = 1; seed <= 25; ++seed) {
    CAPTURE(seed);
    RandomCase rc = MakeRandomCase(seed, Tight());
    Instance inst(rc.net, rc.apps, rc.efficiency);
    auto reqs = inst.resolve(rc.requests);
    double psi = compute_rejection_penalty(inst);
    auto aggs = aggregate_requests(reqs);
    Model agg = build_relaxed_aggregate_lp(inst, aggs, psi);
    Model per = build_milp(inst, reqs, psi);
    Solution sa = solve_lp(agg.lp);
    Solution sp = solve_lp(per.lp.relaxed());
    REQUIRE(sa.status == SolveStatus::kOptimal);
    REQUIRE(sp.status == SolveStatus::kOptimal);
    CHECK(Close(sa.objective, sp.objective, 1e-6));

    // Splitting the aggregate optimum gives a feasible per-request point of
    // the same cost, and merging it back recovers the aggregate values.
    FractionalSolution y = fractional_from_values(agg, sa.values);
    FractionalSolution x = split_solution(y, aggs, reqs);
    // Split values are aggregate shares; the per-request program wants the
    // fraction of each request, x * d(g) / d(r).
    std::vector<double> group_demand(reqs.size());
    for (const AggregatedRequest& g : aggs) {
      for (size_t r : g.members) group_demand[r] = g.demand;
    }
    std::vector<double> xv(per.lp.variables.size());
    for (size_t j = 0; j < xv.size(); ++j) {
      const VariableKey& key = per.lp.variables[j].key;
      xv[j] = x.value(key) * group_demand[key.group] / reqs[key.group].demand;
    }
    CHECK(Satisfies(per.lp, xv, 1e-6));
    CHECK(Close(per.lp.evaluate(xv), sa.objective, 1e-6));
    FractionalSolution back = merge_solution(x, aggs, reqs);
    for (size_t k = 0; k < y.keys.size(); ++k) {
      CHECK(back.value(y.keys[k]) == doctest::Approx(y.values[k]).epsilon(1e-12));
    }

    CostBreakdown cost = fractional_cost(inst, aggs, y, psi);
    CHECK(objective_consistency(sa.objective, cost) <=
          1e-6 * std::max(1.0, sa.objective));
  }
}

TEST_CASE("LP bounds MILP and MILP matches the oracle") {
  RandomSpec spec;
  spec.max_nodes = 3;
  spec.requests = 2;
  spec.max_alternatives = 2;
  spec.max_vnodes = 3;
  spec.capacity_scale = 0.05;
  for (uint64_t seed = 1; seed <= 15; ++seed) {
    CAPTURE(seed);
    RandomCase rc = MakeRandomCase(seed, spec);
    Instance inst(rc.net, rc.apps, rc.efficiency);
    auto reqs = inst.resolve(rc.requests);
    double psi = compute_rejection_penalty(inst);
    Model m = build_milp(inst, reqs, psi);
    SolveOptions opts;
    opts.max_binaries = 200;
    Solution milp = solve_milp_exact(m.lp, opts);
    REQUIRE(milp.status == SolveStatus::kOptimal);
    Solution lp = solve_lp(m.lp.relaxed());
    CHECK(lp.objective <= milp.objective + 1e-9 * std::max(1.0, milp.objective));
    CHECK(Close(milp.objective, OracleOptimum(inst, reqs, psi), 1e-9));

    auto embs = extract_embeddings(inst, m, milp.values);
    CHECK(check_feasibility(inst, reqs, embs).empty());
    CHECK(Close(total_cost(inst, reqs, embs, psi).total, milp.objective, 1e-9));
  }
}

TEST_CASE("scaling demand and capacity together scales the LP optimum") {
  RandomCase rc = MakeRandomCase(9, Tight());
  Instance inst(rc.net, rc.apps, rc.efficiency);
  double psi = compute_rejection_penalty(inst);
  Solution base = solve_lp(
      build_relaxed_aggregate_lp(inst, aggregate_requests(inst.resolve(rc.requests)), psi).lp);
  Instance big(rc.net.WithScaledCapacities(8, 8), rc.apps, rc.efficiency);
  std::vector<Request> scaled = rc.requests;
  for (Request& r : scaled) r.demand *= 8;
  Solution s8 = solve_lp(
      build_relaxed_aggregate_lp(big, aggregate_requests(big.resolve(scaled)), psi).lp);
  REQUIRE(base.status == SolveStatus::kOptimal);
  REQUIRE(s8.status == SolveStatus::kOptimal);
  CHECK(Close(s8.objective, 8 * base.objective, 1e-7));
}

TEST_CASE("built models survive LP text export and import") {
  RandomCase rc = MakeRandomCase(4, Tight());
  Instance inst(rc.net, rc.apps, rc.efficiency);
  auto aggs = aggregate_requests(inst.resolve(rc.requests));
  Model m = build_relaxed_aggregate_lp(inst, aggs, compute_rejection_penalty(inst));
  LinearProgram back = import_lp_text(export_lp_text(m.lp));
  CHECK(back.variables.size() == m.lp.variables.size());
  CHECK(back.constraints.size() == m.lp.constraints.size());
  CHECK(Close(solve_lp(back).objective, solve_lp(m.lp).objective, 1e-9));
}

TEST_CASE("restriction keeps the alternative index") {
  Instance inst = ToyInstance();
  AppCatalog only2 = restrict_to_alternative(inst.apps(), 2);
  REQUIRE(only2.app(0).alternatives.size() == 1);
  CHECK(only2.app(0).alternatives[0].index == 2);
  CHECK_THROWS_AS(restrict_to_alternative(inst.apps(), 3), InputError);
}

TEST_CASE("restricted instance keeps only that alternative's efficiency entries") {
  RandomSpec spec;
  spec.forbid_probability = 0.3;
  spec.max_alternatives = 3;
  int restricted = 0;
  for (uint64_t seed = 1; seed <= 40; ++seed) {
    RandomCase rc = MakeRandomCase(seed, spec);
    Instance inst(rc.net, rc.apps, rc.efficiency);
    const int alts = static_cast<int>(rc.apps.app(0).alternatives.size());
    for (int t = 1; t <= alts; ++t) {
      EfficiencyMap eff = restrict_efficiency(inst.efficiency(), t);
      for (const auto& [key, value] : eff.node_entries()) CHECK(std::get<1>(key) == t);
      for (const auto& [key, value] : eff.link_entries()) CHECK(std::get<1>(key) == t);
      Instance single(inst.net(), restrict_to_alternative(inst.apps(), t), eff);
      ++restricted;
    }
  }
  CHECK(restricted > 40);
}

}  // TEST_SUITE
