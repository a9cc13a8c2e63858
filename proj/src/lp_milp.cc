#include <chrono>
#include <cmath>
#include <limits>

#include "vneap/lp.h"

namespace vneap {

namespace {

constexpr double kIntegralityTolerance = 1e-6;

struct BranchAndBound {
  const SolveOptions& opts;
  LinearProgram work;
  std::vector<int> binaries;
  Solution best;
  bool have_incumbent = false;
  SolveStats stats;
  bool limit_hit = false;
  SolveStatus limit_status = SolveStatus::kIterationLimit;
  std::chrono::steady_clock::time_point start;

  void Explore() {
    ++stats.nodes;
    SolveOptions node_opts = opts;
    node_opts.iteration_limit = opts.iteration_limit - stats.iterations;
    if (node_opts.iteration_limit <= 0) {
      limit_hit = true;
      return;
    }
    if (opts.time_limit_seconds > 0) {
      double elapsed = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - start)
                           .count();
      if (elapsed > opts.time_limit_seconds) {
        limit_hit = true;
        limit_status = SolveStatus::kTimeLimit;
        return;
      }
      node_opts.time_limit_seconds = opts.time_limit_seconds - elapsed;
    }
    Solution relaxed = solve_lp(work, node_opts);
    stats.iterations += relaxed.stats.iterations;
    stats.refactorizations += relaxed.stats.refactorizations;
    stats.bland_pivots += relaxed.stats.bland_pivots;
    if (relaxed.status == SolveStatus::kInfeasible) return;
    if (relaxed.status != SolveStatus::kOptimal) {
      limit_hit = true;
      limit_status = relaxed.status;
      return;
    }
    const double gap = 1e-9 * (1 + std::fabs(best.objective));
    if (have_incumbent && relaxed.objective >= best.objective - gap) return;

    // Most fractional binary, lowest index on ties.
    int pick = -1;
    double frac_best = kIntegralityTolerance;
    for (int j : binaries) {
      double v = relaxed.values[j];
      double frac = std::min(v - std::floor(v), std::ceil(v) - v);
      if (frac > frac_best + 1e-12) {
        frac_best = frac;
        pick = j;
      }
    }
    if (pick < 0) {
      for (int j : binaries) relaxed.values[j] = std::round(relaxed.values[j]);
      relaxed.objective = work.evaluate(relaxed.values);
      if (!have_incumbent || relaxed.objective < best.objective - gap) {
        best = relaxed;
        have_incumbent = true;
      }
      return;
    }
    const double lo = work.variables[pick].lower;
    const double up = work.variables[pick].upper;
    const bool up_first = relaxed.values[pick] >= 0.5;
    for (int side = 0; side < 2 && !limit_hit; ++side) {
      const bool fix_one = (side == 0) == up_first;
      work.variables[pick].lower = fix_one ? 1 : 0;
      work.variables[pick].upper = fix_one ? 1 : 0;
      Explore();
    }
    work.variables[pick].lower = lo;
    work.variables[pick].upper = up;
  }
};

}  // namespace

Solution solve_milp_exact(const LinearProgram& lp, const SolveOptions& opts) {
  const size_t count = lp.binary_count();
  if (count > opts.max_binaries) {
    throw ResourceLimitError("exact MILP refused: " + std::to_string(count) +
                             " binary variables exceed the cap of " +
                             std::to_string(opts.max_binaries));
  }
  if (count == 0) return solve_lp(lp, opts);

  BranchAndBound bb{opts, lp, {}, {}, false, {}, false,
                    SolveStatus::kIterationLimit,
                    std::chrono::steady_clock::now()};
  for (size_t j = 0; j < lp.variables.size(); ++j) {
    if (!lp.variables[j].binary) continue;
    bb.binaries.push_back(static_cast<int>(j));
    bb.work.variables[j].lower = std::max(0.0, lp.variables[j].lower);
    bb.work.variables[j].upper = std::min(1.0, lp.variables[j].upper);
  }
  bb.best.objective = std::numeric_limits<double>::infinity();
  bb.Explore();

  Solution out;
  if (bb.limit_hit) {
    out = bb.have_incumbent ? bb.best : Solution{};
    out.status = bb.limit_status;
  } else if (bb.have_incumbent) {
    out = bb.best;
    out.status = SolveStatus::kOptimal;
  } else {
    out.status = SolveStatus::kInfeasible;
  }
  out.row_duals.clear();
  out.stats.iterations = bb.stats.iterations;
  out.stats.refactorizations = bb.stats.refactorizations;
  out.stats.bland_pivots = bb.stats.bland_pivots;
  out.stats.nodes = bb.stats.nodes;
  out.stats.seconds = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - bb.start)
                          .count();
  return out;
}

}  // namespace vneap
