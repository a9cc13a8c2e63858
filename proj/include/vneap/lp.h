#ifndef VNEAP_LP_H
#define VNEAP_LP_H

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "vneap/formulation.h"

namespace vneap {

enum class SolveStatus {
  kOptimal,
  kInfeasible,
  kUnbounded,
  kIterationLimit,
  kTimeLimit,
};

const char* SolveStatusName(SolveStatus status);

struct SolveOptions {
  double feasibility_tolerance = 1e-7;
  double optimality_tolerance = 1e-7;
  int64_t iteration_limit = 1'000'000;
  double time_limit_seconds = 0;  // 0 = none
  uint64_t seed = 0;              // unused by the deterministic simplex
  int refactor_interval = 100;
  size_t max_binaries = 40;       // solve_milp_exact refuses above this
};

struct SolveStats {
  int64_t iterations = 0;
  int64_t phase1_iterations = 0;
  int64_t refactorizations = 0;
  int64_t bland_pivots = 0;
  int64_t nodes = 0;  // branch-and-bound nodes
  double seconds = 0;
};

struct Solution {
  SolveStatus status = SolveStatus::kInfeasible;
  double objective = 0;  // includes the program's constant offset
  std::vector<double> values;
  // Row duals for continuous solves at optimality (empty otherwise).
  std::vector<double> row_duals;
  SolveStats stats;
};

// Thrown by solve_milp_exact when the binary count exceeds the cap.
class ResourceLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Bounded revised simplex. Binary markers are ignored (bounds are used).
Solution solve_lp(const LinearProgram& lp, const SolveOptions& opts = {});

// Depth-first branch and bound over solve_lp.
Solution solve_milp_exact(const LinearProgram& lp,
                          const SolveOptions& opts = {});

// CPLEX LP text format.
std::string export_lp_text(const LinearProgram& lp);
LinearProgram import_lp_text(const std::string& text);

// Plain `name = value` lines; '#' starts a comment.
std::string export_solution_text(const LinearProgram& lp,
                                 const std::vector<double>& values);
std::map<std::string, double> import_solution_text(const std::string& text);
// Orders imported values by the program's variables; missing names are 0.
std::vector<double> values_for(const LinearProgram& lp,
                               const std::map<std::string, double>& named);

std::string solution_stats_json(const Solution& solution);

}  // namespace vneap

#endif  // VNEAP_LP_H
