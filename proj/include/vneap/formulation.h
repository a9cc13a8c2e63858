#ifndef VNEAP_FORMULATION_H
#define VNEAP_FORMULATION_H

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "vneap/domain.h"

namespace vneap {

enum class Sense { kLessEqual, kEqual, kGreaterEqual };

enum class VarKind { kNode, kLink };

// Identifies one placement variable: virtual node `element` on substrate
// node `substrate`, or virtual link `element` on arc `substrate`. `group` is
// the request (MILP) or aggregate (aggregate LP) the variable belongs to and
// `alternative` the position of the alternative inside its application.
struct VariableKey {
  size_t group = 0;
  int alternative = 0;
  VarKind kind = VarKind::kNode;
  int element = 0;
  int substrate = 0;

  friend bool operator==(const VariableKey&, const VariableKey&) = default;
  friend auto operator<=>(const VariableKey&, const VariableKey&) = default;
};

struct Variable {
  std::string name;
  double lower = 0;
  double upper = 1;
  bool binary = false;
  VariableKey key;
};

struct Constraint {
  std::string name;
  std::vector<std::pair<int, double>> terms;  // (variable, coefficient)
  Sense sense = Sense::kLessEqual;
  double rhs = 0;
};

struct LinearProgram {
  std::vector<Variable> variables;
  std::vector<double> objective;  // dense, one per variable
  double objective_offset = 0;
  std::vector<Constraint> constraints;

  size_t binary_count() const;
  // Same program with every binary marker dropped (bounds stay [0,1]).
  LinearProgram relaxed() const;
  double evaluate(const std::vector<double>& values) const;
};

// One (origin, application) demand bucket. For the per-request MILP every
// request is its own group with a single member.
struct AggregatedRequest {
  int origin = -1;
  int app = -1;
  double demand = 0;
  std::vector<size_t> members;  // ResolvedRequest ids
};

// Variable positions of one (group, alternative) pair; -1 when the variable
// was not instantiated (FORBIDDEN or unreachable).
struct GroupAlternativeIndex {
  int root = -1;
  std::vector<std::vector<int>> node_vars;  // [vnode][substrate node]
  std::vector<std::vector<int>> link_vars;  // [vlink][arc]
};

struct Model {
  LinearProgram lp;
  std::vector<AggregatedRequest> groups;
  std::vector<std::vector<GroupAlternativeIndex>> index;  // [group][alt pos]
  double psi = 0;
};

// One aggregate per distinct (origin, app), ordered by (origin, app).
std::vector<AggregatedRequest> aggregate_requests(
    const std::vector<ResolvedRequest>& requests);

// Binary program with one variable family per request.
Model build_milp(const Instance& instance,
                 const std::vector<ResolvedRequest>& requests, double psi);

// Continuous program over aggregated demand; size does not depend on the
// number of requests.
Model build_relaxed_aggregate_lp(const Instance& instance,
                                 const std::vector<AggregatedRequest>& aggregates,
                                 double psi);

// Shared builder behind both entry points.
Model build_model(const Instance& instance,
                  const std::vector<AggregatedRequest>& groups, double psi,
                  bool binary);

// Fractional values keyed by variable. `group` in each key is an aggregate
// index for Y and a request id for the per-request split.
struct FractionalSolution {
  std::vector<VariableKey> keys;
  std::vector<double> values;
  double objective = 0;

  double value(const VariableKey& key) const;  // 0 when absent
};

FractionalSolution fractional_from_values(const Model& model,
                                          const std::vector<double>& values);

// Each member r of aggregate g gets x = y * d(r) / d(g). The result is in
// aggregate-share units: member r carries x * d(g) = y * d(r) demand.
FractionalSolution split_solution(
    const FractionalSolution& aggregate_solution,
    const std::vector<AggregatedRequest>& aggregates,
    const std::vector<ResolvedRequest>& requests);

// Inverse of split_solution: y = sum of member values.
FractionalSolution merge_solution(
    const FractionalSolution& request_solution,
    const std::vector<AggregatedRequest>& aggregates,
    const std::vector<ResolvedRequest>& requests);

// Catalog where every application keeps only alternative index t.
AppCatalog restrict_to_alternative(const AppCatalog& apps, int t);

// Efficiency entries of alternative t only, matching restrict_to_alternative.
EfficiencyMap restrict_efficiency(const EfficiencyMap& efficiency, int t);

// Per-unit cost of collocating the main alternative on the most expensive
// edge datacenter, maximised over applications.
double compute_rejection_penalty(const Instance& instance);

// Reads integral embeddings out of a solved per-request model. Values are
// rounded at 0.5. Groups must be single-member.
std::vector<IntegralEmbedding> extract_embeddings(
    const Instance& instance, const Model& model,
    const std::vector<double>& values);

}  // namespace vneap

#endif  // VNEAP_FORMULATION_H
