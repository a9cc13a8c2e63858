#ifndef VNEAP_VALIDATOR_H
#define VNEAP_VALIDATOR_H

#include <map>
#include <vector>

#include "vneap/domain.h"
#include "vneap/formulation.h"

namespace vneap {

struct LoadVector {
  std::vector<double> node;  // sigma(v)
  std::vector<double> arc;   // sigma(vw)
};

struct CostBreakdown {
  double compute = 0;
  double bandwidth = 0;
  double rejection = 0;
  double total = 0;
};

// Relative slack allowed on capacities: load <= cap + tol * max(1, cap).
inline constexpr double kCapacityTolerance = 1e-6;

// Induced loads of the embedded requests. Malformed embeddings (unknown ids,
// wrong map sizes) throw InputError; use check_feasibility first.
LoadVector compute_loads(const Instance& instance,
                         const std::vector<ResolvedRequest>& requests,
                         const std::vector<IntegralEmbedding>& embeddings);

std::vector<Violation> check_feasibility(
    const Instance& instance, const std::vector<ResolvedRequest>& requests,
    const std::vector<IntegralEmbedding>& embeddings,
    double capacity_tolerance = kCapacityTolerance);

// Throws InputError when the embeddings are infeasible. Requests without an
// embedding count as rejected.
CostBreakdown total_cost(const Instance& instance,
                         const std::vector<ResolvedRequest>& requests,
                         const std::vector<IntegralEmbedding>& embeddings,
                         double psi);

double rejection_rate(const std::vector<ResolvedRequest>& requests,
                      const std::vector<IntegralEmbedding>& embeddings);

// Served demand fraction per alternative index t.
std::map<int, double> alternative_shares(
    const Instance& instance, const std::vector<ResolvedRequest>& requests,
    const std::vector<IntegralEmbedding>& embeddings);

// Cost of a fractional aggregate solution recomputed from its keys.
CostBreakdown fractional_cost(const Instance& instance,
                              const std::vector<AggregatedRequest>& aggregates,
                              const FractionalSolution& y, double psi);
double fractional_rejection_rate(const Instance& instance,
                                 const std::vector<AggregatedRequest>& aggregates,
                                 const FractionalSolution& y);
std::map<int, double> fractional_alternative_shares(
    const Instance& instance, const std::vector<AggregatedRequest>& aggregates,
    const FractionalSolution& y);

// |solver objective - recomputed objective|
double objective_consistency(double solver_objective, const CostBreakdown& recomputed);

}  // namespace vneap

#endif  // VNEAP_VALIDATOR_H
