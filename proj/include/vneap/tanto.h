#ifndef VNEAP_TANTO_H
#define VNEAP_TANTO_H

#include <cstdint>
#include <vector>

#include "vneap/domain.h"
#include "vneap/formulation.h"
#include "vneap/lp.h"
#include "vneap/rng.h"

namespace vneap {

// Normalized comparisons y >= d allow this much slack (1e-9 of the
// aggregate demand in absolute units).
inline constexpr double kRoundingTolerance = 1e-9;

struct RoundingCounters {
  int64_t zero_events = 0;         // rejections that zeroed a Y entry
  int64_t exhausted = 0;           // rejections with no root mass left
  int64_t dead_ends = 0;           // subset of zero_events
  int64_t step_overflows = 0;      // subset of zero_events
  int64_t steps_total = 0;
  int64_t steps_max = 0;           // largest per-request step count

  void Add(const RoundingCounters& o);
};

// Rounds one request against its aggregate's residual slice of Y. `y` is
// indexed like model.lp.variables and is updated in place; only entries of
// `group` are touched.
IntegralEmbedding embed_request(const Instance& instance, const Model& model,
                                size_t group, const ResolvedRequest& request,
                                std::vector<double>& y, Rng& rng,
                                RoundingCounters& counters);

struct TantoOptions {
  SolveOptions lp;
  uint64_t seed = 1;
  int jobs = 1;
};

struct BoundChecks {
  int64_t initial_nonzero_y = 0;
  bool lemma1_ok = true;        // zero_events <= initial_nonzero_y
  double psi_gap = 0;           // Psi(TANTO) - Psi(LP)
  double theorem1_bound = 0;    // psi * d_max * |V| * |E| * |T_A|
  bool theorem1_ok = true;
  int64_t step_bound = 0;       // 4 * |V| * max_t |G^t|
  bool lemma3_ok = true;
};

struct TantoResult {
  Solution lp;                              // aggregate LP solution
  std::vector<AggregatedRequest> aggregates;
  FractionalSolution y;                     // LP solution keyed by aggregate
  std::vector<IntegralEmbedding> embeddings;  // indexed by request id
  std::vector<std::vector<size_t>> processing_order;  // per aggregate
  RoundingCounters counters;
  BoundChecks bounds;
  double rounding_seconds = 0;
};

// Rounding phase only, over a given model and LP values.
TantoResult tanto_round(const Instance& instance,
                        const std::vector<ResolvedRequest>& requests,
                        const Model& model, const std::vector<double>& values,
                        double psi, uint64_t seed, int jobs);

// Aggregate, solve the aggregate LP, round. When the LP is not optimal the
// result carries the status and every request is rejected.
TantoResult tanto(const Instance& instance,
                  const std::vector<ResolvedRequest>& requests, double psi,
                  const TantoOptions& opts);

}  // namespace vneap

#endif  // VNEAP_TANTO_H
