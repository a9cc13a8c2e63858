#ifndef VNEAP_GREEDY_H
#define VNEAP_GREEDY_H

#include <cstdint>
#include <optional>
#include <vector>

#include "vneap/domain.h"

namespace vneap {

struct ResidualState {
  std::vector<double> node;
  std::vector<double> arc;

  static ResidualState FromNetwork(const SubstrateNetwork& net);
};

struct MinvCandidate {
  std::vector<int> node_map;
  std::vector<std::vector<int>> link_map;
  double cost = 0;
};

// Cheapest embedding of one alternative rooted at `origin` that fits the
// residual capacities. Each virtual link is routed over a min-cost path
// (arc weight demand * size * coefficient * cost) and the placement of every
// subtree is chosen by dynamic programming over the tree.
std::optional<MinvCandidate> minv_embed(const Instance& instance, int app,
                                        int alternative, int origin,
                                        double demand,
                                        const ResidualState& residual);

struct GreedyResult {
  std::vector<IntegralEmbedding> embeddings;  // indexed by request id
  std::vector<size_t> order;                  // processing order
  std::vector<double> chosen_cost;            // per request, 0 if rejected
};

GreedyResult greedy_embed_all(const Instance& instance,
                              const std::vector<ResolvedRequest>& requests,
                              uint64_t order_seed);

}  // namespace vneap

#endif  // VNEAP_GREEDY_H
