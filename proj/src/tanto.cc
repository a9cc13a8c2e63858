#include "vneap/tanto.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

#include <spdlog/spdlog.h>

namespace vneap {

void RoundingCounters::Add(const RoundingCounters& o) {
  zero_events += o.zero_events;
  exhausted += o.exhausted;
  dead_ends += o.dead_ends;
  step_overflows += o.step_overflows;
  steps_total += o.steps_total;
  steps_max = std::max(steps_max, o.steps_max);
}

namespace {

// Consumption log of one request, so that a rejection can undo it.
class Walk {
 public:
  Walk(std::vector<double>& y, double d, std::vector<int>& consumed)
      : y_(y), d_(d), consumed_(consumed) {
    consumed_.clear();
  }

  // Takes d from y[var]. On shortage zeroes y[var] and undoes the walk.
  bool Consume(int var) {
    if (y_[var] + kRoundingTolerance < d_) {
      Abort(var);
      return false;
    }
    y_[var] = std::max(0.0, y_[var] - d_);
    consumed_.push_back(var);
    return true;
  }

  // Zeroes `var` and restores every other entry consumed for this request.
  void Abort(int var) {
    y_[var] = 0;
    for (int c : consumed_) {
      if (c != var) y_[c] += d_;
    }
    consumed_.clear();
  }

  int last() const { return consumed_.empty() ? -1 : consumed_.back(); }

 private:
  std::vector<double>& y_;
  double d_;
  std::vector<int>& consumed_;
};

// Per-thread buffers reused across requests.
struct Scratch {
  std::vector<double> alt_weights;
  std::vector<double> options;
  std::vector<int> option_var;
  std::vector<int> consumed;
};

double Weight(const std::vector<double>& y, int var) {
  return var >= 0 ? std::max(0.0, y[var]) : 0.0;
}

}  // namespace

IntegralEmbedding embed_request(const Instance& instance, const Model& model,
                                size_t group, const ResolvedRequest& request,
                                std::vector<double>& y, Rng& rng,
                                RoundingCounters& counters) {
  const SubstrateNetwork& net = instance.net();
  const AggregatedRequest& agg = model.groups[group];
  const auto& index = model.index[group];
  IntegralEmbedding rejected = IntegralEmbedding::Rejected(request.id);
  int64_t steps = 1;
  auto finish = [&](IntegralEmbedding e) {
    counters.steps_total += steps;
    counters.steps_max = std::max(counters.steps_max, steps);
    return e;
  };

  thread_local Scratch scratch;
  const double d = request.demand / agg.demand;
  std::vector<double>& alt_weights = scratch.alt_weights;
  alt_weights.assign(index.size(), 0);
  double mass = 0;
  for (size_t p = 0; p < index.size(); ++p) {
    alt_weights[p] = Weight(y, index[p].root);
    mass += alt_weights[p];
  }
  if (!(mass > 0)) {
    ++counters.exhausted;
    return finish(rejected);
  }
  const int pos = static_cast<int>(weighted_random_select(alt_weights, rng));
  const GroupAlternativeIndex& idx = index[pos];
  const AlternativeTopology& alt = instance.alternative(agg.app, pos);
  const AlternativeLayout& lay = instance.layout(agg.app, pos);

  Walk walk(y, d, scratch.consumed);
  if (!walk.Consume(idx.root)) {
    ++counters.zero_events;
    return finish(rejected);
  }
  IntegralEmbedding e;
  e.request = request.id;
  e.alternative = pos;
  e.node_map.assign(alt.nodes.size(), -1);
  e.link_map.assign(alt.links.size(), {});
  e.node_map[lay.root] = agg.origin;

  const int step_cap = static_cast<int>(net.node_count());
  std::vector<double>& options = scratch.options;
  std::vector<int>& option_var = scratch.option_var;
  for (int l : lay.preorder) {
    const int child = lay.link_child[l];
    int v = e.node_map[lay.link_parent[l]];
    int entry = idx.node_vars[lay.link_parent[l]][v];
    for (int iter = 0;; ++iter) {
      ++steps;
      if (iter >= step_cap) {
        // The walk is circling; give up on this request.
        walk.Abort(walk.last());
        ++counters.zero_events;
        ++counters.step_overflows;
        return finish(rejected);
      }
      options.clear();
      option_var.clear();
      options.push_back(Weight(y, idx.node_vars[child][v]));
      option_var.push_back(idx.node_vars[child][v]);
      for (int a : net.out_arcs(v)) {
        options.push_back(Weight(y, idx.link_vars[l][a]));
        option_var.push_back(idx.link_vars[l][a]);
      }
      double n = 0;
      for (double w : options) n += w;
      if (!(n > 0)) {
        walk.Abort(entry);
        ++counters.zero_events;
        ++counters.dead_ends;
        return finish(rejected);
      }
      const size_t pick = weighted_random_select(options, rng);
      const int var = option_var[pick];
      if (!walk.Consume(var)) {
        ++counters.zero_events;
        return finish(rejected);
      }
      if (pick == 0) {
        e.node_map[child] = v;
        break;
      }
      const int arc = net.out_arcs(v)[pick - 1];
      e.link_map[l].push_back(arc);
      entry = var;
      v = net.arc_dst(arc);
    }
  }
  return finish(e);
}

TantoResult tanto_round(const Instance& instance,
                        const std::vector<ResolvedRequest>& requests,
                        const Model& model, const std::vector<double>& values,
                        double psi, uint64_t seed, int jobs) {
  const auto start = std::chrono::steady_clock::now();
  TantoResult out;
  out.aggregates = model.groups;
  out.y = fractional_from_values(model, values);
  out.embeddings.resize(requests.size());
  for (size_t r = 0; r < requests.size(); ++r) {
    if (requests[r].id != r) throw InputError("request ids must equal their positions");
    out.embeddings[r] = IntegralEmbedding::Rejected(r);
  }

  std::vector<double> y(values.size());
  for (size_t j = 0; j < values.size(); ++j) y[j] = std::clamp(values[j], 0.0, 1.0);
  out.bounds.initial_nonzero_y = std::count_if(
      y.begin(), y.end(), [](double v) { return v > 0; });

  const size_t groups = model.groups.size();
  out.processing_order.resize(groups);
  std::vector<RoundingCounters> counters(groups);
  auto work = [&](size_t g) {
    const AggregatedRequest& agg = model.groups[g];
    Rng rng = Rng::Derive(seed, "tanto:" + instance.net().nodes()[agg.origin].id +
                                    ":" + instance.apps().app(agg.app).id);
    std::vector<size_t> order = agg.members;
    rng.shuffle(order);
    for (size_t id : order) {
      out.embeddings[id] =
          embed_request(instance, model, g, requests.at(id), y, rng, counters[g]);
    }
    out.processing_order[g] = std::move(order);
  };
  // Aggregates own disjoint slices of y and of the output, so workers only
  // need a static partition.
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(groups)));
  if (workers <= 1) {
    for (size_t g = 0; g < groups; ++g) work(g);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (size_t g = w; g < groups; g += workers) work(g);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (const auto& c : counters) out.counters.Add(c);

  // Bound checks.
  BoundChecks& b = out.bounds;
  b.lemma1_ok = out.counters.zero_events <= b.initial_nonzero_y;
  double d_max = 0, lp_rejected = 0, rejected = 0;
  for (const ResolvedRequest& r : requests) d_max = std::max(d_max, r.demand);
  for (size_t g = 0; g < groups; ++g) {
    double root = 0;
    for (const auto& idx : model.index[g]) root += std::clamp(values[idx.root], 0.0, 1.0);
    lp_rejected += model.groups[g].demand * std::max(0.0, 1 - root);
  }
  for (const auto& e : out.embeddings) {
    if (e.rejected()) rejected += requests[e.request].demand;
  }
  b.psi_gap = psi * (rejected - lp_rejected);
  b.theorem1_bound = psi * d_max * static_cast<double>(instance.net().node_count()) *
                     static_cast<double>(instance.net().arc_count()) *
                     static_cast<double>(instance.total_alternative_size());
  b.theorem1_ok = b.psi_gap <= b.theorem1_bound + 1e-9 * (1 + b.theorem1_bound);
  size_t max_alt = 0;
  for (size_t a = 0; a < instance.apps().size(); ++a) {
    max_alt = std::max(max_alt, instance.max_alternative_size(static_cast<int>(a)));
  }
  b.step_bound = 4 * static_cast<int64_t>(instance.net().node_count()) *
                 static_cast<int64_t>(max_alt);
  b.lemma3_ok = out.counters.steps_max <= b.step_bound;
  out.rounding_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

TantoResult tanto(const Instance& instance,
                  const std::vector<ResolvedRequest>& requests, double psi,
                  const TantoOptions& opts) {
  std::vector<AggregatedRequest> aggregates = aggregate_requests(requests);
  Model model = build_relaxed_aggregate_lp(instance, aggregates, psi);
  Solution lp = solve_lp(model.lp, opts.lp);
  spdlog::info("tanto: {} aggregates, {} LP variables, LP {} in {} iterations",
               aggregates.size(), model.lp.variables.size(),
               SolveStatusName(lp.status), lp.stats.iterations);
  if (lp.status != SolveStatus::kOptimal) {
    TantoResult out;
    out.lp = std::move(lp);
    out.aggregates = std::move(aggregates);
    for (size_t r = 0; r < requests.size(); ++r) {
      out.embeddings.push_back(IntegralEmbedding::Rejected(r));
    }
    return out;
  }
  TantoResult out = tanto_round(instance, requests, model, lp.values, psi,
                                opts.seed, opts.jobs);
  out.lp = std::move(lp);
  return out;
}

}  // namespace vneap
