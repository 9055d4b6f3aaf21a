#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "redistrict/constraints.hpp"
#include "redistrict/graph.hpp"
#include "redistrict/metrics.hpp"
#include "redistrict/rng.hpp"
#include "redistrict/spanning_tree.hpp"

namespace redistrict {

enum class PairSelection {
  UniformPair,  // uniform over adjacent district pairs
  CutEdge,      // pair of a uniformly drawn cut edge
};

enum class StepOutcome { Accepted, RejectedByConstraint, RejectedNoCut, Seed };

std::string_view outcome_name(StepOutcome outcome) noexcept;

struct ChainCounters {
  std::uint64_t proposed = 0;
  std::uint64_t accepted = 0;
  std::uint64_t rejected_by_constraint = 0;
  std::uint64_t rejected_no_cut = 0;

  friend bool operator==(const ChainCounters&, const ChainCounters&) = default;
};

struct ChainState {
  Plan plan;
  SplitReport splits;  // of plan
  std::uint64_t step = 0;
  Rng rng;
  ChainCounters counters;

  ChainState(const PrecinctGraph& graph, Plan seed_plan, std::uint64_t seed);
};

struct RecomOptions {
  double tolerance = 0.02;
  PairSelection pair_selection = PairSelection::UniformPair;
  BipartitionOptions bipartition;
};

struct StepRecord {
  StepOutcome outcome = StepOutcome::Accepted;
  std::optional<SplitReport> proposal;  // absent when no cut was found
  District merged_a = -1, merged_b = -1;
};

/// Adjacent district pairs (a < b), ascending.
std::vector<std::pair<District, District>> adjacent_district_pairs(const PrecinctGraph& graph,
                                                                   const Plan& plan);

/// One recombination step. Merges a random adjacent pair of districts,
/// redraws their boundary with a spanning-tree cut that leaves both parts
/// within tolerance of the ideal district population, and passes the result
/// through the gate. The step index always advances; on rejection the plan
/// repeats. Throws NoAdjacentDistrictPair when k = 1.
StepRecord recom_step(ChainState& state, const PrecinctGraph& graph, const RecomOptions& options,
                      const ConstraintGate& gate);

struct TraceEntry {
  std::uint64_t step = 0;
  std::uint32_t chain = 0;
  StepOutcome outcome = StepOutcome::Accepted;
  MetricsReport metrics;
  std::optional<SplitReport> proposal;
};

struct ChainTrace {
  std::vector<TraceEntry> entries;
  ChainCounters counters;
  SplitReport seed_splits;

  std::size_t size() const noexcept { return entries.size(); }
  bool empty() const noexcept { return entries.empty(); }
};

struct ChainOptions {
  RecomOptions recom;
  ConstraintGate gate;
  /// Re-verify contiguity and balance every n steps (0 disables).
#ifdef NDEBUG
  std::uint64_t validate_every = 1000;
#else
  std::uint64_t validate_every = 1;
#endif
  std::uint32_t chain_id = 0;
  /// Called with the post-step plan of every step.
  std::function<void(const Plan&, const TraceEntry&)> observer;
};

/// Throws InvalidSeedPlan naming the failed check (labels, contiguity,
/// balance, gate).
void validate_seed_plan(const PrecinctGraph& graph, const Plan& plan, double tolerance,
                        const ConstraintGate& gate);

ChainTrace run_chain(const PrecinctGraph& graph, const Plan& seed_plan, std::uint64_t steps,
                     const ChainOptions& options, const PlanScorer& scorer, std::uint64_t seed);

/// Independent chains with seeds Rng::derive_seed(seed, c), run on up to
/// `threads` workers. Results are ordered by chain index and do not depend on
/// the thread count.
std::vector<ChainTrace> run_chains(const PrecinctGraph& graph, const Plan& seed_plan,
                                   std::uint64_t steps, std::uint32_t chains,
                                   const ChainOptions& options, const PlanScorer& scorer,
                                   std::uint64_t seed, unsigned threads);

/// Gate decisions for the recorded proposals of a trace replayed under
/// another gate. Entries without a proposal yield false.
std::vector<bool> replay_gate(const ChainTrace& trace, const ConstraintGate& gate,
                              std::uint64_t seed);

struct TreePlanOptions {
  double tolerance = 0.02;
  int retry_budget = 50;  // trees per bisection stage
  TreeAlgorithm algorithm = TreeAlgorithm::Wilson;
};

/// Recursive bisection of the whole graph into k districts. Each stage splits
/// a region holding k' districts into ceil(k'/2) and floor(k'/2) districts,
/// each side within tolerance of its share of the ideal population.
std::optional<Plan> random_tree_plan(const PrecinctGraph& graph, int k, const TreePlanOptions& options,
                                     Rng& rng);

struct TreeEnsembleOptions {
  TreePlanOptions plan;
  /// Failed draws tolerated across the ensemble before giving up.
  std::uint64_t max_failures = 10000;
  unsigned threads = 1;
  std::function<void(const Plan&, const TraceEntry&)> observer;
};

/// n_plans independent tree plans; plan i draws from its own stream
/// Rng::derive_seed(seed, i). Throws RetryBudgetExhausted.
ChainTrace tree_ensemble(const PrecinctGraph& graph, int k, std::uint64_t n_plans,
                         const TreeEnsembleOptions& options, const PlanScorer& scorer,
                         std::uint64_t seed);

}  // namespace redistrict
