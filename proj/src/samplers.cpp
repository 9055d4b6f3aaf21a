#include "redistrict/samplers.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "redistrict/error.hpp"

namespace redistrict {

std::string_view outcome_name(StepOutcome outcome) noexcept {
  switch (outcome) {
    case StepOutcome::Accepted: return "accepted";
    case StepOutcome::RejectedByConstraint: return "rejected_constraint";
    case StepOutcome::RejectedNoCut: return "rejected_no_cut";
    case StepOutcome::Seed: return "seed";
  }
  return "unknown";
}

ChainState::ChainState(const PrecinctGraph& graph, Plan seed_plan, std::uint64_t seed)
    : plan(std::move(seed_plan)), splits(split_report(graph, plan)), rng(seed) {}

std::vector<std::pair<District, District>> adjacent_district_pairs(const PrecinctGraph& graph,
                                                                   const Plan& plan) {
  std::vector<std::pair<District, District>> pairs;
  for (const auto& e : graph.edges()) {
    const auto a = plan.assignment[e.a], b = plan.assignment[e.b];
    if (a != b) pairs.emplace_back(std::min(a, b), std::max(a, b));
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  return pairs;
}

namespace {

std::pair<District, District> choose_pair(const PrecinctGraph& graph, const Plan& plan,
                                          PairSelection selection, Rng& rng) {
  if (plan.k < 2) fail(ErrorCode::NoAdjacentDistrictPair, "a single-district plan has no pair to merge");
  if (selection == PairSelection::UniformPair) {
    const auto pairs = adjacent_district_pairs(graph, plan);
    if (pairs.empty()) fail(ErrorCode::NoAdjacentDistrictPair, "no two districts are adjacent");
    return pairs[rng.uniform_index(pairs.size())];
  }
  std::vector<std::size_t> cut_edges;
  for (std::size_t i = 0; i < graph.edge_count(); ++i) {
    const auto& e = graph.edges()[i];
    if (plan.assignment[e.a] != plan.assignment[e.b]) cut_edges.push_back(i);
  }
  if (cut_edges.empty()) fail(ErrorCode::NoAdjacentDistrictPair, "no two districts are adjacent");
  const auto& e = graph.edges()[cut_edges[rng.uniform_index(cut_edges.size())]];
  const auto a = plan.assignment[e.a], b = plan.assignment[e.b];
  return {std::min(a, b), std::max(a, b)};
}

}  // namespace

StepRecord recom_step(ChainState& state, const PrecinctGraph& graph, const RecomOptions& options,
                      const ConstraintGate& gate) {
  StepRecord record;
  const auto [a, b] = choose_pair(graph, state.plan, options.pair_selection, state.rng);
  record.merged_a = a;
  record.merged_b = b;

  std::vector<NodeId> merged;
  for (NodeId v = 0; v < state.plan.assignment.size(); ++v) {
    const auto d = state.plan.assignment[v];
    if (d == a || d == b) merged.push_back(v);
  }

  const auto [lo, hi] = population_bounds(graph.total_population(), state.plan.k, options.tolerance);
  const CutBounds bounds{lo, hi, lo, hi};
  auto parts = bipartition_within(graph, merged, bounds, state.rng, options.bipartition);

  ++state.step;
  ++state.counters.proposed;
  if (!parts) {
    ++state.counters.rejected_no_cut;
    record.outcome = StepOutcome::RejectedNoCut;
    return record;
  }

  Plan proposal = state.plan;
  for (auto v : parts->first) proposal.assignment[v] = a;
  for (auto v : parts->second) proposal.assignment[v] = b;
  auto proposal_splits = split_report(graph, proposal);
  record.proposal = proposal_splits;

  if (!gate_accept(gate, state.splits, proposal_splits, state.rng)) {
    ++state.counters.rejected_by_constraint;
    record.outcome = StepOutcome::RejectedByConstraint;
    return record;
  }
  ++state.counters.accepted;
  state.plan = std::move(proposal);
  state.splits = proposal_splits;
  record.outcome = StepOutcome::Accepted;
  return record;
}

void validate_seed_plan(const PrecinctGraph& graph, const Plan& plan, double tolerance,
                        const ConstraintGate& gate) {
  try {
    validate_labels(graph, plan);
  } catch (const Error& e) {
    fail(ErrorCode::InvalidSeedPlan, std::string("seed plan labels: ") + e.what());
  }
  const auto flags = is_contiguous(graph, plan);
  for (std::size_t d = 0; d < flags.size(); ++d) {
    if (!flags[d]) {
      fail(ErrorCode::InvalidSeedPlan, "seed plan contiguity: district " + std::to_string(d) +
                                           " is not contiguous");
    }
  }
  const auto pops = district_populations(graph, plan);
  for (std::size_t d = 0; d < pops.size(); ++d) {
    if (!within_tolerance(pops[d], graph.total_population(), plan.k, tolerance)) {
      fail(ErrorCode::InvalidSeedPlan, "seed plan balance: district " + std::to_string(d) +
                                           " population " + std::to_string(pops[d]) +
                                           " outside tolerance");
    }
  }
  const auto splits = split_report(graph, plan);
  if (!gate_admits(gate, splits)) {
    fail(ErrorCode::InvalidSeedPlan,
         "seed plan gate: " + std::to_string(splits.county_splits) + " county splits and " +
             std::to_string(splits.muni_splits) + " municipal splits exceed the caps");
  }
}

ChainTrace run_chain(const PrecinctGraph& graph, const Plan& seed_plan, std::uint64_t steps,
                     const ChainOptions& options, const PlanScorer& scorer, std::uint64_t seed) {
  validate_seed_plan(graph, seed_plan, options.recom.tolerance, options.gate);
  ChainTrace trace;
  ChainState state(graph, seed_plan, seed);
  trace.seed_splits = state.splits;
  if (steps == 0) return trace;
  trace.entries.reserve(steps);

  MetricsReport current = scorer.score(state.plan, state.splits);
  for (std::uint64_t i = 0; i < steps; ++i) {
    const auto record = recom_step(state, graph, options.recom, options.gate);
    if (record.outcome == StepOutcome::Accepted) current = scorer.score(state.plan, state.splits);

    if (options.validate_every > 0 && state.step % options.validate_every == 0) {
      if (!all_contiguous(graph, state.plan) ||
          !is_balanced(graph, state.plan, options.recom.tolerance)) {
        fail(ErrorCode::InternalError,
             "chain left the contiguous balanced plan space at step " + std::to_string(state.step));
      }
    }

    TraceEntry entry{state.step, options.chain_id, record.outcome, current, record.proposal};
    if (options.observer) options.observer(state.plan, entry);
    trace.entries.push_back(std::move(entry));
  }
  trace.counters = state.counters;
  return trace;
}

namespace {

// Runs task(i) for i in [0, count) on up to `threads` workers and rethrows the
// exception of the lowest failing index.
template <typename Task>
void parallel_for(std::size_t count, unsigned threads, Task&& task) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (auto i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      if (failed.load()) break;
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
        failed.store(true);
      }
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

std::vector<ChainTrace> run_chains(const PrecinctGraph& graph, const Plan& seed_plan,
                                   std::uint64_t steps, std::uint32_t chains,
                                   const ChainOptions& options, const PlanScorer& scorer,
                                   std::uint64_t seed, unsigned threads) {
  validate_seed_plan(graph, seed_plan, options.recom.tolerance, options.gate);
  std::vector<ChainTrace> traces(chains);
  parallel_for(chains, threads, [&](std::size_t c) {
    ChainOptions local = options;
    local.chain_id = static_cast<std::uint32_t>(c);
    traces[c] = run_chain(graph, seed_plan, steps, local, scorer, Rng::derive_seed(seed, c));
  });
  return traces;
}

std::vector<bool> replay_gate(const ChainTrace& trace, const ConstraintGate& gate,
                              std::uint64_t seed) {
  Rng rng(seed);
  std::vector<bool> accepted(trace.size(), false);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& entry = trace.entries[i];
    if (!entry.proposal) continue;
    // The plan the proposal was drawn from is the previous post-step plan.
    const SplitReport& current =
        i == 0 ? trace.seed_splits : trace.entries[i - 1].metrics.splits;
    accepted[i] = gate_accept(gate, current, *entry.proposal, rng);
  }
  return accepted;
}

namespace {

bool bisect(const PrecinctGraph& graph, std::span<const NodeId> region, int districts,
            District first_label, const TreePlanOptions& options, Rng& rng, double lo, double hi,
            Plan& plan) {
  if (districts == 1) {
    for (auto v : region) plan.assignment[v] = first_label;
    return true;
  }
  const int k1 = (districts + 1) / 2, k2 = districts / 2;
  const CutBounds bounds{k1 * lo, k1 * hi, k2 * lo, k2 * hi};
  const BipartitionOptions bip{options.algorithm, options.retry_budget};
  auto parts = bipartition_within(graph, region, bounds, rng, bip);
  if (!parts) return false;
  return bisect(graph, parts->first, k1, first_label, options, rng, lo, hi, plan) &&
         bisect(graph, parts->second, k2, first_label + k1, options, rng, lo, hi, plan);
}

}  // namespace

std::optional<Plan> random_tree_plan(const PrecinctGraph& graph, int k, const TreePlanOptions& options,
                                     Rng& rng) {
  if (k < 1 || static_cast<std::size_t>(k) > graph.node_count()) {
    fail(ErrorCode::InvalidPlan, "district count must lie in [1, node count]");
  }
  Plan plan{std::vector<District>(graph.node_count(), 0), k};
  if (k == 1) return plan;

  std::vector<NodeId> all(graph.node_count());
  for (NodeId v = 0; v < all.size(); ++v) all[v] = v;
  const auto [lo, hi] = population_bounds(graph.total_population(), k, options.tolerance);
  if (!bisect(graph, all, k, 0, options, rng, lo, hi, plan)) return std::nullopt;
  return plan;
}

ChainTrace tree_ensemble(const PrecinctGraph& graph, int k, std::uint64_t n_plans,
                         const TreeEnsembleOptions& options, const PlanScorer& scorer,
                         std::uint64_t seed) {
  ChainTrace trace;
  trace.entries.resize(n_plans);
  std::vector<Plan> plans(options.observer ? n_plans : 0);
  std::atomic<std::uint64_t> failures{0};
  std::atomic<std::uint64_t> attempts{0};

  parallel_for(n_plans, options.threads, [&](std::size_t i) {
    Rng rng(Rng::derive_seed(seed, i));
    for (;;) {
      attempts.fetch_add(1);
      if (auto plan = random_tree_plan(graph, k, options.plan, rng)) {
        trace.entries[i] = TraceEntry{i + 1, 0, StepOutcome::Accepted, scorer.score(*plan), {}};
        if (options.observer) plans[i] = std::move(*plan);
        return;
      }
      if (failures.fetch_add(1) + 1 > options.max_failures) {
        fail(ErrorCode::RetryBudgetExhausted,
             "tree ensemble exceeded " + std::to_string(options.max_failures) + " failed draws");
      }
    }
  });

  trace.counters.proposed = attempts.load();
  trace.counters.accepted = n_plans;
  trace.counters.rejected_no_cut = failures.load();
  if (options.observer) {
    for (std::size_t i = 0; i < n_plans; ++i) options.observer(plans[i], trace.entries[i]);
  }
  return trace;
}

}  // namespace redistrict
