#include <doctest.h>

#include <set>

#include "redistrict/error.hpp"
#include "redistrict/io.hpp"
#include "redistrict/oracle.hpp"
#include "redistrict/samplers.hpp"
#include "support.hpp"

using namespace redistrict;

namespace {

MetricsConfig config_e() { return {{"E"}, 0.05}; }

ChainOptions options_with(double tol, ConstraintGate gate = ConstraintGate::permissive()) {
  ChainOptions o;
  o.recom.tolerance = tol;
  o.gate = gate;
  o.validate_every = 1;
  return o;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InternalError;
}

std::size_t changed_districts(const Plan& before, const Plan& after) {
  std::set<District> changed;
  for (std::size_t v = 0; v < before.assignment.size(); ++v) {
    if (before.assignment[v] != after.assignment[v]) {
      changed.insert(before.assignment[v]);
      changed.insert(after.assignment[v]);
    }
  }
  return changed.size();
}

}  // namespace

TEST_SUITE("samplers") {
  TEST_CASE("2x2 chain moves between the two balanced splits") {
    const auto g = testing::grid(2, 2);
    const PlanScorer scorer(g, config_e());
    std::set<std::vector<District>> seen;
    auto o = options_with(0.0);
    o.observer = [&](const Plan& p, const TraceEntry&) {
      seen.insert(oracle::canonicalize(p).assignment);
    };
    const auto trace = run_chain(g, Plan{{0, 0, 1, 1}, 2}, 200, o, scorer, 3);
    CHECK(trace.size() == 200);
    const std::set<std::vector<District>> expected{{0, 0, 1, 1}, {0, 1, 0, 1}};
    CHECK(seen == expected);
  }

  TEST_CASE("a gate that rejects everything freezes the plan") {
    testing::GridSpec spec;
    spec.rows = 2;
    spec.cols = 2;
    spec.county_block = 2;  // one county, split by every two-district plan
    const auto g = testing::grid(spec);
    ChainState state(g, Plan{{0, 0, 1, 1}, 2}, 5);
    const auto start = state.plan;
    RecomOptions recom;
    recom.tolerance = 0.0;
    for (int i = 0; i < 50; ++i) recom_step(state, g, recom, ConstraintGate::reject(0, 0));
    CHECK(state.plan == start);
    CHECK(state.step == 50);
    CHECK(state.counters.proposed == 50);
    CHECK(state.counters.rejected_by_constraint == state.counters.proposed);
  }

  TEST_CASE("no balanced cut leaves the plan unchanged") {
    const auto g = testing::star_graph(4);
    ChainState state(g, Plan{{0, 0, 1, 1}, 2}, 1);
    RecomOptions recom;
    recom.tolerance = 0.01;
    recom.bipartition.max_tree_retries = 5;
    for (int i = 0; i < 10; ++i) {
      const auto rec = recom_step(state, g, recom, ConstraintGate::permissive());
      CHECK(rec.outcome == StepOutcome::RejectedNoCut);
      CHECK_FALSE(rec.proposal.has_value());
    }
    CHECK(state.plan == Plan{{0, 0, 1, 1}, 2});
    CHECK(state.counters.rejected_no_cut == 10);
    CHECK(state.step == 10);
  }

  TEST_CASE("single district has no pair to merge") {
    const auto g = testing::grid(2, 2);
    ChainState state(g, Plan{{0, 0, 0, 0}, 1}, 1);
    CHECK(code_of([&] { recom_step(state, g, {}, ConstraintGate::permissive()); }) ==
          ErrorCode::NoAdjacentDistrictPair);
  }

  TEST_CASE("zero steps give an empty trace") {
    const auto g = testing::grid(4, 4);
    const PlanScorer scorer(g, config_e());
    const auto trace = run_chain(g, testing::row_bands(4, 4, 4), 0, options_with(0.0), scorer, 1);
    CHECK(trace.empty());
    CHECK(trace.counters == ChainCounters{});
  }

  TEST_CASE("chains are deterministic per seed") {
    const auto g = io::read_graph(testing::fixture("nodes.csv"), testing::fixture("edges.csv"));
    const PlanScorer scorer(g, {{"PRES20"}, 0.05});
    const auto seed = testing::row_bands(4, 4, 4);
    const auto a = run_chain(g, seed, 100, options_with(0.0), scorer, 42);
    const auto b = run_chain(g, seed, 100, options_with(0.0), scorer, 42);
    const auto c = run_chain(g, seed, 100, options_with(0.0), scorer, 43);
    CHECK(io::render_trace(std::vector{a}) == io::render_trace(std::vector{b}));
    CHECK(io::render_trace(std::vector{a}) != io::render_trace(std::vector{c}));
  }

  TEST_CASE("chain invariants: validity, locality, counters") {
    testing::GridSpec spec;
    spec.rows = 6;
    spec.cols = 6;
    spec.county_block = 3;
    spec.population = [](int r, int c) { return 10 + (r * 5 + c * 3) % 4; };
    const auto g = testing::grid(spec);
    const PlanScorer scorer(g, config_e());
    const auto seed = testing::blocks(6, 6, 3, 2);  // six 3x2 districts
    const double tol = 0.15;
    REQUIRE(is_balanced(g, seed, tol));

    for (auto pairs : {PairSelection::UniformPair, PairSelection::CutEdge}) {
      for (auto gate : {ConstraintGate::permissive(), ConstraintGate::reject(4, 12),
                        ConstraintGate::gibbs({0.5, 0.0, 0.3, 0.0, 1.0})}) {
        auto o = options_with(tol, gate);
        o.recom.pair_selection = pairs;
        Plan previous = seed;
        std::size_t max_changed = 0, invalid = 0;
        o.observer = [&](const Plan& p, const TraceEntry& e) {
          max_changed = std::max(max_changed, changed_districts(previous, p));
          invalid += !all_contiguous(g, p) || !is_balanced(g, p, tol);
          if (e.outcome != StepOutcome::Accepted) CHECK(p == previous);
          previous = p;
        };
        const auto trace = run_chain(g, seed, 300, o, scorer, 9);
        CHECK(invalid == 0);
        CHECK(max_changed <= 2);
        const auto& k = trace.counters;
        CHECK(k.proposed == 300);
        CHECK(k.proposed == k.accepted + k.rejected_by_constraint + k.rejected_no_cut);
        std::uint64_t acc = 0, rc = 0, nc = 0;
        for (std::size_t i = 0; i < trace.size(); ++i) {
          CHECK(trace.entries[i].step == i + 1);
          acc += trace.entries[i].outcome == StepOutcome::Accepted;
          rc += trace.entries[i].outcome == StepOutcome::RejectedByConstraint;
          nc += trace.entries[i].outcome == StepOutcome::RejectedNoCut;
        }
        CHECK(acc == k.accepted);
        CHECK(rc == k.rejected_by_constraint);
        CHECK(nc == k.rejected_no_cut);
        CHECK(k.accepted > 0);
      }
    }
  }

  TEST_CASE("seed plans are checked") {
    const auto g = testing::grid(4, 4);
    const PlanScorer scorer(g, config_e());
    auto run = [&](const Plan& p, ConstraintGate gate) {
      return code_of([&] { run_chain(g, p, 10, options_with(0.0, gate), scorer, 1); });
    };
    Plan broken = testing::row_bands(4, 4, 4);
    std::swap(broken.assignment[0], broken.assignment[15]);
    CHECK(run(broken, ConstraintGate::permissive()) == ErrorCode::InvalidSeedPlan);
    CHECK(run(Plan{testing::row_bands(4, 4, 2).assignment, 3}, ConstraintGate::permissive()) ==
          ErrorCode::InvalidSeedPlan);
    Plan uneven = testing::row_bands(4, 4, 4);
    uneven.assignment[4] = 0;  // district 0 gets 5 nodes
    CHECK(run(uneven, ConstraintGate::permissive()) == ErrorCode::InvalidSeedPlan);
    // row bands split all four 2x2 counties
    CHECK(run(testing::row_bands(4, 4, 4), ConstraintGate::reject(3)) == ErrorCode::InvalidSeedPlan);
    try {
      validate_seed_plan(g, testing::row_bands(4, 4, 4), 0.0, ConstraintGate::reject(2));
      FAIL("no exception");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("gate") != std::string::npos);
    }
  }

  TEST_CASE("parallel chains do not depend on the thread count") {
    const auto g = testing::grid(4, 4);
    const PlanScorer scorer(g, config_e());
    const auto seed = testing::row_bands(4, 4, 4);
    const auto one = run_chains(g, seed, 200, 4, options_with(0.0), scorer, 17, 1);
    const auto three = run_chains(g, seed, 200, 4, options_with(0.0), scorer, 17, 3);
    CHECK(io::render_trace(one) == io::render_trace(three));
    CHECK(one[2].entries.front().chain == 2);
  }

  TEST_CASE("random tree plan basics") {
    const auto g2 = testing::grid(2, 2);
    Rng rng(4);
    const auto whole = random_tree_plan(g2, 1, {}, rng);
    REQUIRE(whole.has_value());
    CHECK(whole->assignment == std::vector<District>{0, 0, 0, 0});

    std::set<std::vector<District>> seen;
    for (int i = 0; i < 200; ++i) {
      const auto p = random_tree_plan(g2, 2, {0.0, 50, TreeAlgorithm::Wilson}, rng);
      REQUIRE(p.has_value());
      seen.insert(oracle::canonicalize(*p).assignment);
    }
    CHECK(seen == std::set<std::vector<District>>{{0, 0, 1, 1}, {0, 1, 0, 1}});

    CHECK(code_of([&] { random_tree_plan(g2, 0, {}, rng); }) == ErrorCode::InvalidPlan);
    CHECK(code_of([&] { random_tree_plan(g2, 5, {}, rng); }) == ErrorCode::InvalidPlan);
  }

  TEST_CASE("random tree plans on 4x4 are catalog members") {
    const auto g = testing::grid(4, 4);
    const auto catalog = oracle::enumerate_partitions(g, 4, 0.0);
    for (auto algo : {TreeAlgorithm::Wilson, TreeAlgorithm::RandomMst}) {
      Rng rng(8);
      int produced = 0;
      for (int i = 0; i < 500; ++i) {
        if (const auto p = random_tree_plan(g, 4, {0.0, 50, algo}, rng)) {
          ++produced;
          CHECK(catalog.contains(*p));
        }
      }
      CHECK(produced > 0);
    }
  }

  TEST_CASE("uneven k splits districts proportionally") {
    testing::GridSpec spec;
    spec.rows = 5;
    spec.cols = 6;
    const auto g = testing::grid(spec);
    Rng rng(12);
    for (int i = 0; i < 50; ++i) {
      const auto p = random_tree_plan(g, 5, {0.0, 200, TreeAlgorithm::Wilson}, rng);
      if (!p) continue;
      CHECK(all_contiguous(g, *p));
      CHECK(district_populations(g, *p) == std::vector<Population>(5, 6));
    }
  }

  TEST_CASE("tree ensembles") {
    const auto g = io::read_graph(testing::fixture("nodes.csv"), testing::fixture("edges.csv"));
    const PlanScorer scorer(g, {{"PRES20"}, 0.05});
    TreeEnsembleOptions o;
    o.plan.tolerance = 0.1;
    const auto single = tree_ensemble(g, 4, 1, o, scorer, 1);
    CHECK(single.size() == 1);
    CHECK(single.counters.accepted == 1);

    const auto a = tree_ensemble(g, 4, 50, o, scorer, 1);
    const auto b = tree_ensemble(g, 4, 50, o, scorer, 2);
    CHECK(io::render_trace(std::vector{a}) != io::render_trace(std::vector{b}));
    CHECK(a.counters.proposed == a.counters.accepted + a.counters.rejected_no_cut);

    o.threads = 3;
    const auto a3 = tree_ensemble(g, 4, 50, o, scorer, 1);
    CHECK(io::render_trace(std::vector{a}) == io::render_trace(std::vector{a3}));

    o.threads = 1;
    std::size_t seen = 0;
    o.observer = [&](const Plan& p, const TraceEntry&) {
      seen += all_contiguous(g, p) && is_balanced(g, p, 0.1);
    };
    tree_ensemble(g, 4, 20, o, scorer, 5);
    CHECK(seen == 20);
  }

  TEST_CASE("tree ensemble gives up after its failure budget") {
    const auto g = testing::star_graph(4);
    const PlanScorer scorer(g, config_e());
    TreeEnsembleOptions o;
    o.plan = {0.01, 3, TreeAlgorithm::Wilson};
    o.max_failures = 5;
    CHECK(code_of([&] { tree_ensemble(g, 2, 3, o, scorer, 1); }) == ErrorCode::RetryBudgetExhausted);
  }

  TEST_CASE("replaying proposals under a looser cap accepts a superset") {
    const auto g = io::read_graph(testing::fixture("nodes.csv"), testing::fixture("edges.csv"));
    const PlanScorer scorer(g, {{"PRES20"}, 0.05});
    const auto seed = testing::row_bands(4, 4, 4);
    const auto trace = run_chain(g, seed, 400, options_with(0.1, ConstraintGate::reject(4, 8)), scorer, 3);
    for (std::size_t cap = 0; cap < 4; ++cap) {
      const auto tight = replay_gate(trace, ConstraintGate::reject(cap), 0);
      const auto loose = replay_gate(trace, ConstraintGate::reject(cap + 1), 0);
      for (std::size_t i = 0; i < tight.size(); ++i) {
        if (tight[i]) CHECK(loose[i]);
      }
    }
    // the trace's own gate replays to its own decisions
    const auto own = replay_gate(trace, ConstraintGate::reject(4, 8), 0);
    for (std::size_t i = 0; i < own.size(); ++i) {
      CHECK(own[i] == (trace.entries[i].outcome == StepOutcome::Accepted));
    }
  }
}
