#include <doctest.h>

#include <cmath>
#include <numbers>

#include "redistrict/error.hpp"
#include "redistrict/io.hpp"
#include "redistrict/metrics.hpp"
#include "redistrict/oracle.hpp"
#include "support.hpp"

using namespace redistrict;

namespace {

// Path of n unit-population nodes carrying the given contests.
PrecinctGraph path_with(std::size_t n, std::vector<Contest> contests) {
  std::vector<PrecinctNode> nodes(n);
  std::vector<AdjacencyEdge> edges;
  for (std::size_t v = 0; v < n; ++v) {
    nodes[v] = {"p" + std::to_string(v), 1, 1.0, 4.0, "C", "M"};
    if (v + 1 < n) edges.push_back({v, v + 1, 1.0});
  }
  return build_graph(std::move(nodes), std::move(edges), {std::move(contests)});
}

Plan singletons(std::size_t n) {
  Plan p{std::vector<District>(n), static_cast<int>(n)};
  for (std::size_t v = 0; v < n; ++v) p.assignment[v] = static_cast<District>(v);
  return p;
}

std::vector<Contest> pathology(Votes fifth_scale) {
  std::vector<Contest> c;
  for (int i = 0; i < 4; ++i) c.push_back({"E" + std::to_string(i), {51}, {49}});
  c.push_back({"E4", {20 * fifth_scale}, {80 * fifth_scale}});
  return c;
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

PrecinctGraph swapped(const PrecinctGraph& g) {
  auto elections = g.elections();
  for (auto& c : elections.contests) std::swap(c.dem, c.rep);
  return build_graph(g.nodes(), g.edges(), elections);
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("district shares") {
    const auto g = path_with(2, {{"E", {60, 0}, {40, 0}}});
    CHECK(district_shares(Plan{{0}, 1}, Contest{"x", {60}, {40}}) == std::vector<double>{0.6});
    CHECK(code_of([&] { district_shares(g, singletons(2), "E"); }) == ErrorCode::ZeroVotesDistrict);
    CHECK(district_shares(g, Plan{{0, 0}, 1}, "E") == std::vector<double>{0.6});
  }

  TEST_CASE("fixture shares match hand-summed totals") {
    const auto g = io::read_graph(testing::fixture("nodes.csv"), testing::fixture("edges.csv"));
    const auto& c = g.elections().contests.front();
    const auto shares = district_shares(g, testing::row_bands(4, 4, 4), "PRES20");
    for (int d = 0; d < 4; ++d) {
      Votes dem = 0, rep = 0;
      for (int col = 0; col < 4; ++col) {
        dem += c.dem[static_cast<std::size_t>(4 * d + col)];
        rep += c.rep[static_cast<std::size_t>(4 * d + col)];
      }
      CHECK(shares[static_cast<std::size_t>(d)] == static_cast<double>(dem) / static_cast<double>(dem + rep));
    }
  }

  TEST_CASE("seats won") {
    const std::vector<double> a{0.6, 0.4, 0.7};
    CHECK(seats_won(a).value() == 2.0);
    const std::vector<double> ties{0.5, 0.5, 0.5, 0.5};
    const auto s = seats_won(ties);
    CHECK(s.value() == 2.0);
    CHECK(s.ties == 4);
    CHECK(s.wins == 0);
  }

  TEST_CASE("vote-index pathology") {
    MetricsConfig cfg{{"E0", "E1", "E2", "E3", "E4"}, 0.05};
    for (Votes scale : {1, 10}) {
      const auto g = path_with(1, pathology(scale));
      const auto r = score_plan(g, Plan{{0}, 1}, cfg);
      CHECK(r.seats_avg == 0.8);
      CHECK(r.seats_index == 0.0);
    }
  }

  TEST_CASE("fractional seats") {
    const std::vector<double> half{0.5};
    CHECK(seats_fractional(half, 0.05) == 0.5);
    const std::vector<double> sure{1.0};
    CHECK(std::abs(seats_fractional(sure, 0.05) - 1.0) <= 1e-12);
    const std::vector<double> lean{0.55};
    CHECK(seats_fractional(lean, 0.05) == doctest::Approx(0.8413447460685429).epsilon(1e-12));
    CHECK(normal_cdf(0.0) == 0.5);
    CHECK(normal_cdf(-1.0) + normal_cdf(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("fractional seats approach hard seats as sigma shrinks") {
    const std::vector<double> shares{0.51, 0.49, 0.7, 0.3, 0.505};
    const double hard = seats_won(shares).value();
    double previous_gap = 10;
    for (double sigma : {0.05, 0.01, 0.002, 0.0005}) {
      const double gap = std::abs(seats_fractional(shares, sigma) - hard);
      CHECK(gap <= previous_gap);
      previous_gap = gap;
    }
    CHECK(previous_gap < 1e-6);
  }

  TEST_CASE("efficiency gap") {
    CHECK(efficiency_gap(DistrictVotes{{75, 25}, {25, 75}}) == 0.0);
    CHECK(std::abs(efficiency_gap(DistrictVotes{{60}, {40}}) - (-0.30)) <= 1e-12);
    // pro-Republican packing: Democrats waste more
    CHECK(efficiency_gap(DistrictVotes{{90, 40, 40}, {10, 60, 60}}) > 0.0);
    // an exact tie wastes nothing on either side
    CHECK(efficiency_gap(DistrictVotes{{50}, {50}}) == 0.0);
  }

  TEST_CASE("mean-median") {
    const std::vector<double> sym{0.6, 0.5, 0.4};
    CHECK(mean_median(sym) == doctest::Approx(0.0));
    const std::vector<double> packed{0.9, 0.45, 0.45};
    CHECK(mean_median(packed) == doctest::Approx(0.15).epsilon(1e-12));
    const std::vector<double> one{0.37};
    CHECK(mean_median(one) == 0.0);
    const std::vector<double> even{0.2, 0.4, 0.6, 0.9};
    CHECK(mean_median(even) == doctest::Approx(0.525 - 0.5));
    // the margin form agrees with the share form
    CHECK(mean_median(DistrictVotes{{90, 45, 45}, {10, 55, 55}}) == doctest::Approx(0.15).epsilon(1e-12));
  }

  TEST_CASE("Polsby-Popper") {
    CHECK(polsby_popper(testing::grid(1, 1), Plan{{0}, 1}) == doctest::Approx(std::numbers::pi / 4));
    CHECK(polsby_popper(testing::grid(1, 4), Plan{{0, 0, 0, 0}, 1}) ==
          doctest::Approx(0.5026548245743669).epsilon(1e-12));
    CHECK(polsby_popper(testing::grid(2, 2), Plan{{0, 0, 0, 0}, 1}) == doctest::Approx(std::numbers::pi / 4));
    // two strips average
    CHECK(polsby_popper(testing::grid(2, 4), testing::row_bands(2, 4, 2)) ==
          doctest::Approx(0.5026548245743669));
  }

  TEST_CASE("vote index") {
    ElectionSet e{{{"A", {10}, {1}}, {"B", {15}, {2}}, {"C", {11}, {3}}}};
    const std::vector<std::string> all{"A", "B", "C"};
    const auto idx = vote_index(e, all);
    CHECK(idx.dem == std::vector<Votes>{36});
    CHECK(idx.rep == std::vector<Votes>{6});
    const std::vector<std::string> one{"B"};
    const auto single = vote_index(e, one);
    CHECK(single.dem == e.contests[1].dem);
    CHECK(single.rep == e.contests[1].rep);
  }

  TEST_CASE("index favours the heavier-turnout contest") {
    // per-contest average gives A most of the seat, the index gives it to B
    const auto g = path_with(1, pathology(10));
    const MetricsConfig cfg{{"E0", "E1", "E2", "E3", "E4"}, 0.05};
    const auto r = score_plan(g, Plan{{0}, 1}, cfg);
    CHECK(r.seats_avg > 0.5);
    CHECK(r.seats_index == 0.0);
  }

  TEST_CASE("EG of the index is not the mean of per-contest EGs") {
    const auto g = path_with(2, {{"X", {60, 60}, {40, 40}}, {"Y", {10, 10}, {90, 90}}});
    const auto r = score_plan(g, singletons(2), {{"X", "Y"}, 0.05});
    CHECK(r.efficiency_gap == doctest::Approx(-0.3));
    CHECK(r.efficiency_gap_index == doctest::Approx(0.2));
    CHECK(std::abs(r.efficiency_gap_index - r.efficiency_gap) > 0.05);
  }

  TEST_CASE("party swap negates EG and mean-median exactly") {
    Rng rng(99);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<Contest> contests;
      for (int c = 0; c < 3; ++c) {
        Contest k{"c" + std::to_string(c), {}, {}};
        for (int v = 0; v < 16; ++v) {
          k.dem.push_back(static_cast<Votes>(1 + rng.uniform_index(500)));
          k.rep.push_back(static_cast<Votes>(1 + rng.uniform_index(500)));
        }
        contests.push_back(k);
      }
      testing::GridSpec spec;
      spec.contests = contests;
      const auto g = testing::grid(spec);
      const auto sw = swapped(g);
      const MetricsConfig cfg{{"c0", "c1", "c2"}, 0.05};
      const auto plan = testing::blocks(4, 4, 2, 2);
      const auto a = score_plan(g, plan, cfg);
      const auto b = score_plan(sw, plan, cfg);
      CHECK(a.efficiency_gap == -b.efficiency_gap);
      CHECK(a.mean_median == -b.mean_median);
      CHECK(a.efficiency_gap_index == -b.efficiency_gap_index);
      CHECK(a.mean_median_index == -b.mean_median_index);
      if (a.tied_districts == 0) {
        CHECK(a.seats_avg == doctest::Approx(4 - b.seats_avg));
        CHECK(a.seats_index == 4 - b.seats_index);
      }
      CHECK(a.seats_frac == doctest::Approx(4 - b.seats_frac).epsilon(1e-12));
    }
  }

  TEST_CASE("scaling one contest's turnout changes only the index") {
    auto build = [](Votes scale) {
      return path_with(2, {{"X", {60, 30}, {40, 70}}, {"Y", {45 * scale, 20 * scale}, {55 * scale, 80 * scale}}});
    };
    const MetricsConfig both{{"X", "Y"}, 0.05};
    const MetricsConfig y_only{{"Y"}, 0.05};
    const auto base = score_plan(build(1), singletons(2), both);
    const auto scaled = score_plan(build(7), singletons(2), both);
    CHECK(base.seats_avg == scaled.seats_avg);
    CHECK(base.efficiency_gap == doctest::Approx(scaled.efficiency_gap).epsilon(1e-14));
    CHECK(base.mean_median == doctest::Approx(scaled.mean_median).epsilon(1e-14));
    CHECK(base.efficiency_gap_index != doctest::Approx(scaled.efficiency_gap_index));
    const auto y1 = score_plan(build(1), singletons(2), y_only);
    const auto y7 = score_plan(build(7), singletons(2), y_only);
    CHECK(y1.efficiency_gap == y7.efficiency_gap);
  }

  TEST_CASE("reports are label invariant") {
    const auto g = io::read_graph(testing::fixture("nodes.csv"), testing::fixture("edges.csv"));
    const MetricsConfig cfg{{"PRES20"}, 0.05};
    const auto plan = testing::row_bands(4, 4, 4);
    Plan relabeled = plan;
    for (auto& d : relabeled.assignment) d = 3 - d;
    CHECK(score_plan(g, plan, cfg) == score_plan(g, relabeled, cfg));
    const PlanScorer scorer(g, cfg);
    CHECK(scorer.score(plan) == score_plan(g, plan, cfg));
  }

  TEST_CASE("score_plan matches the naive oracle on the fixture") {
    const auto g = io::read_graph(testing::fixture("nodes.csv"), testing::fixture("edges.csv"));
    const MetricsConfig cfg{{"PRES20"}, 0.05};
    for (const auto& plan : {testing::row_bands(4, 4, 4), testing::blocks(4, 4, 2, 2), testing::blocks(4, 4, 4, 1)}) {
      const auto a = score_plan(g, plan, cfg);
      const auto b = oracle::naive_score(g, plan, cfg);
      CHECK(a.seats_avg == doctest::Approx(b.seats_avg).epsilon(1e-12));
      CHECK(a.efficiency_gap == doctest::Approx(b.efficiency_gap).epsilon(1e-12));
      CHECK(a.polsby_popper == doctest::Approx(b.polsby_popper).epsilon(1e-12));
      CHECK(a.splits == b.splits);
    }
  }

  TEST_CASE("metrics config is validated") {
    const auto g = testing::grid(2, 2);
    CHECK(code_of([&] { validate_metrics_config(g, {{}, 0.05}); }) == ErrorCode::ConfigError);
    CHECK(code_of([&] { validate_metrics_config(g, {{"nope"}, 0.05}); }) == ErrorCode::UnknownContest);
    CHECK(code_of([&] { validate_metrics_config(g, {{"E"}, 0.5}); }) == ErrorCode::ConfigError);
    CHECK(code_of([&] { validate_metrics_config(g, {{"E"}, 0.0}); }) == ErrorCode::ConfigError);
    validate_metrics_config(g, {{"E"}, 0.05});
  }

  TEST_CASE("report ranges") {
    const auto g = io::read_graph(testing::fixture("nodes.csv"), testing::fixture("edges.csv"));
    const auto r = score_plan(g, testing::row_bands(4, 4, 4), {{"PRES20"}, 0.05});
    CHECK(r.seats_avg >= 0);
    CHECK(r.seats_avg <= 4);
    CHECK(std::abs(r.mean_median) < 0.5);
    CHECK(r.polsby_popper > 0);
    CHECK(r.polsby_popper <= 1);
  }
}
