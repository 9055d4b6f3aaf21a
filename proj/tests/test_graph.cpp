#include <doctest.h>

#include <numeric>

#include "redistrict/error.hpp"
#include "redistrict/graph.hpp"
#include "redistrict/io.hpp"
#include "redistrict/oracle.hpp"
#include "redistrict/rng.hpp"
#include "support.hpp"

using namespace redistrict;
using testing::grid;

namespace {

std::vector<PrecinctNode> unit_nodes(std::size_t n) {
  std::vector<PrecinctNode> nodes(n);
  for (std::size_t v = 0; v < n; ++v) {
    nodes[v].precinct_id = "n" + std::to_string(v);
    nodes[v].population = 1;
    nodes[v].county_id = "C";
    nodes[v].muni_id = "M";
  }
  return nodes;
}

ElectionSet flat_votes(std::size_t n) {
  return {{{"E", std::vector<Votes>(n, 1), std::vector<Votes>(n, 1)}}};
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

}  // namespace

TEST_SUITE("plan-graph") {
  TEST_CASE("2x2 grid builds with four nodes") {
    const auto g = grid(2, 2);
    CHECK(g.node_count() == 4);
    CHECK(g.edge_count() == 4);
    CHECK(g.total_population() == 4);
  }

  TEST_CASE("disconnected input lists its components") {
    try {
      build_graph(unit_nodes(4), {{0, 1, 1.0}}, flat_votes(4));
      FAIL("no exception");
    } catch (const DisconnectedGraphError& e) {
      CHECK(e.code() == ErrorCode::DisconnectedGraph);
      const std::vector<std::vector<std::size_t>> expected{{0, 1}, {2}, {3}};
      CHECK(e.components() == expected);
    }
  }

  TEST_CASE("4x4 fixture has 16 nodes and 24 edges") {
    const auto g = io::read_graph(testing::fixture("nodes.csv"), testing::fixture("edges.csv"));
    CHECK(g.node_count() == 16);
    CHECK(g.edge_count() == 24);
    CHECK(g.elections().contests.size() == 1);
    CHECK(g.county_count() == 4);
    CHECK(g.muni_count() == 8);
  }

  TEST_CASE("construction rejects malformed input") {
    auto nodes = unit_nodes(3);
    nodes[2].precinct_id = "n0";
    CHECK(code_of([&] { build_graph(nodes, {{0, 1}, {1, 2}}, flat_votes(3)); }) ==
          ErrorCode::DuplicatePrecinctId);
    CHECK(code_of([] { build_graph(unit_nodes(3), {{0, 1}, {1, 7}}, flat_votes(3)); }) ==
          ErrorCode::DanglingEdge);
    CHECK(code_of([] { build_graph(unit_nodes(3), {{0, 1}, {1, 1}, {1, 2}}, flat_votes(3)); }) ==
          ErrorCode::InvalidEdge);
    CHECK(code_of([] { build_graph(unit_nodes(3), {{0, 1}, {1, 0}, {1, 2}}, flat_votes(3)); }) ==
          ErrorCode::DuplicateEdge);
    CHECK(code_of([] { build_graph(unit_nodes(2), {{0, 1, 4.5}}, flat_votes(2)); }) ==
          ErrorCode::InvalidEdge);
    CHECK(code_of([] {
            ElectionSet e{{{"E", {1, 1}, {1}}}};
            build_graph(unit_nodes(2), {{0, 1}}, e);
          }) == ErrorCode::MissingVoteColumn);
    auto bad_area = unit_nodes(2);
    bad_area[1].area = 0.0;
    CHECK(code_of([&] { build_graph(bad_area, {{0, 1}}, flat_votes(2)); }) == ErrorCode::InvalidNode);
    auto negative = unit_nodes(2);
    negative[0].population = -1;
    CHECK(code_of([&] { build_graph(negative, {{0, 1}}, flat_votes(2)); }) == ErrorCode::InvalidNode);
  }

  TEST_CASE("district populations") {
    const auto g2 = grid(2, 2);
    CHECK(district_populations(g2, Plan{{0, 0, 1, 1}, 2}) == std::vector<Population>{2, 2});
    CHECK(district_populations(g2, Plan{{0, 0, 0, 0}, 1}) == std::vector<Population>{4});
    const auto g4 = grid(4, 4);
    CHECK(district_populations(g4, testing::row_bands(4, 4, 4)) == std::vector<Population>{4, 4, 4, 4});
  }

  TEST_CASE("population is conserved for random labelings") {
    testing::GridSpec spec;
    spec.population = [](int r, int c) { return 3 * r + 7 * c + 1; };
    const auto g = grid(spec);
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
      Plan p{std::vector<District>(16), 5};
      for (int d = 0; d < 5; ++d) p.assignment[static_cast<std::size_t>(d)] = d;
      for (std::size_t v = 5; v < 16; ++v) p.assignment[v] = static_cast<District>(rng.uniform_index(5));
      const auto pops = district_populations(g, p);
      CHECK(std::accumulate(pops.begin(), pops.end(), Population{0}) == g.total_population());
      double area = 0;
      for (const auto& geo : district_perimeter_area(g, p)) area += geo.area;
      CHECK(area == 16.0);
    }
  }

  TEST_CASE("contiguity") {
    const auto g4 = grid(4, 4);
    const auto flags = is_contiguous(g4, testing::row_bands(4, 4, 4));
    CHECK(std::all_of(flags.begin(), flags.end(), [](bool b) { return b; }));

    const auto g2 = grid(2, 2);
    // 0 1 / 2 3: opposite corners 0 and 3 share no edge
    const auto corners = is_contiguous(g2, Plan{{0, 1, 1, 0}, 2});
    CHECK_FALSE(corners[0]);
    CHECK_FALSE(corners[1]);

    // district 0 wraps around district 1 through column 3
    const Plan snake{{0, 0, 0, 0, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0}, 2};
    const auto s = is_contiguous(g4, snake);
    CHECK(s[0]);
    CHECK(s[1]);
    CHECK(oracle::flood_fill_contiguous(g4, snake));
  }

  TEST_CASE("contiguity agrees with flood fill on random labelings") {
    const auto g = grid(3, 3);
    Rng rng(5);
    int disagreements = 0, contiguous = 0;
    for (int trial = 0; trial < 2000; ++trial) {
      Plan p{std::vector<District>(9), 2};
      p.assignment[0] = 0;
      p.assignment[1] = 1;
      for (std::size_t v = 2; v < 9; ++v) p.assignment[v] = static_cast<District>(rng.uniform_index(2));
      const bool a = all_contiguous(g, p);
      disagreements += a != oracle::flood_fill_contiguous(g, p);
      contiguous += a;
    }
    CHECK(disagreements == 0);
    CHECK(contiguous > 0);
    CHECK(contiguous < 2000);
  }

  TEST_CASE("perimeter and area") {
    const auto g1 = grid(1, 1);
    const auto one = district_perimeter_area(g1, Plan{{0}, 1});
    CHECK(one[0].perimeter == 4.0);
    CHECK(one[0].area == 1.0);

    const auto pair = district_perimeter_area(grid(1, 2), Plan{{0, 0}, 1});
    CHECK(pair[0].perimeter == 6.0);
    CHECK(pair[0].area == 2.0);

    const auto block = district_perimeter_area(grid(2, 2), Plan{{0, 0, 0, 0}, 1});
    CHECK(block[0].perimeter == 8.0);
    CHECK(block[0].area == 4.0);

    // whole graph: sum of perimeters minus twice the shared lengths
    const auto whole = district_perimeter_area(grid(4, 4), Plan{std::vector<District>(16, 0), 1});
    CHECK(whole[0].perimeter == doctest::Approx(16 * 4.0 - 2 * 24.0));
  }

  TEST_CASE("plan label validation") {
    const auto g = grid(2, 2);
    CHECK(code_of([&] { validate_labels(g, Plan{{0, 0, 2, 2}, 3}); }) == ErrorCode::InvalidPlan);
    CHECK(code_of([&] { validate_labels(g, Plan{{0, 0, 1}, 2}); }) == ErrorCode::InvalidPlan);
    CHECK(code_of([&] { validate_labels(g, Plan{{0, 0, 1, 5}, 2}); }) == ErrorCode::InvalidPlan);
    validate_labels(g, Plan{{0, 0, 1, 1}, 2});
  }

  TEST_CASE("balance bounds are symmetric about the ideal") {
    const auto [lo, hi] = population_bounds(100, 4, 0.02);
    CHECK(lo == doctest::Approx(24.5));
    CHECK(hi == doctest::Approx(25.5));
    CHECK(within_tolerance(25, 100, 4, 0.0));
    CHECK_FALSE(within_tolerance(26, 100, 4, 0.02));
    CHECK(is_balanced(grid(4, 4), testing::row_bands(4, 4, 4), 0.0));
  }
}
