#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "redistrict/error.hpp"
#include "redistrict/graph.hpp"

namespace testing {

using namespace redistrict;

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(REDISTRICT_FIXTURE_DIR) / name;
}

/// Fresh empty directory under the build tree.
inline std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::path(REDISTRICT_SCRATCH_DIR) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

struct GridSpec {
  int rows = 4;
  int cols = 4;
  int county_block = 2;  // counties are county_block x county_block squares
  std::function<Population(int, int)> population = [](int, int) { return 1; };
  std::vector<Contest> contests;  // empty -> one "E" contest with D = 1, R = 1
};

/// Rook-adjacency grid of unit squares; node r*cols + c is "r{r}c{c}".
inline PrecinctGraph grid(const GridSpec& spec) {
  std::vector<PrecinctNode> nodes;
  std::vector<AdjacencyEdge> edges;
  for (int r = 0; r < spec.rows; ++r) {
    for (int c = 0; c < spec.cols; ++c) {
      PrecinctNode n;
      n.precinct_id = "r" + std::to_string(r) + "c" + std::to_string(c);
      n.population = spec.population(r, c);
      n.county_id = "C" + std::to_string(r / spec.county_block) + "_" + std::to_string(c / spec.county_block);
      n.muni_id = "M" + std::to_string(r) + "_" + std::to_string(c / 2);
      nodes.push_back(n);
      const NodeId v = static_cast<NodeId>(r * spec.cols + c);
      if (c + 1 < spec.cols) edges.push_back({v, v + 1, 1.0});
      if (r + 1 < spec.rows) edges.push_back({v, v + static_cast<NodeId>(spec.cols), 1.0});
    }
  }
  ElectionSet elections;
  if (spec.contests.empty()) {
    const auto n = nodes.size();
    elections.contests.push_back({"E", std::vector<Votes>(n, 1), std::vector<Votes>(n, 1)});
  } else {
    elections.contests = spec.contests;
  }
  return build_graph(std::move(nodes), std::move(edges), std::move(elections));
}

inline PrecinctGraph grid(int rows, int cols) {
  GridSpec spec;
  spec.rows = rows;
  spec.cols = cols;
  return grid(spec);
}

/// Nodes 0..n-1 joined in a line, unit populations.
inline PrecinctGraph path_graph(std::size_t n) {
  std::vector<PrecinctNode> nodes(n);
  std::vector<AdjacencyEdge> edges;
  for (std::size_t v = 0; v < n; ++v) {
    nodes[v].precinct_id = "p" + std::to_string(v);
    nodes[v].population = 1;
    nodes[v].county_id = "C";
    nodes[v].muni_id = "M";
    if (v + 1 < n) edges.push_back({v, v + 1, 1.0});
  }
  ElectionSet e{{{"E", std::vector<Votes>(n, 1), std::vector<Votes>(n, 1)}}};
  return build_graph(std::move(nodes), std::move(edges), std::move(e));
}

/// Hub 0 joined to leaves 1..n-1, unit populations.
inline PrecinctGraph star_graph(std::size_t n) {
  std::vector<PrecinctNode> nodes(n);
  std::vector<AdjacencyEdge> edges;
  for (std::size_t v = 0; v < n; ++v) {
    nodes[v].precinct_id = "s" + std::to_string(v);
    nodes[v].population = 1;
    nodes[v].county_id = "C";
    nodes[v].muni_id = "M";
    if (v > 0) edges.push_back({0, v, 1.0});
  }
  ElectionSet e{{{"E", std::vector<Votes>(n, 1), std::vector<Votes>(n, 1)}}};
  return build_graph(std::move(nodes), std::move(edges), std::move(e));
}

/// k horizontal bands of equal height (rows divisible by k).
inline Plan row_bands(int rows, int cols, int k) {
  Plan p{std::vector<District>(static_cast<std::size_t>(rows * cols)), k};
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) p.assignment[static_cast<std::size_t>(r * cols + c)] = r / (rows / k);
  }
  return p;
}

/// Rectangles of bh x bw cells, numbered row-major.
inline Plan blocks(int rows, int cols, int bh, int bw) {
  Plan p{std::vector<District>(static_cast<std::size_t>(rows * cols)), (rows / bh) * (cols / bw)};
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      p.assignment[static_cast<std::size_t>(r * cols + c)] = (r / bh) * (cols / bw) + c / bw;
    }
  }
  return p;
}

/// Code of the Error thrown by f (InternalError if nothing is thrown).
inline ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InternalError;
}

}  // namespace testing
