#include "redistrict/graph.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <string>
#include <utility>

#include "redistrict/error.hpp"

namespace redistrict {

const Contest* ElectionSet::find(std::string_view name) const {
  for (const auto& c : contests) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

NodeId PrecinctGraph::index_of(const std::string& precinct_id) const {
  auto it = node_index_.find(precinct_id);
  return it == node_index_.end() ? nodes_.size() : it->second;
}

namespace {

std::vector<std::size_t> densify(const std::vector<PrecinctNode>& nodes,
                                 std::string PrecinctNode::*field, std::size_t& count) {
  std::unordered_map<std::string, std::size_t> ids;
  std::vector<std::size_t> out(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    auto [it, inserted] = ids.emplace(nodes[i].*field, ids.size());
    out[i] = it->second;
  }
  count = ids.size();
  return out;
}

}  // namespace

PrecinctGraph build_graph(std::vector<PrecinctNode> nodes, std::vector<AdjacencyEdge> edges,
                          ElectionSet elections) {
  if (nodes.empty()) fail(ErrorCode::EmptyInput, "graph has no nodes");
  const std::size_t n = nodes.size();

  PrecinctGraph g;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& node = nodes[i];
    if (!g.node_index_.emplace(node.precinct_id, i).second) {
      fail(ErrorCode::DuplicatePrecinctId, "duplicate precinct id '" + node.precinct_id + "'");
    }
    if (node.population < 0) {
      fail(ErrorCode::InvalidNode, "precinct '" + node.precinct_id + "' has negative population");
    }
    if (!(node.area > 0.0) || !(node.perimeter > 0.0)) {
      fail(ErrorCode::InvalidNode,
           "precinct '" + node.precinct_id + "' must have positive area and perimeter");
    }
    if (node.county_id.empty() || node.muni_id.empty()) {
      fail(ErrorCode::InvalidNode,
           "precinct '" + node.precinct_id + "' lacks a county or municipality id");
    }
    g.total_population_ += node.population;
  }

  std::set<std::pair<NodeId, NodeId>> seen;
  for (const auto& e : edges) {
    if (e.a >= n || e.b >= n) {
      fail(ErrorCode::DanglingEdge, "edge references node ordinal outside the graph");
    }
    if (e.a == e.b) {
      fail(ErrorCode::InvalidEdge, "self-loop on precinct '" + nodes[e.a].precinct_id + "'");
    }
    if (!seen.emplace(std::min(e.a, e.b), std::max(e.a, e.b)).second) {
      fail(ErrorCode::DuplicateEdge, "duplicate edge " + nodes[e.a].precinct_id + "-" +
                                         nodes[e.b].precinct_id);
    }
    if (e.shared_perimeter < 0.0 ||
        e.shared_perimeter > std::min(nodes[e.a].perimeter, nodes[e.b].perimeter)) {
      fail(ErrorCode::InvalidEdge, "edge " + nodes[e.a].precinct_id + "-" +
                                       nodes[e.b].precinct_id +
                                       " has shared perimeter outside [0, min perimeter]");
    }
  }

  for (const auto& c : elections.contests) {
    if (c.dem.size() != n || c.rep.size() != n) {
      fail(ErrorCode::MissingVoteColumn, "contest '" + c.name + "' lacks an entry for every node");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (c.dem[i] < 0 || c.rep[i] < 0) {
        fail(ErrorCode::InvalidNode, "negative vote count in contest '" + c.name + "'");
      }
    }
  }

  // CSR adjacency.
  std::vector<std::size_t> degree(n, 0);
  for (const auto& e : edges) {
    ++degree[e.a];
    ++degree[e.b];
  }
  g.offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] = g.offsets_[i] + degree[i];
  g.adjacency_.resize(g.offsets_[n]);
  g.incident_.resize(g.offsets_[n]);
  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  for (std::size_t ei = 0; ei < edges.size(); ++ei) {
    const auto& e = edges[ei];
    g.adjacency_[cursor[e.a]] = e.b;
    g.incident_[cursor[e.a]++] = ei;
    g.adjacency_[cursor[e.b]] = e.a;
    g.incident_[cursor[e.b]++] = ei;
  }

  // Connectivity.
  std::vector<int> comp(n, -1);
  std::vector<std::vector<std::size_t>> components;
  for (std::size_t s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    const int id = static_cast<int>(components.size());
    components.emplace_back();
    std::vector<std::size_t> stack{s};
    comp[s] = id;
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      components.back().push_back(u);
      for (auto k = g.offsets_[u]; k < g.offsets_[u + 1]; ++k) {
        const auto w = g.adjacency_[k];
        if (comp[w] < 0) {
          comp[w] = id;
          stack.push_back(w);
        }
      }
    }
    std::sort(components.back().begin(), components.back().end());
  }
  if (components.size() > 1) throw DisconnectedGraphError(std::move(components));

  g.county_of_ = densify(nodes, &PrecinctNode::county_id, g.county_count_);
  g.muni_of_ = densify(nodes, &PrecinctNode::muni_id, g.muni_count_);
  g.nodes_ = std::move(nodes);
  g.edges_ = std::move(edges);
  g.elections_ = std::move(elections);
  return g;
}

void validate_labels(const PrecinctGraph& graph, const Plan& plan) {
  if (plan.k < 1) fail(ErrorCode::InvalidPlan, "plan must have at least one district");
  if (plan.assignment.size() != graph.node_count()) {
    fail(ErrorCode::InvalidPlan, "plan assigns " + std::to_string(plan.assignment.size()) +
                                     " nodes but graph has " +
                                     std::to_string(graph.node_count()));
  }
  std::vector<bool> used(static_cast<std::size_t>(plan.k), false);
  for (auto d : plan.assignment) {
    if (d < 0 || d >= plan.k) {
      fail(ErrorCode::InvalidPlan, "district label " + std::to_string(d) + " outside [0, k)");
    }
    used[static_cast<std::size_t>(d)] = true;
  }
  for (int d = 0; d < plan.k; ++d) {
    if (!used[static_cast<std::size_t>(d)]) {
      fail(ErrorCode::InvalidPlan, "district " + std::to_string(d) + " is empty");
    }
  }
}

std::vector<Population> district_populations(const PrecinctGraph& graph, const Plan& plan) {
  std::vector<Population> pops(static_cast<std::size_t>(plan.k), 0);
  for (std::size_t v = 0; v < plan.assignment.size(); ++v) {
    pops[static_cast<std::size_t>(plan.assignment[v])] += graph.node(v).population;
  }
  return pops;
}

std::vector<bool> is_contiguous(const PrecinctGraph& graph, const Plan& plan) {
  const std::size_t n = graph.node_count();
  std::vector<bool> result(static_cast<std::size_t>(plan.k), false);
  std::vector<bool> started(static_cast<std::size_t>(plan.k), false);
  std::vector<std::size_t> size(static_cast<std::size_t>(plan.k), 0);
  std::vector<std::size_t> reached(static_cast<std::size_t>(plan.k), 0);
  for (auto d : plan.assignment) ++size[static_cast<std::size_t>(d)];

  std::vector<bool> visited(n, false);
  std::vector<NodeId> stack;
  for (NodeId s = 0; s < n; ++s) {
    const auto d = static_cast<std::size_t>(plan.assignment[s]);
    if (started[d]) continue;
    started[d] = true;
    stack.assign(1, s);
    visited[s] = true;
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      ++reached[d];
      for (auto w : graph.neighbors(u)) {
        if (!visited[w] && static_cast<std::size_t>(plan.assignment[w]) == d) {
          visited[w] = true;
          stack.push_back(w);
        }
      }
    }
  }
  for (std::size_t d = 0; d < result.size(); ++d) result[d] = size[d] > 0 && reached[d] == size[d];
  return result;
}

bool all_contiguous(const PrecinctGraph& graph, const Plan& plan) {
  const auto flags = is_contiguous(graph, plan);
  return std::all_of(flags.begin(), flags.end(), [](bool b) { return b; });
}

std::pair<double, double> population_bounds(Population total, int k, double tolerance) {
  const double t = static_cast<double>(total);
  return {(t - tolerance * t) / k, (t + tolerance * t) / k};
}

bool within_tolerance(Population district_pop, Population total, int k, double tolerance) {
  const auto [lo, hi] = population_bounds(total, k, tolerance);
  const double p = static_cast<double>(district_pop);
  return p >= lo && p <= hi;
}

bool is_balanced(const PrecinctGraph& graph, const Plan& plan, double tolerance) {
  const auto pops = district_populations(graph, plan);
  return std::all_of(pops.begin(), pops.end(), [&](Population p) {
    return within_tolerance(p, graph.total_population(), plan.k, tolerance);
  });
}

std::vector<DistrictGeometry> district_perimeter_area(const PrecinctGraph& graph,
                                                      const Plan& plan) {
  std::vector<DistrictGeometry> geo(static_cast<std::size_t>(plan.k));
  for (NodeId v = 0; v < graph.node_count(); ++v) {
    auto& g = geo[static_cast<std::size_t>(plan.assignment[v])];
    g.area += graph.node(v).area;
    g.perimeter += graph.node(v).perimeter;
  }
  for (const auto& e : graph.edges()) {
    const auto d = plan.assignment[e.a];
    if (d == plan.assignment[e.b]) {
      geo[static_cast<std::size_t>(d)].perimeter -= 2.0 * e.shared_perimeter;
    }
  }
  for (std::size_t d = 0; d < geo.size(); ++d) {
    // Tolerate rounding from the subtraction; anything further is bad input.
    if (geo[d].perimeter < -1e-9 * std::max(1.0, geo[d].area)) {
      fail(ErrorCode::NegativePerimeter,
           "district " + std::to_string(d) + " has negative perimeter");
    }
  }
  return geo;
}

std::vector<std::vector<NodeId>> district_members(const Plan& plan) {
  std::vector<std::vector<NodeId>> members(static_cast<std::size_t>(plan.k));
  for (NodeId v = 0; v < plan.assignment.size(); ++v) {
    members[static_cast<std::size_t>(plan.assignment[v])].push_back(v);
  }
  return members;
}

}  // namespace redistrict
