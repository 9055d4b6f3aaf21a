#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace redistrict {

using NodeId = std::size_t;
using District = int;
using Population = std::int64_t;
using Votes = std::int64_t;

struct PrecinctNode {
  std::string precinct_id;
  Population population = 0;
  double area = 1.0;
  double perimeter = 4.0;
  std::string county_id;
  std::string muni_id;
};

struct AdjacencyEdge {
  NodeId a = 0;
  NodeId b = 0;
  double shared_perimeter = 1.0;
};

/// Two-party returns for one contest, one entry per node.
struct Contest {
  std::string name;
  std::vector<Votes> dem;
  std::vector<Votes> rep;
};

struct ElectionSet {
  std::vector<Contest> contests;

  const Contest* find(std::string_view name) const;
};

/// Assignment of every node to a district label in [0, k).
struct Plan {
  std::vector<District> assignment;
  int k = 0;

  friend bool operator==(const Plan&, const Plan&) = default;
};

struct DistrictGeometry {
  double perimeter = 0.0;
  double area = 0.0;
};

/// Immutable precinct adjacency graph. Construct through build_graph().
class PrecinctGraph {
 public:
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  const std::vector<PrecinctNode>& nodes() const noexcept { return nodes_; }
  const std::vector<AdjacencyEdge>& edges() const noexcept { return edges_; }
  const PrecinctNode& node(NodeId v) const { return nodes_[v]; }
  const ElectionSet& elections() const noexcept { return elections_; }

  /// Neighbors of v (CSR slice).
  std::span<const NodeId> neighbors(NodeId v) const {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }
  /// Edge ordinals parallel to neighbors(v).
  std::span<const std::size_t> incident_edges(NodeId v) const {
    return {incident_.data() + offsets_[v], incident_.data() + offsets_[v + 1]};
  }

  /// Ordinal of a precinct id, or node_count() when unknown.
  NodeId index_of(const std::string& precinct_id) const;

  /// Dense county / municipality ordinals per node.
  const std::vector<std::size_t>& county_of() const noexcept { return county_of_; }
  const std::vector<std::size_t>& muni_of() const noexcept { return muni_of_; }
  std::size_t county_count() const noexcept { return county_count_; }
  std::size_t muni_count() const noexcept { return muni_count_; }

  Population total_population() const noexcept { return total_population_; }

 private:
  friend PrecinctGraph build_graph(std::vector<PrecinctNode>, std::vector<AdjacencyEdge>,
                                   ElectionSet);

  std::vector<PrecinctNode> nodes_;
  std::vector<AdjacencyEdge> edges_;
  ElectionSet elections_;
  std::unordered_map<std::string, NodeId> node_index_;
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> adjacency_;
  std::vector<std::size_t> incident_;
  std::vector<std::size_t> county_of_;
  std::vector<std::size_t> muni_of_;
  std::size_t county_count_ = 0;
  std::size_t muni_count_ = 0;
  Population total_population_ = 0;
};

/// Validates and indexes the inputs. Throws Error (DuplicatePrecinctId,
/// DanglingEdge, DuplicateEdge, InvalidNode, InvalidEdge, MissingVoteColumn,
/// EmptyInput) or DisconnectedGraphError.
PrecinctGraph build_graph(std::vector<PrecinctNode> nodes, std::vector<AdjacencyEdge> edges,
                          ElectionSet elections);

/// Throws InvalidPlan unless every node carries a label in [0, k) and every
/// district is nonempty.
void validate_labels(const PrecinctGraph& graph, const Plan& plan);

std::vector<Population> district_populations(const PrecinctGraph& graph, const Plan& plan);

/// One flag per district: true iff the district induces a connected subgraph.
std::vector<bool> is_contiguous(const PrecinctGraph& graph, const Plan& plan);

bool all_contiguous(const PrecinctGraph& graph, const Plan& plan);

/// Admissible district population interval [ideal (1 - tol), ideal (1 + tol)]
/// with ideal = total / k.
std::pair<double, double> population_bounds(Population total, int k, double tolerance);

bool within_tolerance(Population district_pop, Population total, int k, double tolerance);
bool is_balanced(const PrecinctGraph& graph, const Plan& plan, double tolerance);

/// Perimeter and area per district. Perimeter is the sum of node perimeters
/// less twice the shared length of every edge internal to the district.
std::vector<DistrictGeometry> district_perimeter_area(const PrecinctGraph& graph,
                                                      const Plan& plan);

/// Nodes of each district, ascending.
std::vector<std::vector<NodeId>> district_members(const Plan& plan);

}  // namespace redistrict
