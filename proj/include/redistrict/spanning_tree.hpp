#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "redistrict/graph.hpp"
#include "redistrict/rng.hpp"

namespace redistrict {

enum class TreeAlgorithm {
  Wilson,     // uniform spanning trees by loop-erased random walk
  RandomMst,  // minimum spanning tree over i.i.d. uniform edge weights
};

/// Rooted spanning tree over a node subset.
///
/// nodes[0] is the root and nodes is in BFS order, so every parent precedes
/// its children. parent and subtree_pop are indexed by position in nodes.
struct SpanningTree {
  std::vector<NodeId> nodes;
  std::vector<int> parent;
  std::vector<Population> subtree_pop;

  std::size_t edge_count() const noexcept { return nodes.empty() ? 0 : nodes.size() - 1; }
  NodeId root() const { return nodes.front(); }
  Population total_population() const { return subtree_pop.empty() ? 0 : subtree_pop.front(); }
};

/// Draws a spanning tree of the subgraph induced by subset. Throws
/// DisconnectedSubset when that subgraph is not connected.
SpanningTree random_spanning_tree(const PrecinctGraph& graph, std::span<const NodeId> subset,
                                  Rng& rng, TreeAlgorithm algorithm = TreeAlgorithm::Wilson);

/// Admissible population interval for each side of a cut.
struct CutBounds {
  double lo1 = 0, hi1 = 0;
  double lo2 = 0, hi2 = 0;

  /// Each side within tolerance * target of its target.
  static CutBounds from_targets(double p1, double p2, double tolerance);
  bool admits(double side1, double side2) const {
    return side1 >= lo1 && side1 <= hi1 && side2 >= lo2 && side2 <= hi2;
  }
};

/// A tree edge (child, parent[child]) chosen for removal. The subtree below
/// child becomes side 1 when child_is_first, side 2 otherwise.
struct TreeCut {
  std::size_t child = 0;  // position in SpanningTree::nodes
  bool child_is_first = true;
};

/// Every tree edge whose removal meets bounds in either orientation; the cut
/// is chosen uniformly among qualifying edges.
std::optional<TreeCut> find_cut(const SpanningTree& tree, const CutBounds& bounds, Rng& rng);

std::optional<TreeCut> find_balanced_cut(const SpanningTree& tree, std::pair<double, double> targets,
                                         double tolerance, Rng& rng);

/// Node sets of side 1 and side 2 of a cut, each ascending.
std::pair<std::vector<NodeId>, std::vector<NodeId>> split_at(const SpanningTree& tree,
                                                             const TreeCut& cut);

struct BipartitionOptions {
  TreeAlgorithm algorithm = TreeAlgorithm::Wilson;
  int max_tree_retries = 50;
};

/// Draws up to max_tree_retries trees over subset and returns the two sides
/// of the first admissible cut.
std::optional<std::pair<std::vector<NodeId>, std::vector<NodeId>>> bipartition_within(
    const PrecinctGraph& graph, std::span<const NodeId> subset, const CutBounds& bounds, Rng& rng,
    const BipartitionOptions& options = {});

std::optional<std::pair<std::vector<NodeId>, std::vector<NodeId>>> bipartition_region(
    const PrecinctGraph& graph, std::span<const NodeId> subset, std::pair<double, double> targets,
    double tolerance, Rng& rng, const BipartitionOptions& options = {});

}  // namespace redistrict
