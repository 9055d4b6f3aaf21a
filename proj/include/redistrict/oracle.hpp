#pragma once

#include <cstddef>
#include <set>
#include <vector>

#include "redistrict/graph.hpp"
#include "redistrict/metrics.hpp"

// Brute-force ground truth for tiny graphs. Nothing here calls into the
// sampler, spanning-tree, constraint, or metric code it is used to check.
namespace redistrict::oracle {

inline constexpr std::size_t kMaxNodes = 24;

/// Relabels districts in order of first appearance along node ordinals.
Plan canonicalize(const Plan& plan);

struct PartitionCatalog {
  int k = 0;
  double tolerance = 0.0;
  std::set<std::vector<District>> plans;  // canonical assignments

  std::size_t size() const noexcept { return plans.size(); }
  bool contains(const Plan& plan) const;
};

/// Every partition of the graph into k connected districts within tolerance,
/// up to relabeling. Throws TooLarge above kMaxNodes nodes.
PartitionCatalog enumerate_partitions(const PrecinctGraph& graph, int k, double tolerance);

/// Flood-fill contiguity check, independent of is_contiguous.
bool flood_fill_contiguous(const PrecinctGraph& graph, const Plan& plan);

/// Straight-line recomputation of every MetricsReport field.
MetricsReport naive_score(const PrecinctGraph& graph, const Plan& plan,
                          const MetricsConfig& config);

}  // namespace redistrict::oracle
