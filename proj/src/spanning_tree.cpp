#include "redistrict/spanning_tree.hpp"

#include <algorithm>
#include <numeric>

#include "redistrict/error.hpp"

namespace redistrict {

namespace {

// Subgraph induced by a subset, in local ordinals.
struct LocalGraph {
  std::vector<std::size_t> offsets;
  std::vector<int> adjacency;
};

LocalGraph induce(const PrecinctGraph& graph, std::span<const NodeId> subset) {
  thread_local std::vector<int> local_of;
  if (local_of.size() < graph.node_count()) local_of.assign(graph.node_count(), -1);
  for (std::size_t i = 0; i < subset.size(); ++i) local_of[subset[i]] = static_cast<int>(i);

  LocalGraph lg;
  lg.offsets.assign(subset.size() + 1, 0);
  for (std::size_t i = 0; i < subset.size(); ++i) {
    for (auto w : graph.neighbors(subset[i])) {
      if (local_of[w] >= 0) lg.adjacency.push_back(local_of[w]);
    }
    lg.offsets[i + 1] = lg.adjacency.size();
  }
  for (auto v : subset) local_of[v] = -1;
  return lg;
}

bool connected(const LocalGraph& lg, std::size_t m) {
  if (m == 0) return false;
  std::vector<bool> seen(m, false);
  std::vector<int> stack{0};
  seen[0] = true;
  std::size_t reached = 0;
  while (!stack.empty()) {
    const auto u = static_cast<std::size_t>(stack.back());
    stack.pop_back();
    ++reached;
    for (auto k = lg.offsets[u]; k < lg.offsets[u + 1]; ++k) {
      const auto w = lg.adjacency[k];
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = true;
        stack.push_back(w);
      }
    }
  }
  return reached == m;
}

// Undirected tree edges in local ordinals -> rooted BFS layout.
SpanningTree root_tree(const PrecinctGraph& graph, std::span<const NodeId> subset,
                       const std::vector<std::pair<int, int>>& tree_edges, int root) {
  const std::size_t m = subset.size();
  std::vector<std::vector<int>> adj(m);
  for (auto [a, b] : tree_edges) {
    adj[static_cast<std::size_t>(a)].push_back(b);
    adj[static_cast<std::size_t>(b)].push_back(a);
  }

  SpanningTree tree;
  tree.nodes.reserve(m);
  tree.parent.reserve(m);
  std::vector<int> position(m, -1);
  std::vector<int> order{root};
  position[static_cast<std::size_t>(root)] = 0;
  tree.parent.push_back(-1);
  for (std::size_t head = 0; head < order.size(); ++head) {
    const auto u = static_cast<std::size_t>(order[head]);
    for (auto w : adj[u]) {
      if (position[static_cast<std::size_t>(w)] < 0) {
        position[static_cast<std::size_t>(w)] = static_cast<int>(order.size());
        order.push_back(w);
        tree.parent.push_back(position[u]);
      }
    }
  }
  for (auto local : order) tree.nodes.push_back(subset[static_cast<std::size_t>(local)]);
  tree.subtree_pop.resize(m);
  for (std::size_t i = 0; i < m; ++i) tree.subtree_pop[i] = graph.node(tree.nodes[i]).population;
  for (std::size_t i = m; i-- > 1;) {
    tree.subtree_pop[static_cast<std::size_t>(tree.parent[i])] += tree.subtree_pop[i];
  }
  return tree;
}

std::vector<std::pair<int, int>> wilson(const LocalGraph& lg, std::size_t m, int root, Rng& rng) {
  std::vector<bool> in_tree(m, false);
  std::vector<int> next(m, -1);
  in_tree[static_cast<std::size_t>(root)] = true;
  for (std::size_t start = 0; start < m; ++start) {
    // Random walk until the tree is hit; overwriting next[] erases loops.
    auto u = start;
    while (!in_tree[u]) {
      const auto deg = lg.offsets[u + 1] - lg.offsets[u];
      next[u] = lg.adjacency[lg.offsets[u] + rng.uniform_index(deg)];
      u = static_cast<std::size_t>(next[u]);
    }
    u = start;
    while (!in_tree[u]) {
      in_tree[u] = true;
      u = static_cast<std::size_t>(next[u]);
    }
  }
  std::vector<std::pair<int, int>> edges;
  edges.reserve(m - 1);
  for (std::size_t u = 0; u < m; ++u) {
    if (static_cast<int>(u) != root) edges.emplace_back(static_cast<int>(u), next[u]);
  }
  return edges;
}

std::vector<std::pair<int, int>> random_mst(const LocalGraph& lg, std::size_t m, Rng& rng) {
  struct WeightedEdge {
    double w;
    int a, b;
  };
  std::vector<WeightedEdge> candidates;
  for (std::size_t u = 0; u < m; ++u) {
    for (auto k = lg.offsets[u]; k < lg.offsets[u + 1]; ++k) {
      if (static_cast<std::size_t>(lg.adjacency[k]) > u) {
        candidates.push_back({rng.uniform01(), static_cast<int>(u), lg.adjacency[k]});
      }
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const auto& x, const auto& y) {
    if (x.w != y.w) return x.w < y.w;
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });

  std::vector<int> dsu(m);
  std::iota(dsu.begin(), dsu.end(), 0);
  auto find = [&](int x) {
    while (dsu[static_cast<std::size_t>(x)] != x) {
      dsu[static_cast<std::size_t>(x)] = dsu[static_cast<std::size_t>(dsu[static_cast<std::size_t>(x)])];
      x = dsu[static_cast<std::size_t>(x)];
    }
    return x;
  };
  std::vector<std::pair<int, int>> edges;
  edges.reserve(m - 1);
  for (const auto& e : candidates) {
    const int ra = find(e.a), rb = find(e.b);
    if (ra == rb) continue;
    dsu[static_cast<std::size_t>(ra)] = rb;
    edges.emplace_back(e.a, e.b);
    if (edges.size() + 1 == m) break;
  }
  return edges;
}

}  // namespace

SpanningTree random_spanning_tree(const PrecinctGraph& graph, std::span<const NodeId> subset,
                                  Rng& rng, TreeAlgorithm algorithm) {
  const std::size_t m = subset.size();
  const auto lg = induce(graph, subset);
  if (!connected(lg, m)) fail(ErrorCode::DisconnectedSubset, "subset does not induce a connected subgraph");

  const int root = static_cast<int>(rng.uniform_index(m));
  const auto edges = algorithm == TreeAlgorithm::Wilson ? wilson(lg, m, root, rng)
                                                        : random_mst(lg, m, rng);
  return root_tree(graph, subset, edges, root);
}

CutBounds CutBounds::from_targets(double p1, double p2, double tolerance) {
  return {p1 - tolerance * p1, p1 + tolerance * p1, p2 - tolerance * p2, p2 + tolerance * p2};
}

std::optional<TreeCut> find_cut(const SpanningTree& tree, const CutBounds& bounds, Rng& rng) {
  const double total = static_cast<double>(tree.total_population());
  std::vector<std::size_t> qualifying;
  std::vector<std::uint8_t> orientations;  // bit 0: child side first, bit 1: child side second
  for (std::size_t i = 1; i < tree.nodes.size(); ++i) {
    const double below = static_cast<double>(tree.subtree_pop[i]);
    const double above = total - below;
    std::uint8_t mask = 0;
    if (bounds.admits(below, above)) mask |= 1;
    if (bounds.admits(above, below)) mask |= 2;
    if (mask != 0) {
      qualifying.push_back(i);
      orientations.push_back(mask);
    }
  }
  if (qualifying.empty()) return std::nullopt;

  const auto pick = rng.uniform_index(qualifying.size());
  TreeCut cut{qualifying[pick], true};
  switch (orientations[pick]) {
    case 1: cut.child_is_first = true; break;
    case 2: cut.child_is_first = false; break;
    default: cut.child_is_first = rng.uniform_index(2) == 0; break;
  }
  return cut;
}

std::optional<TreeCut> find_balanced_cut(const SpanningTree& tree, std::pair<double, double> targets,
                                         double tolerance, Rng& rng) {
  return find_cut(tree, CutBounds::from_targets(targets.first, targets.second, tolerance), rng);
}

std::pair<std::vector<NodeId>, std::vector<NodeId>> split_at(const SpanningTree& tree,
                                                             const TreeCut& cut) {
  std::vector<bool> below(tree.nodes.size(), false);
  below[cut.child] = true;
  // BFS order: a node's parent has already been classified.
  for (std::size_t i = cut.child + 1; i < tree.nodes.size(); ++i) {
    below[i] = below[static_cast<std::size_t>(tree.parent[i])];
  }
  std::vector<NodeId> side_below, side_above;
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    (below[i] ? side_below : side_above).push_back(tree.nodes[i]);
  }
  std::sort(side_below.begin(), side_below.end());
  std::sort(side_above.begin(), side_above.end());
  if (cut.child_is_first) return {std::move(side_below), std::move(side_above)};
  return {std::move(side_above), std::move(side_below)};
}

std::optional<std::pair<std::vector<NodeId>, std::vector<NodeId>>> bipartition_within(
    const PrecinctGraph& graph, std::span<const NodeId> subset, const CutBounds& bounds, Rng& rng,
    const BipartitionOptions& options) {
  for (int attempt = 0; attempt < options.max_tree_retries; ++attempt) {
    const auto tree = random_spanning_tree(graph, subset, rng, options.algorithm);
    if (auto cut = find_cut(tree, bounds, rng)) return split_at(tree, *cut);
  }
  return std::nullopt;
}

std::optional<std::pair<std::vector<NodeId>, std::vector<NodeId>>> bipartition_region(
    const PrecinctGraph& graph, std::span<const NodeId> subset, std::pair<double, double> targets,
    double tolerance, Rng& rng, const BipartitionOptions& options) {
  return bipartition_within(graph, subset,
                            CutBounds::from_targets(targets.first, targets.second, tolerance), rng,
                            options);
}

}  // namespace redistrict
