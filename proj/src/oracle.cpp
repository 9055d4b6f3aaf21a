#include "redistrict/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>

#include "redistrict/error.hpp"

namespace redistrict::oracle {

Plan canonicalize(const Plan& plan) {
  std::map<District, District> relabel;
  Plan out{std::vector<District>(plan.assignment.size()), plan.k};
  for (std::size_t v = 0; v < plan.assignment.size(); ++v) {
    auto [it, inserted] =
        relabel.emplace(plan.assignment[v], static_cast<District>(relabel.size()));
    out.assignment[v] = it->second;
  }
  return out;
}

bool PartitionCatalog::contains(const Plan& plan) const {
  return plans.count(canonicalize(plan).assignment) > 0;
}

namespace {

bool nodes_connected(const PrecinctGraph& graph, const std::vector<NodeId>& members) {
  if (members.empty()) return false;
  std::vector<char> in(graph.node_count(), 0), seen(graph.node_count(), 0);
  for (auto v : members) in[v] = 1;
  std::vector<NodeId> queue{members.front()};
  seen[members.front()] = 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    for (auto w : graph.neighbors(queue[head])) {
      if (in[w] && !seen[w]) {
        seen[w] = 1;
        queue.push_back(w);
      }
    }
  }
  return queue.size() == members.size();
}

class Enumerator {
 public:
  Enumerator(const PrecinctGraph& graph, int k, double tolerance, PartitionCatalog& out)
      : graph_(graph), k_(k), out_(out), label_(graph.node_count(), -1),
        excluded_(static_cast<std::size_t>(k), std::vector<char>(graph.node_count(), 0)),
        queued_(static_cast<std::size_t>(k), std::vector<char>(graph.node_count(), 0)) {
    const double ideal = static_cast<double>(graph.total_population()) / k;
    lo_ = ideal * (1.0 - tolerance);
    hi_ = ideal * (1.0 + tolerance);
  }

  void run() { place(0); }

 private:
  // Districts are grown in label order, each from the lowest unassigned node.
  void place(District district) {
    if (district == k_ - 1) {
      std::vector<NodeId> rest;
      Population pop = 0;
      for (NodeId v = 0; v < label_.size(); ++v) {
        if (label_[v] < 0) {
          rest.push_back(v);
          pop += graph_.node(v).population;
        }
      }
      if (in_range(pop) && nodes_connected(graph_, rest)) {
        std::vector<District> plan = label_;
        for (auto v : rest) plan[v] = district;
        out_.plans.insert(std::move(plan));
      }
      return;
    }
    NodeId root = 0;
    while (root < label_.size() && label_[root] >= 0) ++root;
    if (root == label_.size()) return;

    label_[root] = district;
    std::vector<NodeId> frontier;
    push_neighbors(district, root, frontier);
    grow(district, graph_.node(root).population, frontier);
    for (auto w : frontier) queued_[static_cast<std::size_t>(district)][w] = 0;
    label_[root] = -1;
  }

  void push_neighbors(District district, NodeId v, std::vector<NodeId>& frontier) {
    auto& excluded = excluded_[static_cast<std::size_t>(district)];
    auto& queued = queued_[static_cast<std::size_t>(district)];
    for (auto w : graph_.neighbors(v)) {
      if (label_[w] < 0 && !excluded[w] && !queued[w]) {
        queued[w] = 1;
        frontier.push_back(w);
      }
    }
  }

  // Each connected set containing the root is reached by exactly one
  // include/exclude decision sequence over its growing frontier.
  void grow(District district, Population pop, std::vector<NodeId>& frontier) {
    if (frontier.empty()) {
      if (in_range(pop)) place(district + 1);
      return;
    }
    auto& excluded = excluded_[static_cast<std::size_t>(district)];
    auto& queued = queued_[static_cast<std::size_t>(district)];
    const NodeId v = frontier.back();
    frontier.pop_back();
    queued[v] = 0;

    excluded[v] = 1;
    grow(district, pop, frontier);
    excluded[v] = 0;

    const Population with = pop + graph_.node(v).population;
    if (static_cast<double>(with) <= hi_) {
      label_[v] = district;
      const auto mark = frontier.size();
      push_neighbors(district, v, frontier);
      grow(district, with, frontier);
      for (auto i = mark; i < frontier.size(); ++i) queued[frontier[i]] = 0;
      frontier.resize(mark);
      label_[v] = -1;
    }

    queued[v] = 1;
    frontier.push_back(v);
  }

  bool in_range(Population pop) const {
    const double p = static_cast<double>(pop);
    return p >= lo_ && p <= hi_;
  }

  const PrecinctGraph& graph_;
  int k_;
  PartitionCatalog& out_;
  std::vector<District> label_;
  std::vector<std::vector<char>> excluded_;
  std::vector<std::vector<char>> queued_;
  double lo_ = 0, hi_ = 0;
};

}  // namespace

PartitionCatalog enumerate_partitions(const PrecinctGraph& graph, int k, double tolerance) {
  if (graph.node_count() > kMaxNodes) {
    fail(ErrorCode::TooLarge, "enumeration is limited to " + std::to_string(kMaxNodes) + " nodes");
  }
  if (k < 1 || static_cast<std::size_t>(k) > graph.node_count()) {
    fail(ErrorCode::InvalidPlan, "district count must lie in [1, node count]");
  }
  PartitionCatalog catalog;
  catalog.k = k;
  catalog.tolerance = tolerance;
  Enumerator(graph, k, tolerance, catalog).run();
  return catalog;
}

bool flood_fill_contiguous(const PrecinctGraph& graph, const Plan& plan) {
  for (District d = 0; d < plan.k; ++d) {
    std::vector<NodeId> members;
    for (NodeId v = 0; v < plan.assignment.size(); ++v) {
      if (plan.assignment[v] == d) members.push_back(v);
    }
    if (!nodes_connected(graph, members)) return false;
  }
  return true;
}

namespace {

struct ContestResult {
  double seats = 0, frac = 0, eg = 0, mm = 0;
  int ties = 0;
};

ContestResult naive_contest(const Plan& plan, const std::vector<Votes>& dem,
                            const std::vector<Votes>& rep, double sigma,
                            const std::string& name) {
  ContestResult r;
  std::vector<double> shares;
  double wasted_d = 0, wasted_r = 0, total = 0;
  for (District d = 0; d < plan.k; ++d) {
    double D = 0, R = 0;
    for (std::size_t v = 0; v < plan.assignment.size(); ++v) {
      if (plan.assignment[v] == d) {
        D += static_cast<double>(dem[v]);
        R += static_cast<double>(rep[v]);
      }
    }
    const double T = D + R;
    if (T == 0) {
      fail(ErrorCode::ZeroVotesDistrict, "district " + std::to_string(d) +
                                             " has no two-party votes in contest '" + name + "'");
    }
    const double s = D / T;
    shares.push_back(s);
    if (s > 0.5) r.seats += 1.0;
    if (s == 0.5) {
      r.seats += 0.5;
      r.ties += 1;
    }
    r.frac += 0.5 * (1.0 + std::erf((s - 0.5) / (sigma * std::sqrt(2.0))));
    if (D > R) {
      wasted_d += D - T / 2;
      wasted_r += R;
    } else if (R > D) {
      wasted_r += R - T / 2;
      wasted_d += D;
    }
    total += T;
  }
  r.eg = (wasted_d - wasted_r) / total;
  double mean = 0;
  for (double s : shares) mean += s;
  mean /= static_cast<double>(shares.size());
  std::sort(shares.begin(), shares.end());
  const auto n = shares.size();
  const double median = n % 2 ? shares[n / 2] : 0.5 * (shares[n / 2 - 1] + shares[n / 2]);
  r.mm = mean - median;
  return r;
}

void naive_splits(const std::vector<std::string>& unit_ids, const Plan& plan, std::size_t& splits,
                  std::size_t& pieces, std::size_t& units, std::size_t& penalty) {
  std::map<std::string, std::set<District>> touching;
  for (std::size_t v = 0; v < unit_ids.size(); ++v) touching[unit_ids[v]].insert(plan.assignment[v]);
  splits = pieces = penalty = 0;
  units = touching.size();
  for (const auto& [unit, districts] : touching) {
    pieces += districts.size();
    if (districts.size() >= 2) {
      ++splits;
      penalty += districts.size();
    }
  }
}

}  // namespace

MetricsReport naive_score(const PrecinctGraph& graph, const Plan& plan,
                          const MetricsConfig& config) {
  MetricsReport report;
  const auto& contests = graph.elections().contests;
  std::vector<Votes> index_dem(graph.node_count(), 0), index_rep(graph.node_count(), 0);
  for (const auto& name : config.contests) {
    const Contest* contest = nullptr;
    for (const auto& c : contests) {
      if (c.name == name) contest = &c;
    }
    if (contest == nullptr) fail(ErrorCode::UnknownContest, "unknown contest '" + name + "'");
    for (std::size_t v = 0; v < graph.node_count(); ++v) {
      index_dem[v] += contest->dem[v];
      index_rep[v] += contest->rep[v];
    }
    const auto r = naive_contest(plan, contest->dem, contest->rep, config.fractional_sigma, name);
    report.seats_avg += r.seats;
    report.seats_frac += r.frac;
    report.efficiency_gap += r.eg;
    report.mean_median += r.mm;
    report.tied_districts += r.ties;
  }
  const double m = static_cast<double>(config.contests.size());
  report.seats_avg /= m;
  report.seats_frac /= m;
  report.efficiency_gap /= m;
  report.mean_median /= m;

  const auto index = naive_contest(plan, index_dem, index_rep, config.fractional_sigma, "vote_index");
  report.seats_index = index.seats;
  report.efficiency_gap_index = index.eg;
  report.mean_median_index = index.mm;
  report.tied_districts += index.ties;

  double pp_sum = 0;
  for (District d = 0; d < plan.k; ++d) {
    double area = 0, perimeter = 0;
    for (std::size_t v = 0; v < graph.node_count(); ++v) {
      if (plan.assignment[v] == d) {
        area += graph.node(v).area;
        perimeter += graph.node(v).perimeter;
      }
    }
    for (const auto& e : graph.edges()) {
      if (plan.assignment[e.a] == d && plan.assignment[e.b] == d) perimeter -= 2 * e.shared_perimeter;
    }
    if (!(perimeter > 0)) fail(ErrorCode::NegativePerimeter, "non-positive district perimeter");
    pp_sum += 4 * std::numbers::pi * area / (perimeter * perimeter);
  }
  report.polsby_popper = pp_sum / plan.k;

  std::vector<std::string> counties, munis;
  for (const auto& node : graph.nodes()) {
    counties.push_back(node.county_id);
    munis.push_back(node.muni_id);
  }
  auto& s = report.splits;
  naive_splits(counties, plan, s.county_splits, s.county_pieces, s.county_count,
               s.per_district_county_penalty);
  naive_splits(munis, plan, s.muni_splits, s.muni_pieces, s.muni_count,
               s.per_district_muni_penalty);
  return report;
}

}  // namespace redistrict::oracle
