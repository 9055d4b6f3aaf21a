#include "redistrict/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace redistrict {

namespace {

const std::vector<std::size_t>& unit_of(const PrecinctGraph& graph, AdminUnit unit) {
  return unit == AdminUnit::County ? graph.county_of() : graph.muni_of();
}

std::size_t unit_count(const PrecinctGraph& graph, AdminUnit unit) {
  return unit == AdminUnit::County ? graph.county_count() : graph.muni_count();
}

// Sorted, deduplicated (unit, district) incidences.
std::vector<std::pair<std::size_t, District>> incidences(const PrecinctGraph& graph,
                                                         const Plan& plan, AdminUnit unit) {
  const auto& units = unit_of(graph, unit);
  std::vector<std::pair<std::size_t, District>> pairs;
  pairs.reserve(units.size());
  for (NodeId v = 0; v < units.size(); ++v) pairs.emplace_back(units[v], plan.assignment[v]);
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  return pairs;
}

}  // namespace

SplitCount count_splits(const PrecinctGraph& graph, const Plan& plan, AdminUnit unit) {
  SplitCount out;
  out.units = unit_count(graph, unit);
  std::vector<std::size_t> touching(out.units, 0);
  for (const auto& [u, d] : incidences(graph, plan, unit)) ++touching[u];
  for (auto t : touching) {
    out.pieces += t;
    if (t >= 2) ++out.splits;
  }
  return out;
}

std::size_t per_district_split_penalty(const PrecinctGraph& graph, const Plan& plan,
                                       AdminUnit unit) {
  std::vector<std::size_t> touching(unit_count(graph, unit), 0);
  const auto pairs = incidences(graph, plan, unit);
  for (const auto& [u, d] : pairs) ++touching[u];
  // Each (split unit, district) incidence is one unit split by that district.
  std::size_t penalty = 0;
  for (const auto& [u, d] : pairs) {
    if (touching[u] >= 2) ++penalty;
  }
  return penalty;
}

SplitReport split_report(const PrecinctGraph& graph, const Plan& plan) {
  SplitReport r;
  const auto county = count_splits(graph, plan, AdminUnit::County);
  const auto muni = count_splits(graph, plan, AdminUnit::Municipality);
  r.county_splits = county.splits;
  r.county_pieces = county.pieces;
  r.county_count = county.units;
  r.muni_splits = muni.splits;
  r.muni_pieces = muni.pieces;
  r.muni_count = muni.units;
  r.per_district_county_penalty = per_district_split_penalty(graph, plan, AdminUnit::County);
  r.per_district_muni_penalty = per_district_split_penalty(graph, plan, AdminUnit::Municipality);
  return r;
}

bool gate_admits(const ConstraintGate& gate, const SplitReport& report) {
  if (gate.mode != GateMode::Reject) return true;
  return report.county_splits <= gate.county_cap && report.muni_splits <= gate.muni_cap;
}

double gibbs_acceptance(const GibbsWeights& w, const SplitReport& current,
                        const SplitReport& proposal) {
  auto delta = [](std::size_t after, std::size_t before) {
    return static_cast<double>(after) - static_cast<double>(before);
  };
  const double energy =
      w.county_splits * delta(proposal.county_splits, current.county_splits) +
      w.muni_splits * delta(proposal.muni_splits, current.muni_splits) +
      w.county_district_penalty *
          delta(proposal.per_district_county_penalty, current.per_district_county_penalty) +
      w.muni_district_penalty *
          delta(proposal.per_district_muni_penalty, current.per_district_muni_penalty);
  return std::min(1.0, std::exp(-w.beta * energy));
}

bool gate_accept(const ConstraintGate& gate, const SplitReport& current, const SplitReport& proposal,
                 Rng& rng) {
  switch (gate.mode) {
    case GateMode::Permissive:
      return true;
    case GateMode::Reject:
      return gate_admits(gate, proposal);
    case GateMode::Gibbs: {
      const double p = gibbs_acceptance(gate.weights, current, proposal);
      if (p >= 1.0) return true;
      return rng.bernoulli(p);
    }
  }
  return false;
}

}  // namespace redistrict
