#pragma once

#include <cstddef>
#include <limits>

#include "redistrict/graph.hpp"
#include "redistrict/rng.hpp"

namespace redistrict {

enum class AdminUnit { County, Municipality };

struct SplitCount {
  std::size_t splits = 0;  // units touching two or more districts
  std::size_t pieces = 0;  // sum over units of distinct districts touching the unit
  std::size_t units = 0;

  /// pieces - units: the count that tools tallying district/unit pieces report
  /// once the number of units is subtracted.
  std::size_t excess() const noexcept { return pieces - units; }
};

SplitCount count_splits(const PrecinctGraph& graph, const Plan& plan, AdminUnit unit);

/// Sum over districts of the number of split units the district touches.
std::size_t per_district_split_penalty(const PrecinctGraph& graph, const Plan& plan,
                                       AdminUnit unit);

struct SplitReport {
  std::size_t county_splits = 0;
  std::size_t muni_splits = 0;
  std::size_t county_pieces = 0;
  std::size_t muni_pieces = 0;
  std::size_t county_count = 0;
  std::size_t muni_count = 0;
  std::size_t per_district_county_penalty = 0;
  std::size_t per_district_muni_penalty = 0;

  std::size_t county_excess() const noexcept { return county_pieces - county_count; }
  std::size_t muni_excess() const noexcept { return muni_pieces - muni_count; }

  friend bool operator==(const SplitReport&, const SplitReport&) = default;
};

SplitReport split_report(const PrecinctGraph& graph, const Plan& plan);

enum class GateMode { Permissive, Reject, Gibbs };

struct GibbsWeights {
  double county_splits = 0.0;
  double muni_splits = 0.0;
  double county_district_penalty = 0.0;
  double muni_district_penalty = 0.0;
  double beta = 1.0;  // inverse temperature applied to the weighted sum
};

struct ConstraintGate {
  static constexpr std::size_t kUnlimited = std::numeric_limits<std::size_t>::max();

  GateMode mode = GateMode::Permissive;
  std::size_t county_cap = kUnlimited;
  std::size_t muni_cap = kUnlimited;
  GibbsWeights weights;

  static ConstraintGate permissive() { return {}; }
  static ConstraintGate reject(std::size_t county_cap, std::size_t muni_cap = kUnlimited) {
    return {GateMode::Reject, county_cap, muni_cap, {}};
  }
  static ConstraintGate gibbs(GibbsWeights weights) {
    return {GateMode::Gibbs, kUnlimited, kUnlimited, weights};
  }
};

/// Whether a proposal survives the gate. The reject gate looks only at the
/// proposal; the Gibbs gate accepts with probability
/// min(1, exp(-beta * sum_j w_j * (penalty_j(proposal) - penalty_j(current)))).
/// The rng is consumed only when that probability is below one.
bool gate_accept(const ConstraintGate& gate, const SplitReport& current, const SplitReport& proposal,
                 Rng& rng);

/// Whether a plan may sit in a chain under this gate (cap check for reject,
/// always true otherwise).
bool gate_admits(const ConstraintGate& gate, const SplitReport& report);

/// The Gibbs acceptance probability for a transition (1 for other modes).
double gibbs_acceptance(const GibbsWeights& weights, const SplitReport& current,
                        const SplitReport& proposal);

}  // namespace redistrict
