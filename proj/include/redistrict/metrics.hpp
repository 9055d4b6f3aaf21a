#pragma once

#include <span>
#include <string>
#include <vector>

#include "redistrict/constraints.hpp"
#include "redistrict/graph.hpp"

namespace redistrict {

struct MetricsConfig {
  std::vector<std::string> contests;  // election sample
  double fractional_sigma = 0.05;
};

/// Throws ConfigError unless the sample is nonempty, names known contests,
/// and 0 < fractional_sigma < 0.5.
void validate_metrics_config(const PrecinctGraph& graph, const MetricsConfig& config);

/// Plan-level metrics. Efficiency gap and mean-median are positive when the
/// plan favors Republicans. Fields without a suffix average the per-contest
/// values over the sample; *_index fields are computed once on the summed
/// vote index.
struct MetricsReport {
  double seats_avg = 0.0;
  double seats_frac = 0.0;
  double seats_index = 0.0;
  double efficiency_gap = 0.0;
  double mean_median = 0.0;
  double efficiency_gap_index = 0.0;
  double mean_median_index = 0.0;
  double polsby_popper = 0.0;
  int tied_districts = 0;  // exact 50/50 districts across the sample and index
  SplitReport splits;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

/// Per-district two-party totals for one contest.
struct DistrictVotes {
  std::vector<Votes> dem;
  std::vector<Votes> rep;
};

DistrictVotes tally(const Plan& plan, const Contest& contest);

/// Democratic two-party share per district. Throws ZeroVotesDistrict.
std::vector<double> district_shares(const Plan& plan, const Contest& contest);
std::vector<double> district_shares(const PrecinctGraph& graph, const Plan& plan,
                                    const std::string& contest);

struct SeatCount {
  int wins = 0;  // share > 0.5
  int ties = 0;  // share == 0.5

  double value() const noexcept { return wins + 0.5 * ties; }
};

SeatCount seats_won(std::span<const double> shares);

/// Standard normal CDF.
double normal_cdf(double x);

/// Expected seats with each district's share smoothed by N(0, sigma^2).
double seats_fractional(std::span<const double> shares, double sigma);

/// (wasted Democratic - wasted Republican) / total two-party votes.
double efficiency_gap(const DistrictVotes& votes);
double efficiency_gap(const Plan& plan, const Contest& contest);

/// Mean minus median of Democratic shares.
double mean_median(std::span<const double> shares);

/// Mean minus median computed on Democratic margins (D - R) / (2 (D + R)),
/// which equals mean_median of the shares and negates exactly when the
/// parties are swapped.
double mean_median(const DistrictVotes& votes);

/// Unweighted mean over districts of 4 pi area / perimeter^2.
double polsby_popper(const PrecinctGraph& graph, const Plan& plan);

/// Per-node Democratic and Republican votes summed over the sample.
Contest vote_index(const ElectionSet& elections, std::span<const std::string> sample);

MetricsReport score_plan(const PrecinctGraph& graph, const Plan& plan, const MetricsConfig& config);

/// score_plan with the vote index precomputed; used in chains where the
/// index is fixed for the whole run.
class PlanScorer {
 public:
  PlanScorer(const PrecinctGraph& graph, MetricsConfig config);

  MetricsReport score(const Plan& plan) const;
  MetricsReport score(const Plan& plan, const SplitReport& splits) const;

  const MetricsConfig& config() const noexcept { return config_; }

 private:
  const PrecinctGraph* graph_;
  MetricsConfig config_;
  std::vector<const Contest*> sample_;
  Contest index_;
};

}  // namespace redistrict
