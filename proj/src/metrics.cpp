#include "redistrict/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "redistrict/error.hpp"

namespace redistrict {

void validate_metrics_config(const PrecinctGraph& graph, const MetricsConfig& config) {
  if (config.contests.empty()) fail(ErrorCode::ConfigError, "election sample is empty");
  for (const auto& name : config.contests) {
    if (graph.elections().find(name) == nullptr) {
      fail(ErrorCode::UnknownContest, "contest '" + name + "' is not present in the node data");
    }
  }
  if (!(config.fractional_sigma > 0.0 && config.fractional_sigma < 0.5)) {
    fail(ErrorCode::ConfigError, "fractional_sigma must lie in (0, 0.5)");
  }
}

DistrictVotes tally(const Plan& plan, const Contest& contest) {
  DistrictVotes out;
  out.dem.assign(static_cast<std::size_t>(plan.k), 0);
  out.rep.assign(static_cast<std::size_t>(plan.k), 0);
  for (std::size_t v = 0; v < plan.assignment.size(); ++v) {
    const auto d = static_cast<std::size_t>(plan.assignment[v]);
    out.dem[d] += contest.dem[v];
    out.rep[d] += contest.rep[v];
  }
  for (std::size_t d = 0; d < out.dem.size(); ++d) {
    if (out.dem[d] + out.rep[d] == 0) {
      fail(ErrorCode::ZeroVotesDistrict, "district " + std::to_string(d) +
                                             " has no two-party votes in contest '" +
                                             contest.name + "'");
    }
  }
  return out;
}

namespace {

std::vector<double> shares_of(const DistrictVotes& votes) {
  std::vector<double> shares(votes.dem.size());
  for (std::size_t d = 0; d < shares.size(); ++d) {
    shares[d] = static_cast<double>(votes.dem[d]) / static_cast<double>(votes.dem[d] + votes.rep[d]);
  }
  return shares;
}

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

// Sum that depends only on the multiset of values, so district order never
// shows up in the last bit. Equal magnitudes are netted first, which also
// makes the sum of negated values the exact negation.
double multiset_sum(std::span<const double> values) {
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size();) {
    const double m = std::abs(v[i]);
    long net = 0;
    for (; i < v.size() && std::abs(v[i]) == m; ++i) net += v[i] > 0 ? 1 : (v[i] < 0 ? -1 : 0);
    sum += static_cast<double>(net) * m;
  }
  return sum;
}

double mean_of(std::span<const double> values) {
  return multiset_sum(values) / static_cast<double>(values.size());
}

const Contest& require_contest(const ElectionSet& elections, const std::string& name) {
  const Contest* c = elections.find(name);
  if (c == nullptr) fail(ErrorCode::UnknownContest, "unknown contest '" + name + "'");
  return *c;
}

}  // namespace

std::vector<double> district_shares(const Plan& plan, const Contest& contest) {
  return shares_of(tally(plan, contest));
}

std::vector<double> district_shares(const PrecinctGraph& graph, const Plan& plan,
                                    const std::string& contest) {
  return district_shares(plan, require_contest(graph.elections(), contest));
}

SeatCount seats_won(std::span<const double> shares) {
  SeatCount seats;
  for (double s : shares) {
    if (s > 0.5) {
      ++seats.wins;
    } else if (s == 0.5) {
      ++seats.ties;
    }
  }
  return seats;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double seats_fractional(std::span<const double> shares, double sigma) {
  std::vector<double> p(shares.size());
  for (std::size_t d = 0; d < p.size(); ++d) p[d] = normal_cdf((shares[d] - 0.5) / sigma);
  return multiset_sum(p);
}

double efficiency_gap(const DistrictVotes& votes) {
  // Twice the wasted votes, kept in integers: the winner wastes
  // 2 * votes - total, the loser 2 * votes; an exact tie wastes nothing.
  Votes wasted_dem2 = 0, wasted_rep2 = 0, total = 0;
  for (std::size_t d = 0; d < votes.dem.size(); ++d) {
    const Votes dem = votes.dem[d], rep = votes.rep[d], t = dem + rep;
    total += t;
    if (dem > rep) {
      wasted_dem2 += 2 * dem - t;
      wasted_rep2 += 2 * rep;
    } else if (rep > dem) {
      wasted_rep2 += 2 * rep - t;
      wasted_dem2 += 2 * dem;
    }
  }
  return static_cast<double>(wasted_dem2 - wasted_rep2) / (2.0 * static_cast<double>(total));
}

double efficiency_gap(const Plan& plan, const Contest& contest) {
  return efficiency_gap(tally(plan, contest));
}

double mean_median(std::span<const double> shares) {
  return mean_of(shares) - median_of({shares.begin(), shares.end()});
}

double mean_median(const DistrictVotes& votes) {
  std::vector<double> margins(votes.dem.size());
  for (std::size_t d = 0; d < margins.size(); ++d) {
    margins[d] = static_cast<double>(votes.dem[d] - votes.rep[d]) /
                 (2.0 * static_cast<double>(votes.dem[d] + votes.rep[d]));
  }
  return mean_of(margins) - median_of(margins);
}

double polsby_popper(const PrecinctGraph& graph, const Plan& plan) {
  const auto geo = district_perimeter_area(graph, plan);
  std::vector<double> pp(geo.size());
  for (std::size_t d = 0; d < geo.size(); ++d) {
    if (!(geo[d].perimeter > 0.0)) {
      fail(ErrorCode::NegativePerimeter,
           "district " + std::to_string(d) + " has non-positive perimeter");
    }
    pp[d] = 4.0 * std::numbers::pi * geo[d].area / (geo[d].perimeter * geo[d].perimeter);
  }
  return mean_of(pp);
}

Contest vote_index(const ElectionSet& elections, std::span<const std::string> sample) {
  Contest index;
  index.name = "vote_index";
  for (const auto& name : sample) {
    const auto& c = require_contest(elections, name);
    if (index.dem.empty()) {
      index.dem.assign(c.dem.size(), 0);
      index.rep.assign(c.rep.size(), 0);
    }
    for (std::size_t v = 0; v < c.dem.size(); ++v) {
      index.dem[v] += c.dem[v];
      index.rep[v] += c.rep[v];
    }
  }
  return index;
}

PlanScorer::PlanScorer(const PrecinctGraph& graph, MetricsConfig config)
    : graph_(&graph), config_(std::move(config)) {
  validate_metrics_config(graph, config_);
  for (const auto& name : config_.contests) sample_.push_back(graph.elections().find(name));
  index_ = vote_index(graph.elections(), config_.contests);
}

MetricsReport PlanScorer::score(const Plan& plan) const {
  return score(plan, split_report(*graph_, plan));
}

MetricsReport PlanScorer::score(const Plan& plan, const SplitReport& splits) const {
  MetricsReport r;
  const double n_contests = static_cast<double>(sample_.size());
  for (const Contest* contest : sample_) {
    const auto votes = tally(plan, *contest);
    const auto shares = shares_of(votes);
    const auto seats = seats_won(shares);
    r.seats_avg += seats.value();
    r.tied_districts += seats.ties;
    r.seats_frac += seats_fractional(shares, config_.fractional_sigma);
    r.efficiency_gap += efficiency_gap(votes);
    r.mean_median += mean_median(votes);
  }
  r.seats_avg /= n_contests;
  r.seats_frac /= n_contests;
  r.efficiency_gap /= n_contests;
  r.mean_median /= n_contests;

  const auto index_votes = tally(plan, index_);
  const auto index_seats = seats_won(shares_of(index_votes));
  r.seats_index = index_seats.value();
  r.tied_districts += index_seats.ties;
  r.efficiency_gap_index = efficiency_gap(index_votes);
  r.mean_median_index = mean_median(index_votes);

  r.polsby_popper = polsby_popper(*graph_, plan);
  r.splits = splits;
  return r;
}

MetricsReport score_plan(const PrecinctGraph& graph, const Plan& plan, const MetricsConfig& config) {
  validate_labels(graph, plan);
  return PlanScorer(graph, config).score(plan);
}

}  // namespace redistrict
