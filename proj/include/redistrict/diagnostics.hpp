#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "redistrict/samplers.hpp"

namespace redistrict {

struct AcfSeries {
  std::vector<double> rho;  // rho[k] for lags 0..max_lag

  std::size_t max_lag() const noexcept { return rho.empty() ? 0 : rho.size() - 1; }
};

/// Biased estimator with one global mean:
/// rho(k) = sum_{t<n-k} (x_t - m)(x_{t+k} - m) / sum_t (x_t - m)^2.
/// Throws SeriesTooShort when n < max_lag + 2, ZeroVariance for a constant
/// series.
AcfSeries autocorrelation(std::span<const double> series, std::size_t max_lag);

/// Smallest lag k with rho(k) < threshold, if any.
std::optional<std::size_t> correlation_length(const AcfSeries& acf, double threshold = 0.05);

/// Drops the first `burn` entries and keeps every thin-th entry after that.
/// Throws EmptyResult when burn >= length, ConfigError when thin < 1.
ChainTrace burn_thin(const ChainTrace& trace, std::size_t burn, std::size_t thin);

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::size_t> counts;

  double bin_width() const { return (hi - lo) / static_cast<double>(counts.size()); }
};

/// Equal-width bins over [min, max]; a degenerate range is widened to
/// [v - 0.5, v + 0.5]. The maximum lands in the last bin.
Histogram histogram(std::span<const double> values, std::size_t bins);

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // n - 1 denominator; 0 for a single value
  double min = 0.0;
  double max = 0.0;
  std::size_t n = 0;
  Histogram hist;
};

/// Throws EmptyInput for an empty sequence.
Summary summarize(std::span<const double> values, std::size_t bins = 20);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;

  double at(double x) const { return intercept + slope * x; }
};

/// Ordinary least squares. Throws FitUndefined with fewer than two distinct x.
LineFit fit_line(std::span<const double> xs, std::span<const double> ys);

/// Named metric columns of a trace (seats_avg, seats_frac, seats_index, eg,
/// mm, eg_index, mm_index, pp, county_splits, muni_splits).
const std::vector<std::string>& metric_names();
double metric_value(const MetricsReport& report, std::string_view name);
std::vector<double> metric_series(const ChainTrace& trace, std::string_view name);

struct SweepPoint {
  double cap = 0.0;
  double mean = 0.0;
  double std = 0.0;
  std::size_t n = 0;
  double mean_county_splits = 0.0;  // realized, for plotting against splits
};

struct SweepBaseline {
  double cap = 0.0;   // mean county splits of the reference ensemble
  double mean = 0.0;  // reference metric mean
};

struct SweepResult {
  std::vector<SweepPoint> points;
  LineFit fit;
  double extrapolated_cap = 0.0;
  double extrapolated_value = 0.0;
  std::optional<SweepBaseline> baseline;
};

struct SweepOptions {
  std::vector<std::size_t> county_caps;
  std::size_t muni_cap = ConstraintGate::kUnlimited;
  std::uint64_t steps = 1000;
  std::uint32_t replicates = 3;
  /// Burn-in per chain; absent means one estimated correlation length.
  std::optional<std::size_t> burn;
  std::size_t thin = 1;
  std::string metric = "seats_avg";
  /// Cap at which to report the fitted line; defaults to the baseline cap,
  /// then to the largest swept cap.
  std::optional<double> extrapolate_at;
  std::optional<SweepBaseline> baseline;
  RecomOptions recom;
  unsigned threads = 1;
};

/// Runs `replicates` reject-gated chains per cap (the chains at cap index c
/// are run_chains with seed Rng::derive_seed(seed, c)), pools their
/// post-burn-in metric values, and fits the pooled means against the cap.
SweepResult constraint_sweep(const PrecinctGraph& graph, const Plan& seed_plan,
                             const SweepOptions& options, const PlanScorer& scorer,
                             std::uint64_t seed);

/// Burn-in of one correlation length of the chosen metric; 0 for a constant
/// series, the largest examined lag when rho never drops below threshold.
std::size_t estimated_burn_in(const ChainTrace& trace, std::string_view metric,
                              double threshold = 0.05);

}  // namespace redistrict
