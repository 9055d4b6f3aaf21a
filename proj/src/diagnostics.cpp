#include "redistrict/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "redistrict/error.hpp"

namespace redistrict {

AcfSeries autocorrelation(std::span<const double> series, std::size_t max_lag) {
  const std::size_t n = series.size();
  if (n < max_lag + 2) {
    fail(ErrorCode::SeriesTooShort, "series of length " + std::to_string(n) +
                                        " is too short for lag " + std::to_string(max_lag));
  }
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
  std::vector<double> centered(n);
  for (std::size_t t = 0; t < n; ++t) centered[t] = series[t] - mean;

  double denom = 0.0;
  for (double c : centered) denom += c * c;
  if (!(denom > 0.0)) fail(ErrorCode::ZeroVariance, "series has zero variance");

  AcfSeries acf;
  acf.rho.resize(max_lag + 1);
  acf.rho[0] = 1.0;
  for (std::size_t k = 1; k <= max_lag; ++k) {
    double num = 0.0;
    for (std::size_t t = 0; t + k < n; ++t) num += centered[t] * centered[t + k];
    acf.rho[k] = num / denom;
  }
  return acf;
}

std::optional<std::size_t> correlation_length(const AcfSeries& acf, double threshold) {
  for (std::size_t k = 0; k < acf.rho.size(); ++k) {
    if (acf.rho[k] < threshold) return k;
  }
  return std::nullopt;
}

ChainTrace burn_thin(const ChainTrace& trace, std::size_t burn, std::size_t thin) {
  if (thin < 1) fail(ErrorCode::ConfigError, "thin must be at least 1");
  if (burn >= trace.size()) {
    fail(ErrorCode::EmptyResult, "burn-in of " + std::to_string(burn) +
                                     " leaves nothing of a trace of length " +
                                     std::to_string(trace.size()));
  }
  ChainTrace out;
  out.counters = trace.counters;
  out.seed_splits = trace.seed_splits;
  for (std::size_t i = burn; i < trace.size(); i += thin) out.entries.push_back(trace.entries[i]);
  return out;
}

Histogram histogram(std::span<const double> values, std::size_t bins) {
  if (values.empty()) fail(ErrorCode::EmptyInput, "histogram of no values");
  if (bins < 1) fail(ErrorCode::ConfigError, "histogram needs at least one bin");
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  Histogram h;
  h.lo = *mn;
  h.hi = *mx;
  if (h.hi == h.lo) {
    h.lo -= 0.5;
    h.hi += 0.5;
  }
  h.counts.assign(bins, 0);
  const double width = h.bin_width();
  for (double v : values) {
    auto b = static_cast<std::size_t>(std::floor((v - h.lo) / width));
    ++h.counts[std::min(b, bins - 1)];
  }
  return h;
}

Summary summarize(std::span<const double> values, std::size_t bins) {
  if (values.empty()) fail(ErrorCode::EmptyInput, "summary of no values");
  Summary s;
  s.n = values.size();
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.n);
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std = s.n > 1 ? std::sqrt(ss / static_cast<double>(s.n - 1)) : 0.0;
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  s.min = *mn;
  s.max = *mx;
  s.hist = histogram(values, bins);
  return s;
}

LineFit fit_line(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) fail(ErrorCode::InternalError, "fit_line: length mismatch");
  if (xs.size() < 2 || std::all_of(xs.begin(), xs.end(), [&](double x) { return x == xs[0]; })) {
    fail(ErrorCode::FitUndefined, "a line fit needs at least two distinct x values");
  }
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names{"seats_avg", "seats_frac", "seats_index", "eg",
                                              "mm",        "eg_index",   "mm_index",    "pp",
                                              "county_splits", "muni_splits"};
  return names;
}

double metric_value(const MetricsReport& r, std::string_view name) {
  if (name == "seats_avg") return r.seats_avg;
  if (name == "seats_frac") return r.seats_frac;
  if (name == "seats_index") return r.seats_index;
  if (name == "eg") return r.efficiency_gap;
  if (name == "mm") return r.mean_median;
  if (name == "eg_index") return r.efficiency_gap_index;
  if (name == "mm_index") return r.mean_median_index;
  if (name == "pp") return r.polsby_popper;
  if (name == "county_splits") return static_cast<double>(r.splits.county_splits);
  if (name == "muni_splits") return static_cast<double>(r.splits.muni_splits);
  fail(ErrorCode::ConfigError, "unknown metric '" + std::string(name) + "'");
}

std::vector<double> metric_series(const ChainTrace& trace, std::string_view name) {
  std::vector<double> out;
  out.reserve(trace.size());
  for (const auto& e : trace.entries) out.push_back(metric_value(e.metrics, name));
  return out;
}

std::size_t estimated_burn_in(const ChainTrace& trace, std::string_view metric, double threshold) {
  if (trace.size() < 3) return 0;
  const auto series = metric_series(trace, metric);
  if (std::all_of(series.begin(), series.end(), [&](double v) { return v == series[0]; })) return 0;
  const std::size_t max_lag = std::min<std::size_t>(trace.size() - 2, 1000);
  const auto acf = autocorrelation(series, max_lag);
  return correlation_length(acf, threshold).value_or(max_lag);
}

SweepResult constraint_sweep(const PrecinctGraph& graph, const Plan& seed_plan,
                             const SweepOptions& options, const PlanScorer& scorer,
                             std::uint64_t seed) {
  if (options.county_caps.size() < 2) {
    fail(ErrorCode::FitUndefined, "a sweep needs at least two caps");
  }
  if (options.replicates < 1) fail(ErrorCode::ConfigError, "sweep needs at least one replicate");

  SweepResult result;
  for (std::size_t c = 0; c < options.county_caps.size(); ++c) {
    ChainOptions chain;
    chain.recom = options.recom;
    chain.gate = ConstraintGate::reject(options.county_caps[c], options.muni_cap);
    const auto traces =
        run_chains(graph, seed_plan, options.steps, options.replicates, chain, scorer,
                   Rng::derive_seed(seed, c), options.threads);

    std::vector<double> pooled, splits;
    for (const auto& trace : traces) {
      const auto burn = options.burn.value_or(estimated_burn_in(trace, options.metric));
      const auto kept = burn_thin(trace, burn, options.thin);
      for (const auto& e : kept.entries) {
        pooled.push_back(metric_value(e.metrics, options.metric));
        splits.push_back(static_cast<double>(e.metrics.splits.county_splits));
      }
    }
    const auto s = summarize(pooled, 1);
    const double mean_splits =
        std::accumulate(splits.begin(), splits.end(), 0.0) / static_cast<double>(splits.size());
    result.points.push_back({static_cast<double>(options.county_caps[c]), s.mean, s.std, s.n,
                             mean_splits});
  }

  std::vector<double> xs, ys;
  for (const auto& p : result.points) {
    xs.push_back(p.cap);
    ys.push_back(p.mean);
  }
  result.fit = fit_line(xs, ys);
  result.baseline = options.baseline;
  if (options.extrapolate_at) {
    result.extrapolated_cap = *options.extrapolate_at;
  } else if (options.baseline) {
    result.extrapolated_cap = options.baseline->cap;
  } else {
    result.extrapolated_cap = *std::max_element(xs.begin(), xs.end());
  }
  result.extrapolated_value = result.fit.at(result.extrapolated_cap);
  return result;
}

}  // namespace redistrict
