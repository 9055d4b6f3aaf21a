#include "redistrict/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <map>
#include <optional>

#include "redistrict/diagnostics.hpp"
#include "redistrict/io.hpp"
#include "redistrict/oracle.hpp"

namespace redistrict::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

PrecinctGraph load_graph(const RunConfig& config) {
  if (config.nodes.empty() || config.edges.empty()) {
    fail(ErrorCode::ConfigError, "nodes and edges must both be set");
  }
  return io::read_graph(config.nodes, config.edges);
}

MetricsConfig metrics_config(const PrecinctGraph& graph, const RunConfig& config) {
  MetricsConfig m;
  m.fractional_sigma = config.fractional_sigma;
  m.contests = config.contests;
  if (m.contests.empty()) {
    for (const auto& c : graph.elections().contests) m.contests.push_back(c.name);
  }
  if (m.contests.empty()) fail(ErrorCode::ConfigError, "nodes file has no <contest>_D/_R columns");
  for (const auto& name : m.contests) {
    if (graph.elections().find(name) == nullptr) {
      fail(ErrorCode::ConfigError, "contest '" + name + "' is not in the nodes file");
    }
  }
  validate_metrics_config(graph, m);
  return m;
}

io::Assignment load_plan(const PrecinctGraph& graph, const RunConfig& config) {
  if (config.assignment.empty()) fail(ErrorCode::ConfigError, "assignment must be set");
  auto a = io::read_assignment(config.assignment, graph);
  if (config.districts != 0 && config.districts != a.plan.k) {
    fail(ErrorCode::ConfigError, "districts = " + std::to_string(config.districts) +
                                     " but the assignment has " + std::to_string(a.plan.k));
  }
  return a;
}

int district_count(const PrecinctGraph& graph, const RunConfig& config) {
  if (config.districts > 0) return config.districts;
  if (!config.assignment.empty()) return load_plan(graph, config).plan.k;
  fail(ErrorCode::ConfigError, "districts must be set (or an assignment given)");
}

std::size_t burn_for(const RunConfig& config, const ChainTrace& trace) {
  return config.burn.value_or(estimated_burn_in(trace, "seats_avg"));
}

// Pooled post-burn-in values of every metric over all traces.
std::map<std::string, std::vector<double>> pooled_metrics(const std::vector<ChainTrace>& kept) {
  std::map<std::string, std::vector<double>> out;
  for (const auto& name : metric_names()) {
    auto& values = out[name];
    for (const auto& t : kept) {
      const auto s = metric_series(t, name);
      values.insert(values.end(), s.begin(), s.end());
    }
  }
  return out;
}

void write_ensemble_outputs(const RunConfig& config, const std::vector<ChainTrace>& traces,
                            const std::vector<ChainTrace>& kept,
                            const std::optional<MetricsReport>& reference, std::ostream& out) {
  std::filesystem::create_directories(config.output_dir);
  io::write_trace(traces, config.output_dir / "trace.csv");

  const auto pooled = pooled_metrics(kept);
  std::vector<std::pair<std::string, Summary>> rows;
  for (const auto& name : metric_names()) rows.emplace_back(name, summarize(pooled.at(name), config.bins));
  io::write_summary(rows, config.output_dir / "summary.csv");

  for (const char* name : {"seats_avg", "seats_index", "eg", "mm", "pp"}) {
    std::optional<double> ref;
    if (reference) ref = metric_value(*reference, name);
    io::write_histogram_svg(pooled.at(name), config.bins,
                            config.output_dir / (std::string("hist_") + name + ".svg"), ref, name);
  }

  const auto series = metric_series(traces.front(), "seats_avg");
  const std::size_t lag = std::min(config.acf_max_lag, series.size() >= 2 ? series.size() - 2 : 0);
  const bool constant =
      std::all_of(series.begin(), series.end(), [&](double v) { return v == series.front(); });
  if (series.size() >= 2 && !constant) {
    const auto acf = autocorrelation(series, lag);
    io::write_acf(acf, config.output_dir / "acf.csv");
    if (const auto len = correlation_length(acf)) out << "correlation length (seats_avg): " << *len << "\n";
  } else {
    out << "acf skipped: seats_avg is constant\n";
  }

  out << "summary (post burn-in, pooled):\n";
  for (const auto& [name, s] : rows) {
    out << "  " << name << ": mean " << io::format_number(s.mean) << " std "
        << io::format_number(s.std) << " n " << s.n << "\n";
  }
}

}  // namespace

void cmd_chain(const RunConfig& config, std::ostream& out) {
  validate_config(config);
  const auto graph = load_graph(config);
  const auto seed = load_plan(graph, config);
  const PlanScorer scorer(graph, metrics_config(graph, config));

  ChainOptions options;
  options.recom = config.recom();
  options.gate = config.gate();
  const auto traces = run_chains(graph, seed.plan, config.steps, config.chains, options, scorer,
                                 config.seed, config.worker_threads());

  std::vector<ChainTrace> kept;
  for (std::size_t c = 0; c < traces.size(); ++c) {
    const auto& k = traces[c].counters;
    const auto burn = burn_for(config, traces[c]);
    out << "chain " << c << ": proposed " << k.proposed << ", accepted " << k.accepted << " ("
        << fixed(k.proposed ? 100.0 * static_cast<double>(k.accepted) / static_cast<double>(k.proposed) : 0.0, 1)
        << "%), rejected by constraint " << k.rejected_by_constraint << ", no cut "
        << k.rejected_no_cut << ", burn-in " << burn << "\n";
    kept.push_back(burn_thin(traces[c], burn, config.thin));
  }
  write_ensemble_outputs(config, traces, kept, scorer.score(seed.plan), out);
}

void cmd_tree(const RunConfig& config, std::ostream& out) {
  validate_config(config);
  if (config.mode != GateMode::Permissive) {
    fail(ErrorCode::ConfigError, "random-tree plans cannot be constrained; set mode = none");
  }
  const auto graph = load_graph(config);
  const int k = district_count(graph, config);
  const PlanScorer scorer(graph, metrics_config(graph, config));

  TreeEnsembleOptions options;
  options.plan = config.tree_plan();
  options.max_failures = config.max_tree_failures;
  options.threads = config.worker_threads();
  const auto trace = tree_ensemble(graph, k, config.n_plans, options, scorer, config.seed);
  out << "tree plans: " << trace.size() << " drawn in " << trace.counters.proposed
      << " attempts (" << trace.counters.rejected_no_cut << " failed)\n";

  std::optional<MetricsReport> reference;
  if (!config.assignment.empty()) reference = scorer.score(load_plan(graph, config).plan);
  write_ensemble_outputs(config, {trace}, {trace}, reference, out);
}

void cmd_score(const RunConfig& config, std::ostream& out) {
  const auto graph = load_graph(config);
  const auto plan = load_plan(graph, config);
  const auto report = score_plan(graph, plan.plan, metrics_config(graph, config));
  const auto text = io::render_report(report);
  std::filesystem::create_directories(config.output_dir);
  io::write_text(config.output_dir / "report.csv", text);
  out << text;
}

void cmd_sweep(const RunConfig& config, std::ostream& out) {
  validate_config(config);
  const auto graph = load_graph(config);
  const auto seed = load_plan(graph, config);
  const PlanScorer scorer(graph, metrics_config(graph, config));

  SweepOptions options;
  options.county_caps = config.sweep_caps;
  options.muni_cap = config.muni_cap;
  options.steps = config.steps;
  options.replicates = config.sweep_replicates;
  options.burn = config.burn;
  options.thin = config.thin;
  options.metric = config.sweep_metric;
  options.extrapolate_at = config.sweep_at_cap;
  options.recom = config.recom();
  options.threads = config.worker_threads();

  if (config.sweep_baseline_plans > 0) {
    TreeEnsembleOptions tree;
    tree.plan = config.tree_plan();
    tree.max_failures = config.max_tree_failures;
    tree.threads = config.worker_threads();
    const auto trace = tree_ensemble(graph, seed.plan.k, config.sweep_baseline_plans, tree, scorer,
                                     Rng::derive_seed(config.seed, 0x7472656562617365ULL));
    const auto metric = metric_series(trace, config.sweep_metric);
    const auto splits = metric_series(trace, "county_splits");
    options.baseline = SweepBaseline{summarize(splits, 1).mean, summarize(metric, 1).mean};
  }

  const auto result = constraint_sweep(graph, seed.plan, options, scorer, config.seed);
  std::filesystem::create_directories(config.output_dir);
  const auto text = io::render_sweep(result);
  io::write_text(config.output_dir / "sweep.csv", text);
  io::write_text(config.output_dir / "sweep.svg", io::sweep_svg(result, config.sweep_metric));
  out << text;
  out << "fit: " << config.sweep_metric << " = " << io::format_number(result.fit.intercept) << " + "
      << io::format_number(result.fit.slope) << " * cap\n";
}

BenchReport cmd_bench(const RunConfig& config, std::ostream& out) {
  validate_config(config);
  auto start = Clock::now();
  const auto graph = load_graph(config);
  const double read_in = seconds_since(start);
  const auto seed = load_plan(graph, config);
  const PlanScorer scorer(graph, metrics_config(graph, config));
  const auto seed_splits = split_report(graph, seed.plan);

  BenchReport report;
  auto chain_row = [&](const std::string& name, const ConstraintGate& gate) {
    ChainOptions options;
    options.recom = config.recom();
    options.gate = gate;
    const auto t0 = Clock::now();
    const auto trace = run_chain(graph, seed.plan, config.bench_iterations, options, scorer, config.seed);
    const double s = seconds_since(t0);
    report.rows.push_back({name, read_in, config.bench_iterations, s,
                           s * 1000.0 / static_cast<double>(config.bench_iterations),
                           trace.counters.accepted});
  };

  chain_row("recom", ConstraintGate::permissive());
  // Caps default to the seed plan's own splits so the seed is admissible.
  const auto county_cap =
      config.county_cap == ConstraintGate::kUnlimited ? seed_splits.county_splits : config.county_cap;
  const auto muni_cap =
      config.muni_cap == ConstraintGate::kUnlimited ? seed_splits.muni_splits : config.muni_cap;
  chain_row("recom_reject_2", ConstraintGate::reject(county_cap, muni_cap));
  chain_row("recom_gibbs", ConstraintGate::gibbs({config.w_county_splits, config.w_muni_splits,
                                                  config.w_county_penalty, config.w_muni_penalty,
                                                  config.gibbs_beta}));

  TreeEnsembleOptions tree;
  tree.plan = config.tree_plan();
  tree.max_failures = config.max_tree_failures;
  tree.threads = 1;
  const auto t0 = Clock::now();
  const auto trace = tree_ensemble(graph, seed.plan.k, config.bench_tree_plans, tree, scorer, config.seed);
  const double s = seconds_since(t0);
  report.rows.push_back({"random_tree", read_in, config.bench_tree_plans, s,
                         s * 1000.0 / static_cast<double>(config.bench_tree_plans), trace.size()});

  std::string csv = "configuration,read_in_graph_s,iterations,sample_s,sec_per_1000_iterations,accepted\n";
  for (const auto& r : report.rows) {
    csv += r.configuration + "," + fixed(r.read_in_s, 4) + "," + std::to_string(r.iterations) + "," +
           fixed(r.sample_s, 4) + "," + fixed(r.sec_per_1000, 4) + "," + std::to_string(r.accepted) + "\n";
  }
  std::filesystem::create_directories(config.output_dir);
  io::write_text(config.output_dir / "bench.csv", csv);
  out << csv;
  return report;
}

void cmd_enumerate(const RunConfig& config, std::ostream& out) {
  validate_config(config);
  const auto graph = load_graph(config);
  const int k = district_count(graph, config);
  const auto catalog = oracle::enumerate_partitions(graph, k, config.pop_tol);

  std::string csv = "plan";
  for (const auto& node : graph.nodes()) csv += "," + node.precinct_id;
  csv += "\n";
  std::size_t i = 0;
  for (const auto& plan : catalog.plans) {
    csv += std::to_string(i++);
    for (auto d : plan) csv += "," + std::to_string(d);
    csv += "\n";
  }
  std::filesystem::create_directories(config.output_dir);
  io::write_text(config.output_dir / "enumerate.csv", csv);
  out << "partitions: " << catalog.size() << "\n";
}

int exit_code(ErrorCode code) noexcept {
  switch (error_category(code)) {
    case ErrorCategory::Config: return 2;
    case ErrorCategory::Data: return 3;
    case ErrorCategory::Runtime: break;
  }
  return 4;
}

namespace {

std::string one_line(std::string s) {
  for (auto& ch : s) {
    if (ch == '\n' || ch == '\r') ch = ' ';
  }
  return s;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Redistricting ensembles: recombination chains, random-tree plans, metrics"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> sets;
  std::map<std::string, std::string> flags;

  using Command = void (*)(const RunConfig&, std::ostream&);
  const std::vector<std::tuple<std::string, std::string, Command>> commands = {
      {"chain", "run recombination chains", cmd_chain},
      {"tree", "draw independent random-tree plans", cmd_tree},
      {"score", "score one plan", cmd_score},
      {"sweep", "county-cap constraint sweep", cmd_sweep},
      {"bench", "time graph read-in and 1000-step sampling", nullptr},
      {"enumerate", "list every balanced contiguous partition of a small graph", cmd_enumerate},
  };
  for (const auto& [name, help, fn] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", config_path, "flat key = value config file");
    sub->add_option("--set", sets, "key=value override (repeatable)");
    for (const auto& key : config_keys()) sub->add_option("--" + key, flags[key], "config key " + key);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: ConfigError: " << one_line(e.what()) << "\n";
    return 2;
  }

  try {
    RunConfig config = config_path.empty() ? RunConfig{} : load_config(config_path);
    for (const auto& key : config_keys()) {
      for (auto* sub : app.get_subcommands()) {
        if (sub->count("--" + key) > 0) apply_setting(config, key, flags[key]);
      }
    }
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) fail(ErrorCode::ConfigError, "--set expects key=value, got \"" + s + "\"");
      apply_setting(config, s.substr(0, eq), s.substr(eq + 1));
    }
    const auto name = app.get_subcommands().front()->get_name();
    if (name == "bench") {
      cmd_bench(config, out);
    } else {
      for (const auto& [n, help, fn] : commands) {
        if (n == name) fn(config, out);
      }
    }
    return 0;
  } catch (const Error& e) {
    err << "error: " << error_code_name(e.code()) << ": " << one_line(e.what()) << "\n";
    return exit_code(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: IoError: " << one_line(e.what()) << "\n";
    return 4;
  } catch (const std::exception& e) {
    err << "error: InternalError: " << one_line(e.what()) << "\n";
    return 4;
  }
}

}  // namespace redistrict::cli
