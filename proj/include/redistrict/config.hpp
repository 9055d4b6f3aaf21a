#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "redistrict/constraints.hpp"
#include "redistrict/graph.hpp"
#include "redistrict/samplers.hpp"
#include "redistrict/spanning_tree.hpp"

namespace redistrict {

// Field names match the config-file keys one to one.
struct RunConfig {
  std::filesystem::path nodes;
  std::filesystem::path edges;
  std::filesystem::path assignment;
  std::filesystem::path output_dir = "out";

  std::uint64_t steps = 1000;
  double pop_tol = 0.02;
  std::uint64_t seed = 0;
  std::optional<std::size_t> burn;  // absent = auto (one correlation length)
  std::size_t thin = 1;
  std::uint32_t chains = 1;
  unsigned threads = 0;  // 0 = available cores

  std::size_t county_cap = ConstraintGate::kUnlimited;
  std::size_t muni_cap = ConstraintGate::kUnlimited;
  GateMode mode = GateMode::Permissive;
  double w_county_splits = 0.0;
  double w_muni_splits = 0.0;
  double w_county_penalty = 0.3;
  double w_muni_penalty = 0.0;
  double gibbs_beta = 1.0;

  std::vector<std::string> contests;  // empty = every contest in nodes.csv
  double fractional_sigma = 0.05;

  int districts = 0;  // 0 = take k from the assignment
  std::uint64_t n_plans = 1000;
  TreeAlgorithm tree_algorithm = TreeAlgorithm::Wilson;
  PairSelection pair_selection = PairSelection::UniformPair;
  int max_tree_retries = 50;
  std::uint64_t max_tree_failures = 10000;

  std::size_t bins = 20;
  std::size_t acf_max_lag = 100;

  std::vector<std::size_t> sweep_caps;
  std::uint32_t sweep_replicates = 3;
  std::string sweep_metric = "seats_avg";
  std::optional<double> sweep_at_cap;
  std::uint64_t sweep_baseline_plans = 0;  // 0 = no tree baseline

  std::uint64_t bench_iterations = 1000;
  std::uint64_t bench_tree_plans = 100;

  ConstraintGate gate() const;
  RecomOptions recom() const;
  TreePlanOptions tree_plan() const;
  unsigned worker_threads() const;
};

const std::vector<std::string>& config_keys();

/// Sets one key from its text form. Throws UnknownConfigKey or ConfigError.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

/// Flat "key = value" lines; '#' starts a comment. Relative paths are kept
/// as written.
RunConfig parse_config(const std::string& text, const std::string& source = "config");

/// parse_config on a file; relative paths resolve against the file's
/// directory.
RunConfig load_config(const std::filesystem::path& path);

/// Range checks that need no data. Throws ConfigError.
void validate_config(const RunConfig& config);

/// Canonical key = value text for every key.
std::string render_config(const RunConfig& config);

}  // namespace redistrict
