#include "redistrict/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

#include "redistrict/diagnostics.hpp"
#include "redistrict/error.hpp"
#include "redistrict/io.hpp"

namespace redistrict {

ConstraintGate RunConfig::gate() const {
  switch (mode) {
    case GateMode::Reject:
      return ConstraintGate::reject(county_cap, muni_cap);
    case GateMode::Gibbs:
      return ConstraintGate::gibbs(
          {w_county_splits, w_muni_splits, w_county_penalty, w_muni_penalty, gibbs_beta});
    case GateMode::Permissive:
      break;
  }
  return ConstraintGate::permissive();
}

RecomOptions RunConfig::recom() const {
  RecomOptions r;
  r.tolerance = pop_tol;
  r.pair_selection = pair_selection;
  r.bipartition.algorithm = tree_algorithm;
  r.bipartition.max_tree_retries = max_tree_retries;
  return r;
}

TreePlanOptions RunConfig::tree_plan() const {
  return {pop_tol, max_tree_retries, tree_algorithm};
}

unsigned RunConfig::worker_threads() const {
  if (threads > 0) return threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* what) {
  fail(ErrorCode::ConfigError, "config key " + key + ": expected " + what + ", found \"" + value + "\"");
}

template <typename T>
T parse_unsigned(const std::string& key, const std::string& value) {
  T out{};
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (value.empty() || ec != std::errc() || ptr != end) bad_value(key, value, "a nonnegative integer");
  return out;
}

int parse_int(const std::string& key, const std::string& value) {
  int out = 0;
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (value.empty() || ec != std::errc() || ptr != end) bad_value(key, value, "an integer");
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  double out = 0;
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (value.empty() || ec != std::errc() || ptr != end || !std::isfinite(out)) {
    bad_value(key, value, "a number");
  }
  return out;
}

std::size_t parse_cap(const std::string& key, const std::string& value) {
  if (value == "none") return ConstraintGate::kUnlimited;
  return parse_unsigned<std::size_t>(key, value);
}

std::vector<std::string> parse_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    const auto a = item.find_first_not_of(" \t");
    if (a == std::string::npos) continue;
    const auto b = item.find_last_not_of(" \t");
    out.push_back(item.substr(a, b - a + 1));
  }
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;
using Getter = std::function<std::string(const RunConfig&)>;

struct Key {
  Setter set;
  Getter get;
};

std::string cap_text(std::size_t cap) {
  return cap == ConstraintGate::kUnlimited ? "none" : std::to_string(cap);
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + items[i];
  return out;
}

const std::vector<std::pair<std::string, Key>>& key_table() {
  using C = RunConfig;
  using S = const std::string&;
  static const std::vector<std::pair<std::string, Key>> table = {
      {"nodes", {[](C& c, S, S v) { c.nodes = v; }, [](const C& c) { return c.nodes.string(); }}},
      {"edges", {[](C& c, S, S v) { c.edges = v; }, [](const C& c) { return c.edges.string(); }}},
      {"assignment",
       {[](C& c, S, S v) { c.assignment = v; }, [](const C& c) { return c.assignment.string(); }}},
      {"output_dir",
       {[](C& c, S, S v) { c.output_dir = v; }, [](const C& c) { return c.output_dir.string(); }}},
      {"steps",
       {[](C& c, S k, S v) { c.steps = parse_unsigned<std::uint64_t>(k, v); },
        [](const C& c) { return std::to_string(c.steps); }}},
      {"pop_tol",
       {[](C& c, S k, S v) { c.pop_tol = parse_double(k, v); },
        [](const C& c) { return io::format_number(c.pop_tol); }}},
      {"seed",
       {[](C& c, S k, S v) { c.seed = parse_unsigned<std::uint64_t>(k, v); },
        [](const C& c) { return std::to_string(c.seed); }}},
      {"burn",
       {[](C& c, S k, S v) {
          if (v == "auto") c.burn.reset();
          else c.burn = parse_unsigned<std::size_t>(k, v);
        },
        [](const C& c) { return c.burn ? std::to_string(*c.burn) : std::string("auto"); }}},
      {"thin",
       {[](C& c, S k, S v) { c.thin = parse_unsigned<std::size_t>(k, v); },
        [](const C& c) { return std::to_string(c.thin); }}},
      {"chains",
       {[](C& c, S k, S v) { c.chains = parse_unsigned<std::uint32_t>(k, v); },
        [](const C& c) { return std::to_string(c.chains); }}},
      {"threads",
       {[](C& c, S k, S v) { c.threads = parse_unsigned<unsigned>(k, v); },
        [](const C& c) { return std::to_string(c.threads); }}},
      {"county_cap",
       {[](C& c, S k, S v) { c.county_cap = parse_cap(k, v); },
        [](const C& c) { return cap_text(c.county_cap); }}},
      {"muni_cap",
       {[](C& c, S k, S v) { c.muni_cap = parse_cap(k, v); },
        [](const C& c) { return cap_text(c.muni_cap); }}},
      {"mode",
       {[](C& c, S k, S v) {
          if (v == "none" || v == "permissive") c.mode = GateMode::Permissive;
          else if (v == "reject") c.mode = GateMode::Reject;
          else if (v == "gibbs") c.mode = GateMode::Gibbs;
          else bad_value(k, v, "none, reject or gibbs");
        },
        [](const C& c) -> std::string {
          switch (c.mode) {
            case GateMode::Reject: return "reject";
            case GateMode::Gibbs: return "gibbs";
            default: return "none";
          }
        }}},
      {"w_county_splits",
       {[](C& c, S k, S v) { c.w_county_splits = parse_double(k, v); },
        [](const C& c) { return io::format_number(c.w_county_splits); }}},
      {"w_muni_splits",
       {[](C& c, S k, S v) { c.w_muni_splits = parse_double(k, v); },
        [](const C& c) { return io::format_number(c.w_muni_splits); }}},
      {"w_county_penalty",
       {[](C& c, S k, S v) { c.w_county_penalty = parse_double(k, v); },
        [](const C& c) { return io::format_number(c.w_county_penalty); }}},
      {"w_muni_penalty",
       {[](C& c, S k, S v) { c.w_muni_penalty = parse_double(k, v); },
        [](const C& c) { return io::format_number(c.w_muni_penalty); }}},
      {"gibbs_beta",
       {[](C& c, S k, S v) { c.gibbs_beta = parse_double(k, v); },
        [](const C& c) { return io::format_number(c.gibbs_beta); }}},
      {"contests",
       {[](C& c, S, S v) { c.contests = parse_list(v); }, [](const C& c) { return join(c.contests); }}},
      {"fractional_sigma",
       {[](C& c, S k, S v) { c.fractional_sigma = parse_double(k, v); },
        [](const C& c) { return io::format_number(c.fractional_sigma); }}},
      {"districts",
       {[](C& c, S k, S v) { c.districts = parse_int(k, v); },
        [](const C& c) { return std::to_string(c.districts); }}},
      {"n_plans",
       {[](C& c, S k, S v) { c.n_plans = parse_unsigned<std::uint64_t>(k, v); },
        [](const C& c) { return std::to_string(c.n_plans); }}},
      {"tree_algorithm",
       {[](C& c, S k, S v) {
          if (v == "wilson") c.tree_algorithm = TreeAlgorithm::Wilson;
          else if (v == "random_mst") c.tree_algorithm = TreeAlgorithm::RandomMst;
          else bad_value(k, v, "wilson or random_mst");
        },
        [](const C& c) -> std::string {
          return c.tree_algorithm == TreeAlgorithm::Wilson ? "wilson" : "random_mst";
        }}},
      {"pair_selection",
       {[](C& c, S k, S v) {
          if (v == "uniform_pair") c.pair_selection = PairSelection::UniformPair;
          else if (v == "cut_edge") c.pair_selection = PairSelection::CutEdge;
          else bad_value(k, v, "uniform_pair or cut_edge");
        },
        [](const C& c) -> std::string {
          return c.pair_selection == PairSelection::UniformPair ? "uniform_pair" : "cut_edge";
        }}},
      {"max_tree_retries",
       {[](C& c, S k, S v) { c.max_tree_retries = parse_int(k, v); },
        [](const C& c) { return std::to_string(c.max_tree_retries); }}},
      {"max_tree_failures",
       {[](C& c, S k, S v) { c.max_tree_failures = parse_unsigned<std::uint64_t>(k, v); },
        [](const C& c) { return std::to_string(c.max_tree_failures); }}},
      {"bins",
       {[](C& c, S k, S v) { c.bins = parse_unsigned<std::size_t>(k, v); },
        [](const C& c) { return std::to_string(c.bins); }}},
      {"acf_max_lag",
       {[](C& c, S k, S v) { c.acf_max_lag = parse_unsigned<std::size_t>(k, v); },
        [](const C& c) { return std::to_string(c.acf_max_lag); }}},
      {"sweep_caps",
       {[](C& c, S k, S v) {
          c.sweep_caps.clear();
          for (const auto& item : parse_list(v)) c.sweep_caps.push_back(parse_unsigned<std::size_t>(k, item));
        },
        [](const C& c) {
          std::vector<std::string> items;
          for (auto cap : c.sweep_caps) items.push_back(std::to_string(cap));
          return join(items);
        }}},
      {"sweep_replicates",
       {[](C& c, S k, S v) { c.sweep_replicates = parse_unsigned<std::uint32_t>(k, v); },
        [](const C& c) { return std::to_string(c.sweep_replicates); }}},
      {"sweep_metric",
       {[](C& c, S, S v) { c.sweep_metric = v; }, [](const C& c) { return c.sweep_metric; }}},
      {"sweep_at_cap",
       {[](C& c, S k, S v) {
          if (v == "auto") c.sweep_at_cap.reset();
          else c.sweep_at_cap = parse_double(k, v);
        },
        [](const C& c) {
          return c.sweep_at_cap ? io::format_number(*c.sweep_at_cap) : std::string("auto");
        }}},
      {"sweep_baseline_plans",
       {[](C& c, S k, S v) { c.sweep_baseline_plans = parse_unsigned<std::uint64_t>(k, v); },
        [](const C& c) { return std::to_string(c.sweep_baseline_plans); }}},
      {"bench_iterations",
       {[](C& c, S k, S v) { c.bench_iterations = parse_unsigned<std::uint64_t>(k, v); },
        [](const C& c) { return std::to_string(c.bench_iterations); }}},
      {"bench_tree_plans",
       {[](C& c, S k, S v) { c.bench_tree_plans = parse_unsigned<std::uint64_t>(k, v); },
        [](const C& c) { return std::to_string(c.bench_tree_plans); }}},
  };
  return table;
}

const Key* find_key(const std::string& name) {
  for (const auto& [k, key] : key_table()) {
    if (k == name) return &key;
  }
  return nullptr;
}

std::string strip(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& [k, key] : key_table()) out.push_back(k);
    return out;
  }();
  return keys;
}

void apply_setting(RunConfig& config, const std::string& key, const std::string& value) {
  const Key* k = find_key(key);
  if (k == nullptr) fail(ErrorCode::UnknownConfigKey, "unknown config key \"" + key + "\"");
  k->set(config, key, value);
}

RunConfig parse_config(const std::string& text, const std::string& source) {
  RunConfig config;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = strip(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::ConfigError, source + ":" + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = strip(line.substr(0, eq));
    try {
      apply_setting(config, key, strip(line.substr(eq + 1)));
    } catch (const Error& e) {
      throw Error(e.code(), source + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) {
    fail(ErrorCode::ConfigError, "cannot read config file " + path.string());
  }
  auto config = parse_config(io::read_text(path), path.string());
  const auto base = path.parent_path();
  for (auto* p : {&config.nodes, &config.edges, &config.assignment, &config.output_dir}) {
    if (!p->empty() && p->is_relative()) *p = base / *p;
  }
  return config;
}

void validate_config(const RunConfig& c) {
  auto check = [](bool ok, const std::string& message) {
    if (!ok) fail(ErrorCode::ConfigError, message);
  };
  check(c.steps >= 1, "steps must be at least 1");
  check(c.pop_tol > 0.0 && c.pop_tol < 1.0, "pop_tol must lie strictly between 0 and 1");
  check(c.thin >= 1, "thin must be at least 1");
  check(c.chains >= 1, "chains must be at least 1");
  check(c.fractional_sigma > 0.0, "fractional_sigma must be positive");
  check(c.districts >= 0, "districts must be nonnegative");
  check(c.max_tree_retries >= 1, "max_tree_retries must be at least 1");
  check(c.bins >= 1, "bins must be at least 1");
  check(c.gibbs_beta >= 0.0, "gibbs_beta must be nonnegative");
  for (double w : {c.w_county_splits, c.w_muni_splits, c.w_county_penalty, c.w_muni_penalty}) {
    check(w >= 0.0, "gibbs weights must be nonnegative");
  }
  check(c.sweep_replicates >= 1, "sweep_replicates must be at least 1");
  check(c.bench_iterations >= 1, "bench_iterations must be at least 1");
  const auto& names = metric_names();
  check(std::find(names.begin(), names.end(), c.sweep_metric) != names.end(),
        "unknown sweep_metric \"" + c.sweep_metric + "\"");
}

std::string render_config(const RunConfig& config) {
  std::string out;
  for (const auto& [k, key] : key_table()) out += k + " = " + key.get(config) + "\n";
  return out;
}

}  // namespace redistrict
