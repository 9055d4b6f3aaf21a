#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "redistrict/config.hpp"
#include "redistrict/error.hpp"

namespace redistrict::cli {

struct BenchRow {
  std::string configuration;
  double read_in_s = 0.0;
  std::uint64_t iterations = 0;
  double sample_s = 0.0;
  double sec_per_1000 = 0.0;
  std::uint64_t accepted = 0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
};

// Each command writes its artifacts under config.output_dir and a short
// human-readable account to `out`. Errors propagate as redistrict::Error.
void cmd_chain(const RunConfig& config, std::ostream& out);
void cmd_tree(const RunConfig& config, std::ostream& out);
void cmd_score(const RunConfig& config, std::ostream& out);
void cmd_sweep(const RunConfig& config, std::ostream& out);
BenchReport cmd_bench(const RunConfig& config, std::ostream& out);
void cmd_enumerate(const RunConfig& config, std::ostream& out);

/// 2 for configuration errors, 3 for data errors, 4 otherwise.
int exit_code(ErrorCode code) noexcept;

/// Full command line: `redistrict <command> [-c file] [--set key=value]... [--key value]...`.
/// Returns the process exit status; any failure is reported as one line
/// "error: <CodeName>: <message>" on `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace redistrict::cli
