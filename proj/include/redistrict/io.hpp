#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "redistrict/diagnostics.hpp"
#include "redistrict/graph.hpp"
#include "redistrict/metrics.hpp"
#include "redistrict/samplers.hpp"

namespace redistrict::io {

struct NodeTable {
  std::vector<PrecinctNode> nodes;
  ElectionSet elections;
};

/// nodes.csv: precinct_id, population, county_id, muni_id, area, perimeter and
/// any number of <contest>_D / <contest>_R column pairs, in any order.
NodeTable read_nodes(const std::filesystem::path& path);
NodeTable parse_nodes(const std::string& text, const std::string& source = "nodes.csv");

/// edges.csv: src, dst and optional shared_perimeter (default 1.0).
std::vector<AdjacencyEdge> read_edges(const std::filesystem::path& path,
                                      std::span<const PrecinctNode> nodes);
std::vector<AdjacencyEdge> parse_edges(const std::string& text, std::span<const PrecinctNode> nodes,
                                       const std::string& source = "edges.csv");

/// nodes.csv + edges.csv -> validated graph.
PrecinctGraph read_graph(const std::filesystem::path& nodes_path,
                         const std::filesystem::path& edges_path);

struct Assignment {
  Plan plan;
  /// Original district label of each dense label.
  std::vector<std::string> labels;
};

/// assignment.csv: precinct_id, district. Labels are made dense in ascending
/// order (numeric when every label is an integer, lexicographic otherwise).
Assignment read_assignment(const std::filesystem::path& path, const PrecinctGraph& graph);
Assignment parse_assignment(const std::string& text, const PrecinctGraph& graph,
                            const std::string& source = "assignment.csv");

void write_assignment(const std::filesystem::path& path, const PrecinctGraph& graph,
                      const Plan& plan, std::span<const std::string> labels = {});

/// Shortest decimal that round-trips to the same double.
std::string format_number(double value);

/// Column header of trace.csv (without trailing newline).
const std::string& trace_header();

/// One CSV row per entry, chains in order. Throws InternalError on a
/// non-finite metric, IoError when the file cannot be written.
void write_trace(std::span<const ChainTrace> traces, const std::filesystem::path& path);
std::string render_trace(std::span<const ChainTrace> traces);

/// metric,value rows for a single plan.
void write_report(const MetricsReport& report, const std::filesystem::path& path);
std::string render_report(const MetricsReport& report);

/// metric,mean,std,min,max,n rows.
void write_summary(std::span<const std::pair<std::string, Summary>> rows,
                   const std::filesystem::path& path);

void write_acf(const AcfSeries& acf, const std::filesystem::path& path);

/// cap,mean,std,n,mean_county_splits,fitted rows: one per swept cap
/// (fitted = 0), then the fitted line at the extrapolation cap (fitted = 1),
/// then the baseline when present (fitted = 2).
void write_sweep(const SweepResult& sweep, const std::filesystem::path& path);
std::string render_sweep(const SweepResult& sweep);

/// Standalone SVG histogram. Each bar is a <rect class="bar"> carrying a
/// data-count attribute; the optional reference value is drawn as
/// <line class="reference">. Throws EmptyInput.
std::string histogram_svg(std::span<const double> values, std::size_t bins,
                          std::optional<double> reference_line = std::nullopt,
                          const std::string& title = "");
void write_histogram_svg(std::span<const double> values, std::size_t bins,
                         const std::filesystem::path& path,
                         std::optional<double> reference_line = std::nullopt,
                         const std::string& title = "");

/// Sweep points, the fitted line, and the baseline marker as SVG.
std::string sweep_svg(const SweepResult& sweep, const std::string& metric);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace redistrict::io
