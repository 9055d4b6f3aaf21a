#include "redistrict/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "redistrict/error.hpp"

namespace redistrict::io {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;

  std::optional<std::size_t> column(const std::string& name) const {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  }
};

CsvTable parse_csv(const std::string& text, const std::string& source) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    if (table.header.empty()) {
      table.header = std::move(fields);
      continue;
    }
    if (fields.size() != table.header.size()) {
      fail(ErrorCode::MissingColumn, source + ":" + std::to_string(line_no) + ": expected " +
                                         std::to_string(table.header.size()) + " fields, found " +
                                         std::to_string(fields.size()));
    }
    table.rows.push_back(std::move(fields));
    table.line_numbers.push_back(line_no);
  }
  if (table.header.empty()) fail(ErrorCode::EmptyFile, source + ": file is empty");
  if (table.rows.empty()) fail(ErrorCode::EmptyFile, source + ": no data rows");
  return table;
}

std::size_t require_column(const CsvTable& table, const std::string& name, const std::string& source) {
  auto c = table.column(name);
  if (!c) fail(ErrorCode::MissingColumn, source + ": missing column \"" + name + "\"");
  return *c;
}

std::string where(const std::string& source, const CsvTable& t, std::size_t row,
                  const std::string& column) {
  return source + ":" + std::to_string(t.line_numbers[row]) + ": column " + column;
}

std::int64_t parse_count(const std::string& field, const std::string& context) {
  std::int64_t value = 0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc() || ptr != end || value < 0) {
    fail(ErrorCode::NonNumericValue, context + ": expected a nonnegative integer, found \"" + field + "\"");
  }
  return value;
}

double parse_real(const std::string& field, const std::string& context) {
  double value = 0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    fail(ErrorCode::NonNumericValue, context + ": expected a number, found \"" + field + "\"");
  }
  return value;
}

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() > suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) fail(ErrorCode::IoError, "write failed for " + path.string());
}

NodeTable parse_nodes(const std::string& text, const std::string& source) {
  const auto table = parse_csv(text, source);
  const auto c_id = require_column(table, "precinct_id", source);
  const auto c_pop = require_column(table, "population", source);
  const auto c_county = require_column(table, "county_id", source);
  const auto c_muni = require_column(table, "muni_id", source);
  const auto c_area = require_column(table, "area", source);
  const auto c_perim = require_column(table, "perimeter", source);

  // Contest columns, in header order of their _D column.
  std::vector<std::tuple<std::string, std::size_t, std::size_t>> contests;
  for (const auto& name : table.header) {
    if (ends_with(name, "_D")) {
      const auto contest = name.substr(0, name.size() - 2);
      const auto rep = table.column(contest + "_R");
      if (!rep) fail(ErrorCode::MissingVoteColumn, source + ": contest " + contest + " lacks " + contest + "_R");
      contests.emplace_back(contest, *table.column(name), *rep);
    } else if (ends_with(name, "_R")) {
      const auto contest = name.substr(0, name.size() - 2);
      if (!table.column(contest + "_D")) {
        fail(ErrorCode::MissingVoteColumn, source + ": contest " + contest + " lacks " + contest + "_D");
      }
    }
  }

  NodeTable out;
  out.nodes.reserve(table.rows.size());
  for (const auto& [name, cd, cr] : contests) out.elections.contests.push_back({name, {}, {}});
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    PrecinctNode node;
    node.precinct_id = row[c_id];
    node.population = parse_count(row[c_pop], where(source, table, r, "population"));
    node.county_id = row[c_county];
    node.muni_id = row[c_muni];
    node.area = parse_real(row[c_area], where(source, table, r, "area"));
    node.perimeter = parse_real(row[c_perim], where(source, table, r, "perimeter"));
    out.nodes.push_back(std::move(node));
    for (std::size_t c = 0; c < contests.size(); ++c) {
      const auto& [name, cd, cr] = contests[c];
      auto& contest = out.elections.contests[c];
      contest.dem.push_back(parse_count(row[cd], where(source, table, r, table.header[cd])));
      contest.rep.push_back(parse_count(row[cr], where(source, table, r, table.header[cr])));
    }
  }
  return out;
}

NodeTable read_nodes(const std::filesystem::path& path) {
  return parse_nodes(read_text(path), path.string());
}

std::vector<AdjacencyEdge> parse_edges(const std::string& text, std::span<const PrecinctNode> nodes,
                                       const std::string& source) {
  const auto table = parse_csv(text, source);
  const auto c_src = require_column(table, "src", source);
  const auto c_dst = require_column(table, "dst", source);
  const auto c_shared = table.column("shared_perimeter");

  std::unordered_map<std::string, NodeId> index;
  for (NodeId v = 0; v < nodes.size(); ++v) index.emplace(nodes[v].precinct_id, v);

  std::set<std::pair<NodeId, NodeId>> seen;
  std::vector<AdjacencyEdge> edges;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const auto a = index.find(row[c_src]);
    const auto b = index.find(row[c_dst]);
    if (a == index.end() || b == index.end()) {
      fail(ErrorCode::DanglingEdge, source + ":" + std::to_string(table.line_numbers[r]) +
                                        ": edge names unknown precinct \"" +
                                        (a == index.end() ? row[c_src] : row[c_dst]) + "\"");
    }
    const auto key = std::minmax(a->second, b->second);
    if (!seen.insert(key).second) {
      fail(ErrorCode::DuplicateEdge, source + ":" + std::to_string(table.line_numbers[r]) +
                                         ": duplicate edge " + row[c_src] + "-" + row[c_dst]);
    }
    AdjacencyEdge e{a->second, b->second, 1.0};
    if (c_shared && !row[*c_shared].empty()) {
      e.shared_perimeter = parse_real(row[*c_shared], where(source, table, r, "shared_perimeter"));
    }
    edges.push_back(e);
  }
  return edges;
}

std::vector<AdjacencyEdge> read_edges(const std::filesystem::path& path,
                                      std::span<const PrecinctNode> nodes) {
  return parse_edges(read_text(path), nodes, path.string());
}

PrecinctGraph read_graph(const std::filesystem::path& nodes_path,
                         const std::filesystem::path& edges_path) {
  auto table = read_nodes(nodes_path);
  auto edges = read_edges(edges_path, table.nodes);
  return build_graph(std::move(table.nodes), std::move(edges), std::move(table.elections));
}

Assignment parse_assignment(const std::string& text, const PrecinctGraph& graph,
                            const std::string& source) {
  const auto table = parse_csv(text, source);
  const auto c_id = require_column(table, "precinct_id", source);
  const auto c_district = require_column(table, "district", source);

  std::vector<std::string> raw(graph.node_count());
  std::vector<bool> seen(graph.node_count(), false);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const auto v = graph.index_of(row[c_id]);
    if (v == graph.node_count()) {
      fail(ErrorCode::UnknownPrecinct, source + ":" + std::to_string(table.line_numbers[r]) +
                                           ": unknown precinct \"" + row[c_id] + "\"");
    }
    if (seen[v]) {
      fail(ErrorCode::DuplicatePrecinctId, source + ": precinct \"" + row[c_id] + "\" assigned twice");
    }
    if (row[c_district].empty()) {
      fail(ErrorCode::InvalidPlan, source + ": precinct \"" + row[c_id] + "\" has no district");
    }
    seen[v] = true;
    raw[v] = row[c_district];
  }
  for (NodeId v = 0; v < graph.node_count(); ++v) {
    if (!seen[v]) {
      fail(ErrorCode::MissingPrecinct, source + ": precinct \"" + graph.node(v).precinct_id +
                                           "\" has no assignment");
    }
  }

  std::vector<std::string> labels(raw.begin(), raw.end());
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  const bool numeric = std::all_of(labels.begin(), labels.end(), [](const std::string& s) {
    long long x = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    return ec == std::errc() && ptr == s.data() + s.size();
  });
  if (numeric) {
    std::sort(labels.begin(), labels.end(),
              [](const std::string& a, const std::string& b) { return std::stoll(a) < std::stoll(b); });
  }
  std::map<std::string, District> dense;
  for (std::size_t i = 0; i < labels.size(); ++i) dense.emplace(labels[i], static_cast<District>(i));

  Assignment out;
  out.plan.k = static_cast<int>(labels.size());
  out.plan.assignment.resize(graph.node_count());
  for (NodeId v = 0; v < graph.node_count(); ++v) out.plan.assignment[v] = dense.at(raw[v]);
  out.labels = std::move(labels);
  return out;
}

Assignment read_assignment(const std::filesystem::path& path, const PrecinctGraph& graph) {
  return parse_assignment(read_text(path), graph, path.string());
}

void write_assignment(const std::filesystem::path& path, const PrecinctGraph& graph,
                      const Plan& plan, std::span<const std::string> labels) {
  std::string out = "precinct_id,district\n";
  for (NodeId v = 0; v < graph.node_count(); ++v) {
    const auto d = static_cast<std::size_t>(plan.assignment[v]);
    out += graph.node(v).precinct_id + "," + (labels.empty() ? std::to_string(d) : labels[d]) + "\n";
  }
  write_text(path, out);
}

std::string format_number(double value) {
  if (!std::isfinite(value)) {
    fail(ErrorCode::InternalError, "attempted to write a non-finite metric value");
  }
  if (value == 0.0) return "0";  // also folds -0
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

const std::string& trace_header() {
  static const std::string header =
      "chain,step,outcome,accepted,seats_avg,seats_frac,seats_index,eg,mm,eg_index,mm_index,pp,"
      "county_splits,muni_splits,county_excess,muni_excess,county_penalty,muni_penalty,ties";
  return header;
}

namespace {

void append_metrics(std::string& out, const MetricsReport& r) {
  const auto& s = r.splits;
  for (double v : {r.seats_avg, r.seats_frac, r.seats_index, r.efficiency_gap, r.mean_median,
                   r.efficiency_gap_index, r.mean_median_index, r.polsby_popper}) {
    out += format_number(v);
    out += ',';
  }
  for (std::size_t v : {s.county_splits, s.muni_splits, s.county_excess(), s.muni_excess(),
                        s.per_district_county_penalty, s.per_district_muni_penalty}) {
    out += std::to_string(v);
    out += ',';
  }
  out += std::to_string(r.tied_districts);
}

}  // namespace

std::string render_trace(std::span<const ChainTrace> traces) {
  std::string out = trace_header() + "\n";
  for (const auto& trace : traces) {
    for (const auto& e : trace.entries) {
      out += std::to_string(e.chain) + "," + std::to_string(e.step) + "," +
             std::string(outcome_name(e.outcome)) + "," +
             (e.outcome == StepOutcome::Accepted ? "1" : "0") + ",";
      append_metrics(out, e.metrics);
      out += '\n';
    }
  }
  return out;
}

void write_trace(std::span<const ChainTrace> traces, const std::filesystem::path& path) {
  write_text(path, render_trace(traces));
}

std::string render_report(const MetricsReport& r) {
  std::string out = "metric,value\n";
  auto row = [&](const std::string& name, const std::string& value) {
    out += name + "," + value + "\n";
  };
  row("seats_avg", format_number(r.seats_avg));
  row("seats_frac", format_number(r.seats_frac));
  row("seats_index", format_number(r.seats_index));
  row("eg", format_number(r.efficiency_gap));
  row("mm", format_number(r.mean_median));
  row("eg_index", format_number(r.efficiency_gap_index));
  row("mm_index", format_number(r.mean_median_index));
  row("pp", format_number(r.polsby_popper));
  row("county_splits", std::to_string(r.splits.county_splits));
  row("muni_splits", std::to_string(r.splits.muni_splits));
  row("county_excess", std::to_string(r.splits.county_excess()));
  row("muni_excess", std::to_string(r.splits.muni_excess()));
  row("county_penalty", std::to_string(r.splits.per_district_county_penalty));
  row("muni_penalty", std::to_string(r.splits.per_district_muni_penalty));
  row("ties", std::to_string(r.tied_districts));
  return out;
}

void write_report(const MetricsReport& report, const std::filesystem::path& path) {
  write_text(path, render_report(report));
}

void write_summary(std::span<const std::pair<std::string, Summary>> rows,
                   const std::filesystem::path& path) {
  std::string out = "metric,mean,std,min,max,n\n";
  for (const auto& [name, s] : rows) {
    out += name + "," + format_number(s.mean) + "," + format_number(s.std) + "," +
           format_number(s.min) + "," + format_number(s.max) + "," + std::to_string(s.n) + "\n";
  }
  write_text(path, out);
}

void write_acf(const AcfSeries& acf, const std::filesystem::path& path) {
  std::string out = "lag,rho\n";
  for (std::size_t k = 0; k < acf.rho.size(); ++k) {
    out += std::to_string(k) + "," + format_number(acf.rho[k]) + "\n";
  }
  write_text(path, out);
}

std::string render_sweep(const SweepResult& sweep) {
  std::string out = "cap,mean,std,n,mean_county_splits,fitted\n";
  for (const auto& p : sweep.points) {
    out += format_number(p.cap) + "," + format_number(p.mean) + "," + format_number(p.std) + "," +
           std::to_string(p.n) + "," + format_number(p.mean_county_splits) + ",0\n";
  }
  out += format_number(sweep.extrapolated_cap) + "," + format_number(sweep.extrapolated_value) +
         ",0,0,,1\n";
  if (sweep.baseline) {
    out += format_number(sweep.baseline->cap) + "," + format_number(sweep.baseline->mean) +
           ",0,0," + format_number(sweep.baseline->cap) + ",2\n";
  }
  return out;
}

void write_sweep(const SweepResult& sweep, const std::filesystem::path& path) {
  write_text(path, render_sweep(sweep));
}

namespace {

constexpr double kWidth = 640, kHeight = 400, kMargin = 50;

std::string svg_open(const std::string& title) {
  std::string out =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" viewBox=\"0 0 640 400\">\n"
      "<rect x=\"0\" y=\"0\" width=\"640\" height=\"400\" fill=\"white\"/>\n";
  if (!title.empty()) {
    out += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"16\">" + title + "</text>\n";
  }
  out += "<line class=\"axis\" x1=\"50\" y1=\"350\" x2=\"590\" y2=\"350\" stroke=\"black\"/>\n";
  out += "<line class=\"axis\" x1=\"50\" y1=\"50\" x2=\"50\" y2=\"350\" stroke=\"black\"/>\n";
  return out;
}

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string axis_label(double x, double value, bool horizontal) {
  if (horizontal) {
    return "<text x=\"" + fixed(x) + "\" y=\"368\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">" + format_number(value) + "</text>\n";
  }
  return "<text x=\"44\" y=\"" + fixed(x) + "\" text-anchor=\"end\" font-family=\"sans-serif\" "
         "font-size=\"11\">" + format_number(value) + "</text>\n";
}

}  // namespace

std::string histogram_svg(std::span<const double> values, std::size_t bins,
                          std::optional<double> reference_line, const std::string& title) {
  if (values.empty()) fail(ErrorCode::EmptyInput, "histogram of no values");
  auto h = histogram(values, bins);
  double lo = h.lo, hi = h.hi;
  if (reference_line) {
    lo = std::min(lo, *reference_line);
    hi = std::max(hi, *reference_line);
  }
  const double plot_w = kWidth - 2 * kMargin, plot_h = kHeight - 2 * kMargin;
  auto x_of = [&](double v) { return kMargin + (v - lo) / (hi - lo) * plot_w; };
  const auto max_count = *std::max_element(h.counts.begin(), h.counts.end());

  std::string out = svg_open(title);
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    const double x0 = x_of(h.lo + h.bin_width() * static_cast<double>(b));
    const double x1 = x_of(h.lo + h.bin_width() * static_cast<double>(b + 1));
    const double bar_h = plot_h * static_cast<double>(h.counts[b]) / static_cast<double>(max_count);
    out += "<rect class=\"bar\" data-count=\"" + std::to_string(h.counts[b]) + "\" x=\"" +
           fixed(x0) + "\" y=\"" + fixed(kHeight - kMargin - bar_h) + "\" width=\"" +
           fixed(std::max(0.0, x1 - x0 - 1.0)) + "\" height=\"" + fixed(bar_h) +
           "\" fill=\"steelblue\"/>\n";
  }
  out += axis_label(kMargin, lo, true);
  out += axis_label(kWidth - kMargin, hi, true);
  out += axis_label(kMargin, static_cast<double>(max_count), false);
  if (reference_line) {
    const double x = x_of(*reference_line);
    out += "<line class=\"reference\" data-value=\"" + format_number(*reference_line) + "\" x1=\"" +
           fixed(x) + "\" y1=\"50\" x2=\"" + fixed(x) + "\" y2=\"350\" stroke=\"black\" "
           "stroke-width=\"2\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

void write_histogram_svg(std::span<const double> values, std::size_t bins,
                         const std::filesystem::path& path, std::optional<double> reference_line,
                         const std::string& title) {
  write_text(path, histogram_svg(values, bins, reference_line, title));
}

std::string sweep_svg(const SweepResult& sweep, const std::string& metric) {
  std::vector<double> xs, ys;
  for (const auto& p : sweep.points) {
    xs.push_back(p.cap);
    ys.push_back(p.mean);
  }
  xs.push_back(sweep.extrapolated_cap);
  ys.push_back(sweep.extrapolated_value);
  if (sweep.baseline) {
    xs.push_back(sweep.baseline->cap);
    ys.push_back(sweep.baseline->mean);
  }
  double x_lo = *std::min_element(xs.begin(), xs.end()), x_hi = *std::max_element(xs.begin(), xs.end());
  double y_lo = *std::min_element(ys.begin(), ys.end()), y_hi = *std::max_element(ys.begin(), ys.end());
  if (x_hi == x_lo) x_hi = x_lo + 1;
  if (y_hi == y_lo) {
    y_lo -= 0.5;
    y_hi += 0.5;
  }
  const double plot_w = kWidth - 2 * kMargin, plot_h = kHeight - 2 * kMargin;
  auto px = [&](double x) { return kMargin + (x - x_lo) / (x_hi - x_lo) * plot_w; };
  auto py = [&](double y) { return kHeight - kMargin - (y - y_lo) / (y_hi - y_lo) * plot_h; };

  std::string out = svg_open(metric + " vs county cap");
  out += "<line class=\"fit\" x1=\"" + fixed(px(x_lo)) + "\" y1=\"" + fixed(py(sweep.fit.at(x_lo))) +
         "\" x2=\"" + fixed(px(x_hi)) + "\" y2=\"" + fixed(py(sweep.fit.at(x_hi))) +
         "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
  for (const auto& p : sweep.points) {
    out += "<circle class=\"point\" cx=\"" + fixed(px(p.cap)) + "\" cy=\"" + fixed(py(p.mean)) +
           "\" r=\"4\" fill=\"steelblue\"/>\n";
  }
  out += "<circle class=\"extrapolated\" cx=\"" + fixed(px(sweep.extrapolated_cap)) + "\" cy=\"" +
         fixed(py(sweep.extrapolated_value)) + "\" r=\"4\" fill=\"none\" stroke=\"black\"/>\n";
  if (sweep.baseline) {
    out += "<circle class=\"baseline\" cx=\"" + fixed(px(sweep.baseline->cap)) + "\" cy=\"" +
           fixed(py(sweep.baseline->mean)) + "\" r=\"5\" fill=\"seagreen\"/>\n";
  }
  out += axis_label(kMargin, x_lo, true);
  out += axis_label(kWidth - kMargin, x_hi, true);
  out += axis_label(kHeight - kMargin, y_lo, false);
  out += axis_label(kMargin, y_hi, false);
  out += "</svg>\n";
  return out;
}

}  // namespace redistrict::io
