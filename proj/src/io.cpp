#include "tdanet/io.hpp"

#include "tdanet/landscape.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace tdanet {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::ofstream open_out(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    fs::create_directories(parent, ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("cannot open file for writing: " + path);
  return out;
}

std::string slurp(const std::string& path) {
  if (!fs::exists(path)) throw config_error("input file not found: " + path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot read input file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Split on newlines; tolerate CRLF and a trailing newline.
std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    std::string line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = end + 1;
  }
  return lines;
}

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    std::size_t end = line.find(',', start);
    if (end == std::string::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, end - start));
    start = end + 1;
  }
}

// Strict numeric cell parser; `row` and `col` are 1-based file coordinates.
double parse_cell(const std::string& path, const std::string& cell, long row, long col) {
  std::string trimmed = cell;
  while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back())))
    trimmed.pop_back();
  std::size_t lead = 0;
  while (lead < trimmed.size() && std::isspace(static_cast<unsigned char>(trimmed[lead])))
    ++lead;
  trimmed.erase(0, lead);
  if (trimmed.empty())
    throw data_error(path + ": row " + std::to_string(row) + ", column " +
                     std::to_string(col) + ": empty cell");
  const char* begin = trimmed.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw data_error(path + ": row " + std::to_string(row) + ", column " +
                     std::to_string(col) + ": non-numeric cell '" + cell + "'");
  if (!std::isfinite(v))
    throw data_error(path + ": row " + std::to_string(row) + ", column " +
                     std::to_string(col) + ": non-finite cell '" + cell + "'");
  return v;
}

void check_label(const std::string& label) {
  if (label.empty()) throw config_error("csv label must be non-empty");
  if (label.find(',') != std::string::npos || label.find('\n') != std::string::npos ||
      label.find('\r') != std::string::npos)
    throw config_error("csv label '" + label + "' contains a delimiter");
}

json grid_to_json(const GridSpec& g) {
  return json{{"t_min", g.t_min}, {"t_max", g.t_max}, {"n", g.n}};
}

GridSpec grid_from_json(const json& j, const std::string& path) {
  if (!j.is_object() || !j.contains("t_min") || !j.contains("t_max") || !j.contains("n"))
    throw data_error(path + ": malformed grid object");
  GridSpec g;
  g.t_min = j.at("t_min").get<double>();
  g.t_max = j.at("t_max").get<double>();
  g.n = j.at("n").get<int>();
  return g;
}

json load_json(const std::string& path) {
  const std::string text = slurp(path);
  if (text.empty()) throw data_error("input file is empty: " + path);
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw data_error(path + ": malformed JSON");
  return j;
}

void dump_json(const std::string& path, const json& j) {
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw config_error("failed writing file: " + path);
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

// ---- time series panels -------------------------------------------------

void write_panel_csv(const std::string& path, const TimeSeriesPanel& panel) {
  panel.validate();
  const int P = panel.channels();
  const long T = panel.samples();
  std::vector<std::string> labels = panel.channel_labels;
  if (labels.empty())
    for (int i = 0; i < P; ++i) labels.push_back("ch" + std::to_string(i + 1));
  for (const auto& l : labels) check_label(l);

  std::ofstream out = open_out(path);
  for (int i = 0; i < P; ++i) out << (i ? "," : "") << labels[static_cast<std::size_t>(i)];
  out << '\n';
  for (long t = 0; t < T; ++t) {
    for (int i = 0; i < P; ++i)
      out << (i ? "," : "") << format_double(panel.values(i, t));
    out << '\n';
  }
  if (!out) throw config_error("failed writing file: " + path);
}

TimeSeriesPanel ingest_panel(const std::string& path, double sampling_rate) {
  if (!(sampling_rate > 0.0)) throw config_error("sampling rate must be positive");
  const std::string text = slurp(path);
  if (text.find_first_not_of(" \t\r\n") == std::string::npos)
    throw data_error("input file is empty: " + path);
  const std::vector<std::string> lines = split_lines(text);
  if (lines.size() < 2)
    throw data_error(path + ": fewer than 2 rows (need a header row and data rows)");

  const std::vector<std::string> header = split_cells(lines[0]);
  const std::size_t P = header.size();
  for (std::size_t i = 0; i < P; ++i)
    if (header[i].empty())
      throw data_error(path + ": row 1, column " + std::to_string(i + 1) +
                       ": empty channel label");

  const std::size_t T = lines.size() - 1;
  TimeSeriesPanel panel;
  panel.values.resize(static_cast<Eigen::Index>(P), static_cast<Eigen::Index>(T));
  for (std::size_t r = 0; r < T; ++r) {
    const long row = static_cast<long>(r) + 2;  // 1-based file row
    const std::vector<std::string> cells = split_cells(lines[r + 1]);
    if (cells.size() != P)
      throw data_error(path + ": row " + std::to_string(row) + " has " +
                       std::to_string(cells.size()) + " cells, expected " +
                       std::to_string(P));
    for (std::size_t c = 0; c < P; ++c)
      panel.values(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(r)) =
          parse_cell(path, cells[c], row, static_cast<long>(c) + 1);
  }
  panel.sampling_rate = sampling_rate;
  panel.channel_labels = header;
  panel.validate();
  return panel;
}

void write_panel_sidecar_json(const std::string& path, const TimeSeriesPanel& panel,
                              std::uint64_t seed, const MixingModel* model) {
  json j;
  j["sampling_rate"] = panel.sampling_rate;
  j["seed"] = seed;
  j["channels"] = panel.channels();
  j["samples"] = panel.samples();
  if (model) {
    model->validate();
    json m;
    m["channels"] = model->channels();
    m["latents"] = model->latents();
    json a = json::array();
    for (int i = 0; i < model->channels(); ++i)
      for (int l = 0; l < model->latents(); ++l) a.push_back(model->mixing(i, l));
    m["mixing_row_major"] = std::move(a);
    json specs = json::array();
    for (const auto& s : model->latent_specs)
      specs.push_back(json{{"root_magnitude", s.root_magnitude},
                           {"phase", s.phase},
                           {"innovation_sd", s.innovation_sd}});
    m["latent_specs"] = std::move(specs);
    m["noise_sd"] = model->noise_sd;
    json edges = json::array();
    for (const auto& [i, k] : model->ground_truth_edges)
      edges.push_back(json::array({i, k}));
    m["ground_truth_edges"] = std::move(edges);
    j["model"] = std::move(m);
  } else {
    j["model"] = nullptr;
  }
  dump_json(path, j);
}

// ---- labeled square matrices ---------------------------------------------

void write_labeled_matrix_csv(const std::string& path,
                              const std::vector<std::string>& labels,
                              const Eigen::MatrixXd& values) {
  const Eigen::Index n = values.rows();
  if (values.cols() != n) throw config_error("labeled matrix must be square");
  if (static_cast<Eigen::Index>(labels.size()) != n)
    throw config_error("labeled matrix needs one label per row");
  for (const auto& l : labels) check_label(l);

  std::ofstream out = open_out(path);
  for (Eigen::Index j = 0; j < n; ++j) out << ',' << labels[static_cast<std::size_t>(j)];
  out << '\n';
  for (Eigen::Index i = 0; i < n; ++i) {
    out << labels[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < n; ++j) out << ',' << format_double(values(i, j));
    out << '\n';
  }
  if (!out) throw config_error("failed writing file: " + path);
}

std::pair<std::vector<std::string>, Eigen::MatrixXd> read_labeled_matrix_csv(
    const std::string& path) {
  const std::string text = slurp(path);
  if (text.find_first_not_of(" \t\r\n") == std::string::npos)
    throw data_error("input file is empty: " + path);
  const std::vector<std::string> lines = split_lines(text);
  if (lines.size() < 2)
    throw data_error(path + ": fewer than 2 rows (need a header row and data rows)");

  std::vector<std::string> header = split_cells(lines[0]);
  if (header.size() < 2 || !header[0].empty())
    throw data_error(path + ": row 1: expected an empty corner cell then labels");
  const std::size_t n = header.size() - 1;
  std::vector<std::string> labels(header.begin() + 1, header.end());
  if (lines.size() - 1 != n)
    throw data_error(path + ": expected " + std::to_string(n) + " data rows, found " +
                     std::to_string(lines.size() - 1));

  Eigen::MatrixXd values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    const long row = static_cast<long>(r) + 2;
    const std::vector<std::string> cells = split_cells(lines[r + 1]);
    if (cells.size() != n + 1)
      throw data_error(path + ": row " + std::to_string(row) + " has " +
                       std::to_string(cells.size()) + " cells, expected " +
                       std::to_string(n + 1));
    if (cells[0] != labels[r])
      throw data_error(path + ": row " + std::to_string(row) + ": row label '" +
                       cells[0] + "' does not match column label '" + labels[r] + "'");
    for (std::size_t c = 0; c < n; ++c)
      values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          parse_cell(path, cells[c + 1], row, static_cast<long>(c) + 2);
  }
  return {std::move(labels), std::move(values)};
}

void write_coherence_json(const std::string& path, const CoherenceMatrix& coh,
                          Kernel kernel, double bandwidth) {
  coh.validate();
  json j;
  std::vector<std::string> labels = coh.labels;
  if (labels.empty())
    for (Eigen::Index i = 0; i < coh.values.rows(); ++i)
      labels.push_back("ch" + std::to_string(i + 1));
  j["labels"] = labels;
  j["band_hz"] = json::array({coh.band_hz.first, coh.band_hz.second});
  j["sampling_rate"] = coh.sampling_rate;
  j["kernel"] = kernel_name(kernel);
  j["bandwidth"] = bandwidth;
  json rows = json::array();
  for (Eigen::Index i = 0; i < coh.values.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < coh.values.cols(); ++k) row.push_back(coh.values(i, k));
    rows.push_back(std::move(row));
  }
  j["values"] = std::move(rows);
  dump_json(path, j);
}

void write_distance_json(const std::string& path, const DistanceMatrix& dist,
                         const DistanceMeta& meta) {
  dist.validate();
  json j;
  std::vector<std::string> labels = dist.labels;
  if (labels.empty())
    for (int i = 0; i < dist.size(); ++i) labels.push_back("ch" + std::to_string(i + 1));
  j["labels"] = labels;
  j["band_hz"] = json::array({meta.band_hz.first, meta.band_hz.second});
  j["sampling_rate"] = meta.sampling_rate;
  j["transform_id"] = meta.transform_id;
  j["kernel"] = kernel_name(meta.kernel);
  j["bandwidth"] = meta.bandwidth;
  json rows = json::array();
  for (int i = 0; i < dist.size(); ++i) {
    json row = json::array();
    for (int k = 0; k < dist.size(); ++k) row.push_back(dist.values(i, k));
    rows.push_back(std::move(row));
  }
  j["values"] = std::move(rows);
  dump_json(path, j);
}

// ---- persistence diagrams ----------------------------------------------

void write_diagram_json(const std::string& path, const PersistenceDiagram& pd) {
  json j;
  json dims;
  json inf;
  const int top = std::min(pd.max_dim, 3);
  for (int d = 0; d < top; ++d) {
    json bars = json::array();
    for (const Pair& p : pd.finite[static_cast<std::size_t>(d)])
      bars.push_back(json::array({p.birth, p.death}));
    dims[std::to_string(d)] = std::move(bars);
    json births = json::array();
    for (double b : pd.infinite[static_cast<std::size_t>(d)]) births.push_back(b);
    inf[std::to_string(d)] = std::move(births);
  }
  j["dims"] = std::move(dims);
  j["infinite"] = std::move(inf);
  j["meta"] = json{{"thresholds", pd.thresholds},
                   {"max_dim", pd.max_dim},
                   {"source_hash", pd.source_hash}};
  dump_json(path, j);
}

PersistenceDiagram read_diagram_json(const std::string& path) {
  const json j = load_json(path);
  if (!j.is_object() || !j.contains("dims") || !j.contains("infinite") ||
      !j.contains("meta"))
    throw data_error(path + ": missing dims/infinite/meta keys");
  PersistenceDiagram pd;
  const json& meta = j.at("meta");
  pd.max_dim = meta.at("max_dim").get<int>();
  if (pd.max_dim < 1 || pd.max_dim > 3)
    throw data_error(path + ": max_dim out of range");
  pd.thresholds = meta.at("thresholds").get<std::vector<double>>();
  pd.source_hash = meta.value("source_hash", std::string{});
  for (int d = 0; d < std::min(pd.max_dim, 3); ++d) {
    const std::string key = std::to_string(d);
    if (j.at("dims").contains(key)) {
      for (const auto& bar : j.at("dims").at(key)) {
        if (!bar.is_array() || bar.size() != 2)
          throw data_error(path + ": malformed bar in dimension " + key);
        pd.finite[static_cast<std::size_t>(d)].push_back(
            Pair{bar[0].get<double>(), bar[1].get<double>()});
      }
    }
    if (j.at("infinite").contains(key))
      pd.infinite[static_cast<std::size_t>(d)] =
          j.at("infinite").at(key).get<std::vector<double>>();
  }
  return pd;
}

void write_betti_csv(const std::string& path, const BettiCurve& curve) {
  std::set<double> breakpoints;
  for (const auto& step : curve.dims)
    breakpoints.insert(step.eps.begin(), step.eps.end());
  std::ofstream out = open_out(path);
  out << "eps,beta0,beta1,beta2\n";
  for (double e : breakpoints) {
    out << format_double(e);
    for (const auto& step : curve.dims) out << ',' << step.at(e);
    out << '\n';
  }
  if (!out) throw config_error("failed writing file: " + path);
}

// ---- persistence landscapes ----------------------------------------------

void write_landscape_json(const std::string& path, const PersistenceLandscape& l) {
  json j;
  j["dim"] = l.homology_dim;
  json levels = json::array();
  for (const auto& level : l.levels) {
    json pts = json::array();
    for (const auto& [t, v] : level) pts.push_back(json::array({t, v}));
    levels.push_back(std::move(pts));
  }
  j["levels"] = std::move(levels);
  j["grid"] = l.grid ? grid_to_json(*l.grid) : json(nullptr);
  dump_json(path, j);
}

PersistenceLandscape read_landscape_json(const std::string& path) {
  const json j = load_json(path);
  if (!j.is_object() || !j.contains("dim") || !j.contains("levels") ||
      !j.contains("grid"))
    throw data_error(path + ": missing dim/levels/grid keys");
  PersistenceLandscape l;
  l.homology_dim = j.at("dim").get<int>();
  for (const auto& level : j.at("levels")) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& pt : level) {
      if (!pt.is_array() || pt.size() != 2)
        throw data_error(path + ": malformed landscape breakpoint");
      pts.emplace_back(pt[0].get<double>(), pt[1].get<double>());
    }
    l.levels.push_back(std::move(pts));
  }
  if (!j.at("grid").is_null()) l.grid = grid_from_json(j.at("grid"), path);
  return l;
}

void write_landscape_grid_csv(const std::string& path, const PersistenceLandscape& l,
                              const GridSpec& grid, int levels) {
  const Eigen::MatrixXd m = evaluate(l, grid, levels);
  std::ofstream out = open_out(path);
  out << 't';
  for (Eigen::Index k = 0; k < m.rows(); ++k) out << ",level" << (k + 1);
  out << '\n';
  for (int i = 0; i < grid.n; ++i) {
    out << format_double(grid.point(i));
    for (Eigen::Index k = 0; k < m.rows(); ++k) out << ',' << format_double(m(k, i));
    out << '\n';
  }
  if (!out) throw config_error("failed writing file: " + path);
}

// ---- permutation test reports --------------------------------------------

void write_report_json(const std::string& path, const PermutationTestReport& report,
                       const nlohmann::ordered_json& config_echo) {
  json r;
  r["label"] = report.label;
  r["homology_dim"] = report.homology_dim;
  r["levels"] = report.levels;
  r["observed"] = report.observed;
  r["p_value"] = report.p_value;
  r["threshold"] = report.threshold;
  r["alpha"] = report.alpha;
  r["B"] = report.B;
  r["seed"] = report.seed;
  r["null_sample"] = report.null_sample;
  json j;
  j["report"] = std::move(r);
  j["config"] = config_echo;
  dump_json(path, j);
}

PermutationTestReport read_report_json(const std::string& path) {
  const json j = load_json(path);
  if (!j.is_object() || !j.contains("report"))
    throw data_error(path + ": missing report key");
  const json& r = j.at("report");
  PermutationTestReport report;
  report.label = r.at("label").get<std::string>();
  report.homology_dim = r.at("homology_dim").get<int>();
  report.levels = r.at("levels").get<int>();
  report.observed = r.at("observed").get<double>();
  report.p_value = r.at("p_value").get<double>();
  report.threshold = r.at("threshold").get<double>();
  report.alpha = r.at("alpha").get<double>();
  report.B = r.at("B").get<long>();
  report.seed = r.at("seed").get<std::uint64_t>();
  report.null_sample = r.at("null_sample").get<std::vector<double>>();
  return report;
}

void write_null_sample_csv(const std::string& path, const std::vector<double>& nulls) {
  std::ofstream out = open_out(path);
  out << "value\n";
  for (double v : nulls) out << format_double(v) << '\n';
  if (!out) throw config_error("failed writing file: " + path);
}

void write_json_file(const std::string& path, const nlohmann::ordered_json& j) {
  dump_json(path, j);
}

// ---- hashing / manifest ---------------------------------------------------

std::string file_content_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot hash missing file: " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[65536];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ULL;
    }
    if (got < static_cast<std::streamsize>(sizeof(buf))) break;
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
  return std::string(hex);
}

void write_manifest_json(const std::string& path,
                         const std::vector<std::string>& relative_paths,
                         const std::string& root_dir) {
  std::vector<std::string> sorted = relative_paths;
  std::sort(sorted.begin(), sorted.end());
  json artifacts = json::array();
  for (const std::string& rel : sorted) {
    const std::string full = root_dir.empty() ? rel : root_dir + "/" + rel;
    json entry;
    entry["path"] = rel;
    entry["bytes"] = static_cast<std::uint64_t>(fs::file_size(full));
    entry["fnv1a64"] = file_content_hash(full);
    artifacts.push_back(std::move(entry));
  }
  json j;
  j["artifacts"] = std::move(artifacts);
  dump_json(path, j);
}

}  // namespace tdanet
