#include "tdanet/pipeline.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "tdanet/homology.hpp"
#include "tdanet/inference.hpp"
#include "tdanet/io.hpp"
#include "tdanet/landscape.hpp"
#include "tdanet/rng.hpp"

namespace tdanet {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

bool safe_name(const std::string& name) {
  if (name.empty()) return false;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_' || c == '-';
    if (!ok) return false;
  }
  return true;
}

std::string subject_dir(int index0) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "subject_%03d", index0 + 1);
  return std::string(buf);
}

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& context) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed.count(key))
      throw config_error("config: unknown key '" + key + "' in " + context);
  }
}

GroupInput parse_group(const json& j, const std::string& default_name) {
  if (!j.is_object()) throw config_error("config: group must be an object");
  check_keys(j, {"name", "paths", "preset", "noise_scale", "samples", "subjects", "seed"},
             "group '" + default_name + "'");
  GroupInput g;
  g.name = j.value("name", default_name);
  if (j.contains("paths")) g.paths = j.at("paths").get<std::vector<std::string>>();
  if (j.contains("preset")) g.preset = preset_from_string(j.at("preset").get<std::string>());
  g.noise_scale = j.value("noise_scale", 1.0);
  g.samples = j.value("samples", static_cast<long>(512));
  g.subjects = j.value("subjects", 1);
  g.seed = j.value("seed", static_cast<std::uint64_t>(0));
  return g;
}

void validate_group(const GroupInput& g) {
  if (!safe_name(g.name))
    throw config_error("config: group name '" + g.name +
                       "' must use only letters, digits, '-' and '_'");
  const bool has_paths = !g.paths.empty();
  const bool has_preset = g.preset.has_value();
  if (has_paths == has_preset)
    throw config_error("config: group '" + g.name +
                       "' needs exactly one of panel paths or a preset");
  if (has_preset) {
    if (g.subjects < 1)
      throw config_error("config: group '" + g.name + "': subjects must be >= 1");
    if (g.samples < 2)
      throw config_error("config: group '" + g.name + "': samples must be >= 2");
    if (!(g.noise_scale >= 0.0) || !std::isfinite(g.noise_scale))
      throw config_error("config: group '" + g.name +
                         "': noise_scale must be finite and nonnegative");
  } else {
    for (const std::string& p : g.paths)
      if (!fs::exists(p))
        throw config_error("config: group '" + g.name + "': input file not found: " + p);
  }
}

json group_to_json(const GroupInput& g) {
  json j;
  j["name"] = g.name;
  if (g.preset) {
    j["preset"] = preset_name(*g.preset);
    j["noise_scale"] = g.noise_scale;
    j["samples"] = g.samples;
    j["subjects"] = g.subjects;
    j["seed"] = g.seed;
  } else {
    j["paths"] = g.paths;
  }
  return j;
}

// Simple fixed-size worker pool over an indexed task list. The first
// exception wins; remaining tasks are skipped once one task fails.
void run_tasks(const std::vector<std::function<void()>>& tasks, int threads) {
  if (tasks.empty()) return;
  const int workers =
      std::max(1, std::min<int>(threads, static_cast<int>(tasks.size())));
  if (workers == 1) {
    for (const auto& task : tasks) task();
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (!failed.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      try {
        tasks[i]();
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

std::vector<BandSpec> default_bands() {
  return {{"delta", 0.5, 4.0},
          {"theta", 4.0, 8.0},
          {"alpha", 8.0, 12.0},
          {"beta", 12.0, 30.0},
          {"gamma", 30.0, 50.0}};
}

void PipelineConfig::validate() const {
  validate_group(group1);
  if (group2) {
    validate_group(*group2);
    if (group2->name == group1.name)
      throw config_error("config: the two groups need distinct names");
  }
  if (!(sampling_rate > 0.0) || !std::isfinite(sampling_rate))
    throw config_error("config: sampling_rate must be positive and finite");
  if (bands.empty()) throw config_error("config: at least one band is required");
  std::set<std::string> seen;
  for (const BandSpec& b : bands) {
    if (!safe_name(b.name))
      throw config_error("config: band name '" + b.name +
                         "' must use only letters, digits, '-' and '_'");
    if (!seen.insert(b.name).second)
      throw config_error("config: duplicate band name '" + b.name + "'");
    if (!std::isfinite(b.low_hz) || !std::isfinite(b.high_hz) || b.low_hz < 0.0 ||
        !(b.high_hz > b.low_hz))
      throw config_error("config: band '" + b.name +
                         "' needs 0 <= low_hz < high_hz, both finite");
  }
  for (std::size_t i = 0; i < bands.size(); ++i)
    for (std::size_t j = i + 1; j < bands.size(); ++j)
      if (bands[i].low_hz < bands[j].high_hz && bands[j].low_hz < bands[i].high_hz)
        std::fprintf(stderr, "warning: bands '%s' and '%s' overlap\n",
                     bands[i].name.c_str(), bands[j].name.c_str());
  if (!(bandwidth >= 0.0) || bandwidth >= 0.5 || !std::isfinite(bandwidth))
    throw config_error("config: bandwidth must lie in [0, 0.5) cycles/sample");
  if (max_dim < 1 || max_dim > 3)
    throw config_error("config: max_dim must be 1, 2 or 3");
  if (homology_dim < 0 || homology_dim >= max_dim)
    throw config_error("config: homology_dim must satisfy 0 <= dim < max_dim");
  if (grid.n < 2 || !(grid.t_max > grid.t_min) || !std::isfinite(grid.t_min) ||
      !std::isfinite(grid.t_max))
    throw config_error("config: landscape grid needs n >= 2 and t_min < t_max");
  if (levels < 1) throw config_error("config: landscape levels must be >= 1");
  if (group2) {
    if (B < 99) throw config_error("config: test B must be >= 99");
    if (!(alpha > 0.0) || !(alpha < 1.0))
      throw config_error("config: test alpha must lie in (0, 1)");
  }
  if (output_dir.empty()) throw config_error("config: output_dir is required");
  if (threads < 1) throw config_error("config: threads must be >= 1");
}

PipelineConfig load_pipeline_config(const std::string& path) {
  if (!fs::exists(path)) throw config_error("config file not found: " + path);
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  json j = json::parse(buf.str(), nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw config_error("config file is not a JSON object: " + path);

  PipelineConfig cfg;
  try {
    check_keys(j,
               {"group1", "group2", "sampling_rate", "bands", "kernel", "bandwidth",
                "transform", "max_dim", "homology_dim", "landscape", "test",
                "output_dir"},
               "the top-level object");
    if (!j.contains("group1")) throw config_error("config: group1 is required");
    cfg.group1 = parse_group(j.at("group1"), "group1");
    if (j.contains("group2") && !j.at("group2").is_null())
      cfg.group2 = parse_group(j.at("group2"), "group2");
    cfg.sampling_rate = j.value("sampling_rate", 100.0);
    if (j.contains("bands")) {
      for (const auto& b : j.at("bands")) {
        check_keys(b, {"name", "low_hz", "high_hz"}, "a band entry");
        cfg.bands.push_back(BandSpec{b.at("name").get<std::string>(),
                                     b.at("low_hz").get<double>(),
                                     b.at("high_hz").get<double>()});
      }
    }
    if (j.contains("kernel"))
      cfg.kernel = kernel_from_string(j.at("kernel").get<std::string>());
    cfg.bandwidth = j.value("bandwidth", 0.0);
    if (j.contains("transform"))
      cfg.transform = transform_from_string(j.at("transform").get<std::string>());
    cfg.max_dim = j.value("max_dim", 2);
    cfg.homology_dim = j.value("homology_dim", 1);
    if (j.contains("landscape")) {
      const json& l = j.at("landscape");
      check_keys(l, {"grid", "levels"}, "landscape");
      if (l.contains("grid")) {
        const json& g = l.at("grid");
        check_keys(g, {"t_min", "t_max", "n"}, "landscape.grid");
        cfg.grid.t_min = g.value("t_min", 0.0);
        cfg.grid.t_max = g.value("t_max", 1.0);
        cfg.grid.n = g.value("n", 512);
      }
      cfg.levels = l.value("levels", 16);
    }
    if (j.contains("test")) {
      const json& t = j.at("test");
      check_keys(t, {"B", "alpha", "seed"}, "test");
      cfg.B = t.value("B", static_cast<long>(999));
      cfg.alpha = t.value("alpha", 0.05);
      cfg.test_seed = t.value("seed", static_cast<std::uint64_t>(0));
    }
    cfg.output_dir = j.value("output_dir", std::string{});
  } catch (const json::exception& e) {
    throw config_error(std::string("config: ") + e.what());
  }
  if (cfg.bands.empty()) cfg.bands = default_bands();
  cfg.validate();
  return cfg;
}

nlohmann::ordered_json config_to_json(const PipelineConfig& config) {
  json j;
  j["group1"] = group_to_json(config.group1);
  j["group2"] = config.group2 ? group_to_json(*config.group2) : json(nullptr);
  j["sampling_rate"] = config.sampling_rate;
  json bands = json::array();
  for (const BandSpec& b : config.bands)
    bands.push_back(json{{"name", b.name}, {"low_hz", b.low_hz}, {"high_hz", b.high_hz}});
  j["bands"] = std::move(bands);
  j["kernel"] = kernel_name(config.kernel);
  j["bandwidth"] = config.bandwidth;
  j["transform"] = transform_name(config.transform);
  j["max_dim"] = config.max_dim;
  j["homology_dim"] = config.homology_dim;
  j["landscape"] = json{{"grid", json{{"t_min", config.grid.t_min},
                                      {"t_max", config.grid.t_max},
                                      {"n", config.grid.n}}},
                        {"levels", config.levels}};
  j["test"] =
      json{{"B", config.B}, {"alpha", config.alpha}, {"seed", config.test_seed}};
  return j;
}

std::vector<std::string> simulate_group_panels(const GroupInput& group,
                                               double sampling_rate,
                                               const std::string& out_dir) {
  validate_group(group);
  if (!group.preset)
    throw config_error("group '" + group.name + "' is not preset-backed");
  if (!(sampling_rate > 0.0))
    throw config_error("sampling rate must be positive");
  std::vector<std::string> paths;
  for (int s = 0; s < group.subjects; ++s) {
    const std::uint64_t subject_seed = derive_stream(group.seed, static_cast<std::uint64_t>(s));
    auto [panel, model] = preset_example(*group.preset, group.noise_scale, subject_seed,
                                         group.samples, sampling_rate);
    const std::string dir = out_dir + "/" + subject_dir(s);
    const std::string csv = dir + "/panel.csv";
    write_panel_csv(csv, panel);
    write_panel_sidecar_json(dir + "/panel.json", panel, subject_seed, &model);
    paths.push_back(csv);
  }
  return paths;
}

void stage_coherence(const std::string& panel_csv, double sampling_rate,
                     const BandSpec& band, Kernel kernel, double bandwidth,
                     CoherenceTransform transform, const std::string& coherence_csv,
                     const std::string& coherence_json, const std::string& distance_csv,
                     const std::string& distance_json) {
  const TimeSeriesPanel panel = ingest_panel(panel_csv, sampling_rate);
  SmoothingOptions options;
  options.kernel = kernel;
  options.bandwidth = bandwidth;
  const SpectralMatrix spec = smoothed_cross_spectrum(panel, options);
  const CoherenceMatrix coh = band_coherence(spec, {band.low_hz, band.high_hz});
  if (!coherence_csv.empty())
    write_labeled_matrix_csv(coherence_csv, coh.labels, coh.values);
  if (!coherence_json.empty())
    write_coherence_json(coherence_json, coh, spec.kernel, spec.bandwidth);
  if (distance_csv.empty() && distance_json.empty()) return;
  const DistanceMatrix dist = coherence_to_distance(coh, transform);
  if (!distance_csv.empty())
    write_labeled_matrix_csv(distance_csv, dist.labels, dist.values);
  if (!distance_json.empty()) {
    DistanceMeta meta;
    meta.band_hz = coh.band_hz;
    meta.sampling_rate = coh.sampling_rate;
    meta.transform_id = transform_name(transform);
    meta.kernel = spec.kernel;
    meta.bandwidth = spec.bandwidth;
    write_distance_json(distance_json, dist, meta);
  }
}

void stage_persist(const std::string& distance_csv, int max_dim,
                   const std::string& diagram_json, const std::string& betti_csv) {
  auto [labels, values] = read_labeled_matrix_csv(distance_csv);
  DistanceMatrix dist;
  dist.values = std::move(values);
  dist.labels = std::move(labels);
  dist.validate();
  const Filtration filtration = rips_filtration(dist, max_dim);
  PersistenceDiagram pd = persistence(filtration);
  pd.source_hash = file_content_hash(distance_csv);
  write_diagram_json(diagram_json, pd);
  if (!betti_csv.empty()) write_betti_csv(betti_csv, betti_curve(pd));
}

void stage_landscape(const std::string& diagram_json, int homology_dim, int levels,
                     const std::string& landscape_json) {
  const PersistenceDiagram pd = read_diagram_json(diagram_json);
  const PersistenceLandscape l = landscape_from_diagram(pd, homology_dim, levels);
  write_landscape_json(landscape_json, l);
}

PermutationTestReport stage_test(const std::vector<std::string>& group1_landscapes,
                                 const std::vector<std::string>& group2_landscapes,
                                 long B, double alpha, std::uint64_t seed, int levels,
                                 const std::string& label,
                                 const nlohmann::ordered_json& config_echo,
                                 const std::string& report_json,
                                 const std::string& null_csv) {
  auto load_group = [](const std::vector<std::string>& paths) {
    std::vector<PersistenceLandscape> ls;
    ls.reserve(paths.size());
    for (const std::string& p : paths) ls.push_back(read_landscape_json(p));
    return group_from_landscapes(std::move(ls));
  };
  const GroupSample g1 = load_group(group1_landscapes);
  const GroupSample g2 = load_group(group2_landscapes);
  PermutationTestReport report = permutation_test(g1, g2, B, alpha, seed, levels);
  report.label = label;
  if (!report_json.empty()) write_report_json(report_json, report, config_echo);
  if (!null_csv.empty()) write_null_sample_csv(null_csv, report.null_sample);
  return report;
}

PipelineResult run_pipeline(const PipelineConfig& config) {
  PipelineConfig cfg = config;
  if (cfg.bands.empty()) cfg.bands = default_bands();
  cfg.validate();
  const std::string& out = cfg.output_dir;
  fs::create_directories(out);

  PipelineResult result;
  auto add_artifact = [&](const std::string& rel) { result.artifacts.push_back(rel); };

  const json echo = config_to_json(cfg);
  write_json_file(out + "/config.json", echo);
  add_artifact("config.json");

  struct ResolvedGroup {
    const GroupInput* input;
    std::vector<std::string> panels;
  };
  std::vector<ResolvedGroup> groups;
  groups.push_back({&cfg.group1, {}});
  if (cfg.group2) groups.push_back({&*cfg.group2, {}});
  for (ResolvedGroup& g : groups) {
    if (g.input->preset) {
      g.panels = simulate_group_panels(*g.input, cfg.sampling_rate,
                                       out + "/" + g.input->name);
      for (int s = 0; s < g.input->subjects; ++s) {
        add_artifact(g.input->name + "/" + subject_dir(s) + "/panel.csv");
        add_artifact(g.input->name + "/" + subject_dir(s) + "/panel.json");
      }
    } else {
      g.panels = g.input->paths;
    }
  }

  // Fan the per-subject stages out over (group, subject, band); every task
  // writes only its own files, so scheduling cannot change any artifact.
  std::vector<std::function<void()>> tasks;
  for (const ResolvedGroup& g : groups) {
    for (std::size_t s = 0; s < g.panels.size(); ++s) {
      for (const BandSpec& band : cfg.bands) {
        const std::string rel =
            g.input->name + "/" + subject_dir(static_cast<int>(s)) + "/" + band.name;
        for (const char* file :
             {"coherence.csv", "coherence.json", "distance.csv", "distance.json",
              "diagram.json", "landscape.json"})
          add_artifact(rel + "/" + file);
        const std::string base = out + "/" + rel;
        const std::string panel = g.panels[s];
        tasks.push_back([&cfg, band, base, panel] {
          stage_coherence(panel, cfg.sampling_rate, band, cfg.kernel, cfg.bandwidth,
                          cfg.transform, base + "/coherence.csv",
                          base + "/coherence.json", base + "/distance.csv",
                          base + "/distance.json");
          stage_persist(base + "/distance.csv", cfg.max_dim, base + "/diagram.json");
          stage_landscape(base + "/diagram.json", cfg.homology_dim, cfg.levels,
                          base + "/landscape.json");
        });
      }
    }
  }
  run_tasks(tasks, cfg.threads);

  // Group-level artifacts: mean landscape per (group, band), then the
  // two-sample test per band when a second group is present.
  for (const BandSpec& band : cfg.bands) {
    const std::string band_rel = "bands/" + band.name;
    std::vector<std::vector<std::string>> landscape_files(groups.size());
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
      const ResolvedGroup& g = groups[gi];
      std::vector<PersistenceLandscape> ls;
      for (std::size_t s = 0; s < g.panels.size(); ++s) {
        const std::string file = out + "/" + g.input->name + "/" +
                                 subject_dir(static_cast<int>(s)) + "/" + band.name +
                                 "/landscape.json";
        landscape_files[gi].push_back(file);
        ls.push_back(read_landscape_json(file));
      }
      const PersistenceLandscape mean = mean_landscape(ls, cfg.grid);
      const std::string mean_rel =
          band_rel + "/" + g.input->name + "_mean_landscape.csv";
      write_landscape_grid_csv(out + "/" + mean_rel, mean, cfg.grid);
      add_artifact(mean_rel);
    }
    if (groups.size() == 2) {
      const std::string report_rel = band_rel + "/report.json";
      const std::string null_rel = band_rel + "/null_sample.csv";
      result.reports.push_back(stage_test(
          landscape_files[0], landscape_files[1], cfg.B, cfg.alpha, cfg.test_seed,
          0, band.name, echo, out + "/" + report_rel, out + "/" + null_rel));
      add_artifact(report_rel);
      add_artifact(null_rel);
    }
  }

  result.manifest_path = out + "/manifest.json";
  write_manifest_json(result.manifest_path, result.artifacts, out);
  return result;
}

}  // namespace tdanet
