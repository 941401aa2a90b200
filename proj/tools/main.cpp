#include <cstdio>
#include <cstdlib>
#include <exception>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tdanet/io.hpp"
#include "tdanet/pipeline.hpp"
#include "tdanet/sim.hpp"
#include "tdanet/spectral.hpp"
#include "tdanet/types.hpp"

namespace {

using json = nlohmann::ordered_json;

int env_thread_count() {
  const char* raw = std::getenv("TDANET_THREADS");
  if (!raw || !*raw) return 1;
  char* end = nullptr;
  const long n = std::strtol(raw, &end, 10);
  if (end == raw || *end != '\0' || n < 1 || n > 1024)
    throw tdanet::config_error("TDANET_THREADS must be an integer in [1, 1024]");
  return static_cast<int>(n);
}

void print_report_line(const tdanet::PermutationTestReport& r) {
  std::printf("band=%s observed=%.6g threshold=%.6g p_value=%.6g reject=%s\n",
              r.label.empty() ? "-" : r.label.c_str(), r.observed, r.threshold,
              r.p_value, r.p_value < r.alpha ? "yes" : "no");
}

void add_simulate(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "simulate", "Simulate preset mixture panels, one CSV per subject");
  auto preset = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto group = std::make_shared<tdanet::GroupInput>();
  auto sampling_rate = std::make_shared<double>(100.0);
  cmd->add_option("--preset", *preset,
                  "example1 | example2 | example3-cyclic | example3-random")
      ->required();
  cmd->add_option("--out", *out, "output directory")->required();
  cmd->add_option("--subjects", group->subjects, "number of subjects (default 1)");
  cmd->add_option("--samples", group->samples, "samples per panel (default 512)");
  cmd->add_option("--noise-scale", group->noise_scale,
                  "channel noise level c (default 1)");
  cmd->add_option("--sampling-rate", *sampling_rate, "Hz (default 100)");
  cmd->add_option("--seed", group->seed, "group seed; subject s uses substream (seed, s)");
  cmd->add_option("--name", group->name, "group name used in sidecars (default group1)");
  cmd->callback([=] {
    group->preset = tdanet::preset_from_string(*preset);
    if (group->name.empty()) group->name = "group1";
    const std::vector<std::string> paths =
        tdanet::simulate_group_panels(*group, *sampling_rate, *out);
    for (const std::string& p : paths) std::printf("%s\n", p.c_str());
  });
}

void add_coherence(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "coherence", "Band coherence and distance matrices from a panel CSV");
  auto input = std::make_shared<std::string>();
  auto sampling_rate = std::make_shared<double>();
  auto band = std::make_shared<std::pair<double, double>>();
  auto kernel = std::make_shared<std::string>("rectangular");
  auto bandwidth = std::make_shared<double>(0.0);
  auto transform = std::make_shared<std::string>("one_minus");
  auto coherence_csv = std::make_shared<std::string>();
  auto coherence_json = std::make_shared<std::string>();
  auto distance_csv = std::make_shared<std::string>();
  auto distance_json = std::make_shared<std::string>();
  cmd->add_option("--input", *input, "panel CSV")->required();
  cmd->add_option("--sampling-rate", *sampling_rate, "Hz")->required();
  cmd->add_option("--band", *band, "low and high frequency in Hz")->required();
  cmd->add_option("--kernel", *kernel, "rectangular | parzen");
  cmd->add_option("--bandwidth", *bandwidth,
                  "smoothing bandwidth in cycles/sample (0 = default)");
  cmd->add_option("--transform", *transform, "one_minus | sqrt_one_minus_sq");
  cmd->add_option("--coherence-csv", *coherence_csv, "coherence matrix CSV output");
  cmd->add_option("--coherence-json", *coherence_json, "coherence JSON output");
  cmd->add_option("--distance-csv", *distance_csv, "distance matrix CSV output");
  cmd->add_option("--distance-json", *distance_json, "distance JSON output");
  cmd->callback([=] {
    if (coherence_csv->empty() && coherence_json->empty() && distance_csv->empty() &&
        distance_json->empty())
      throw tdanet::config_error("coherence: at least one output path is required");
    const tdanet::BandSpec spec{"band", band->first, band->second};
    tdanet::stage_coherence(*input, *sampling_rate, spec,
                            tdanet::kernel_from_string(*kernel), *bandwidth,
                            tdanet::transform_from_string(*transform), *coherence_csv,
                            *coherence_json, *distance_csv, *distance_json);
  });
}

void add_persist(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "persist", "Rips persistence diagram from a distance matrix CSV");
  auto input = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto betti = std::make_shared<std::string>();
  auto max_dim = std::make_shared<int>(2);
  cmd->add_option("--input", *input, "distance matrix CSV")->required();
  cmd->add_option("--out", *out, "diagram JSON output")->required();
  cmd->add_option("--max-dim", *max_dim, "simplex dimension cap (default 2)");
  cmd->add_option("--betti-csv", *betti, "optional Betti curve CSV output");
  cmd->callback([=] { tdanet::stage_persist(*input, *max_dim, *out, *betti); });
}

void add_landscape(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "landscape", "Persistence landscape of one homology dimension");
  auto input = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto dim = std::make_shared<int>(1);
  auto levels = std::make_shared<int>(16);
  auto grid_csv = std::make_shared<std::string>();
  auto grid = std::make_shared<tdanet::GridSpec>();
  cmd->add_option("--input", *input, "diagram JSON")->required();
  cmd->add_option("--out", *out, "landscape JSON output")->required();
  cmd->add_option("--dim", *dim, "homology dimension (default 1)");
  cmd->add_option("--levels", *levels, "level cap (default 16)");
  cmd->add_option("--grid-csv", *grid_csv, "optional grid evaluation CSV for plotting");
  cmd->add_option("--grid-min", grid->t_min, "grid start (default 0)");
  cmd->add_option("--grid-max", grid->t_max, "grid end (default 1)");
  cmd->add_option("--grid-n", grid->n, "grid points (default 512)");
  cmd->callback([=] {
    tdanet::stage_landscape(*input, *dim, *levels, *out);
    if (!grid_csv->empty())
      tdanet::write_landscape_grid_csv(*grid_csv, tdanet::read_landscape_json(*out),
                                       *grid);
  });
}

void add_test(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "test", "Two-sample permutation test on per-subject landscape JSONs");
  auto group1 = std::make_shared<std::vector<std::string>>();
  auto group2 = std::make_shared<std::vector<std::string>>();
  auto out = std::make_shared<std::string>();
  auto null_csv = std::make_shared<std::string>();
  auto label = std::make_shared<std::string>();
  auto B = std::make_shared<long>(999);
  auto alpha = std::make_shared<double>(0.05);
  auto seed = std::make_shared<std::uint64_t>(0);
  auto levels = std::make_shared<int>(0);
  cmd->add_option("--group1", *group1, "landscape JSONs, one per subject")
      ->required()
      ->expected(-1);
  cmd->add_option("--group2", *group2, "landscape JSONs, one per subject")
      ->required()
      ->expected(-1);
  cmd->add_option("--out", *out, "report JSON output")->required();
  cmd->add_option("--null-csv", *null_csv, "optional null sample CSV for plotting");
  cmd->add_option("--label", *label, "report label, e.g. the band name");
  cmd->add_option("--B", *B, "permutation replicates (default 999)");
  cmd->add_option("--alpha", *alpha, "test level (default 0.05)");
  cmd->add_option("--seed", *seed, "permutation seed");
  cmd->add_option("--levels", *levels, "landscape levels used (0 = all)");
  cmd->callback([=] {
    json echo;
    echo["group1"] = *group1;
    echo["group2"] = *group2;
    echo["B"] = *B;
    echo["alpha"] = *alpha;
    echo["seed"] = *seed;
    echo["levels"] = *levels;
    const tdanet::PermutationTestReport report =
        tdanet::stage_test(*group1, *group2, *B, *alpha, *seed, *levels, *label, echo,
                           *out, *null_csv);
    print_report_line(report);
  });
}

void add_pipeline(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "pipeline", "Run simulate/ingest -> coherence -> persistence -> landscape -> test");
  auto config_path = std::make_shared<std::string>();
  auto output = std::make_shared<std::string>();
  auto B = std::make_shared<long>(-1);
  auto alpha = std::make_shared<double>(-1.0);
  auto seed = std::make_shared<std::int64_t>(-1);
  auto bandwidth = std::make_shared<double>(-1.0);
  auto kernel = std::make_shared<std::string>();
  auto transform = std::make_shared<std::string>();
  auto max_dim = std::make_shared<int>(-1);
  cmd->add_option("--config", *config_path, "pipeline config JSON")->required();
  cmd->add_option("--output", *output, "override output directory");
  cmd->add_option("--B", *B, "override permutation replicates");
  cmd->add_option("--alpha", *alpha, "override test level");
  cmd->add_option("--seed", *seed, "override test seed");
  cmd->add_option("--bandwidth", *bandwidth, "override smoothing bandwidth");
  cmd->add_option("--kernel", *kernel, "override smoothing kernel");
  cmd->add_option("--transform", *transform, "override distance transform");
  cmd->add_option("--max-dim", *max_dim, "override simplex dimension cap");
  cmd->callback([=] {
    tdanet::PipelineConfig cfg = tdanet::load_pipeline_config(*config_path);
    if (!output->empty()) cfg.output_dir = *output;
    if (*B >= 0) cfg.B = *B;
    if (*alpha >= 0.0) cfg.alpha = *alpha;
    if (*seed >= 0) cfg.test_seed = static_cast<std::uint64_t>(*seed);
    if (*bandwidth >= 0.0) cfg.bandwidth = *bandwidth;
    if (!kernel->empty()) cfg.kernel = tdanet::kernel_from_string(*kernel);
    if (!transform->empty()) cfg.transform = tdanet::transform_from_string(*transform);
    if (*max_dim >= 0) cfg.max_dim = *max_dim;
    cfg.threads = env_thread_count();
    const tdanet::PipelineResult result = tdanet::run_pipeline(cfg);
    for (const auto& report : result.reports) print_report_line(report);
    std::printf("artifacts=%zu manifest=%s\n", result.artifacts.size(),
                result.manifest_path.c_str());
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topological analysis of multivariate time series"};
  app.require_subcommand(1);
  add_simulate(app);
  add_coherence(app);
  add_persist(app);
  add_landscape(app);
  add_test(app);
  add_pipeline(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const tdanet::config_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const tdanet::data_error& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 3;
  } catch (const tdanet::guard_error& e) {
    std::fprintf(stderr, "numerical guard: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
