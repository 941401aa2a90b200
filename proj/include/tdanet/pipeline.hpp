#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "tdanet/sim.hpp"
#include "tdanet/spectral.hpp"
#include "tdanet/types.hpp"

namespace tdanet {

// One named frequency band in Hz.
struct BandSpec {
  std::string name;
  double low_hz = 0.0;
  double high_hz = 0.0;
};

// The five conventional EEG bands: delta 0.5-4, theta 4-8, alpha 8-12,
// beta 12-30, gamma 30-50 Hz.
std::vector<BandSpec> default_bands();

// One group of subjects, backed either by existing panel CSV files or by a
// simulation preset. Exactly one of `paths` / `preset` must be set.
struct GroupInput {
  std::string name;                  // directory-safe identifier
  std::vector<std::string> paths;    // panel CSVs, one per subject
  std::optional<Preset> preset;
  double noise_scale = 1.0;          // channel noise level c for presets
  long samples = 512;                // T for presets
  int subjects = 1;                  // subject count for presets
  std::uint64_t seed = 0;            // subject s simulates with substream (seed, s)

  int subject_count() const {
    return preset ? subjects : static_cast<int>(paths.size());
  }
};

struct PipelineConfig {
  GroupInput group1;
  std::optional<GroupInput> group2;
  double sampling_rate = 100.0;  // Hz; applies to ingestion and simulation
  std::vector<BandSpec> bands;   // empty -> default_bands()
  Kernel kernel = Kernel::rectangular;
  double bandwidth = 0.0;        // cycles/sample; 0 -> estimator default
  CoherenceTransform transform = CoherenceTransform::one_minus;
  int max_dim = 2;               // Rips simplex dimension cap
  int homology_dim = 1;          // dimension landscaped and tested
  GridSpec grid;                 // mean-landscape evaluation grid
  int levels = 16;               // landscape level cap
  long B = 999;                  // permutation replicates
  double alpha = 0.05;
  std::uint64_t test_seed = 0;
  std::string output_dir;
  int threads = 1;               // worker threads for the per-subject stages

  void validate() const;  // throws config_error; overlapping bands only warn
};

// Parse a config JSON file. Unknown keys are rejected so typos fail loudly.
// Referenced panel files must exist. Band overlaps print a warning to stderr
// but do not fail.
PipelineConfig load_pipeline_config(const std::string& path);

// Resolved-config echo embedded in every report and written as config.json.
// The output directory and thread count are omitted: artifact bytes must not
// depend on where the run writes or how it is scheduled.
nlohmann::ordered_json config_to_json(const PipelineConfig& config);

// ---- file-based stages -----------------------------------------------------
// Every stage reads artifact files and writes artifact files. run_pipeline is
// just these stages chained over the same files the subcommands use, so a
// staged run reproduces the pipeline's outputs byte for byte.

// Simulate a preset group: subject s (0-based) is written to
// <out_dir>/subject_<s+1>/panel.csv with a panel.json sidecar recording the
// mixing model and the substream seed. Returns the panel CSV paths.
std::vector<std::string> simulate_group_panels(const GroupInput& group,
                                               double sampling_rate,
                                               const std::string& out_dir);

// panel CSV -> band coherence and distance matrices (CSV + JSON each).
void stage_coherence(const std::string& panel_csv, double sampling_rate,
                     const BandSpec& band, Kernel kernel, double bandwidth,
                     CoherenceTransform transform, const std::string& coherence_csv,
                     const std::string& coherence_json, const std::string& distance_csv,
                     const std::string& distance_json);

// distance CSV -> Rips persistence diagram JSON (optionally Betti curve CSV).
void stage_persist(const std::string& distance_csv, int max_dim,
                   const std::string& diagram_json, const std::string& betti_csv = {});

// diagram JSON -> exact landscape JSON for one homology dimension.
void stage_landscape(const std::string& diagram_json, int homology_dim, int levels,
                     const std::string& landscape_json);

// landscape JSONs (one per subject, two groups) -> permutation test report.
// `label` names the band in the report; `config_echo` is embedded verbatim.
PermutationTestReport stage_test(const std::vector<std::string>& group1_landscapes,
                                 const std::vector<std::string>& group2_landscapes,
                                 long B, double alpha, std::uint64_t seed, int levels,
                                 const std::string& label,
                                 const nlohmann::ordered_json& config_echo,
                                 const std::string& report_json,
                                 const std::string& null_csv = {});

struct PipelineResult {
  std::vector<std::string> artifacts;           // paths relative to output_dir
  std::vector<PermutationTestReport> reports;   // one per band when two groups
  std::string manifest_path;
};

// Full run: materialize panels, then per (group, subject, band) run the
// coherence -> persistence -> landscape stages (parallel across subjects and
// bands when threads > 1; every task writes distinct files), then per group
// and band a mean-landscape grid CSV, then per band a permutation test when
// two groups are present. The manifest (content hash per artifact) is
// written last. Identical config and seeds yield byte-identical artifacts.
PipelineResult run_pipeline(const PipelineConfig& config);

}  // namespace tdanet
