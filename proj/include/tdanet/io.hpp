#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "tdanet/spectral.hpp"
#include "tdanet/types.hpp"

namespace tdanet {

// File formats for every artifact the pipeline produces. CSV cells are
// printed with 17 significant digits and JSON numbers use the library's
// shortest-round-trip encoding, so write -> read recovers each double
// bit-for-bit and identical inputs always produce identical bytes.

// %.17g rendering used by every CSV writer.
std::string format_double(double v);

// ---- time series panels -------------------------------------------------

// Header row of channel labels, then one row per time sample.
void write_panel_csv(const std::string& path, const TimeSeriesPanel& panel);

// Parse a panel CSV. Throws config_error if the file does not exist and
// data_error for an empty file, fewer than 2 rows, ragged rows (citing the
// row), or non-numeric / non-finite cells (citing row and column, 1-based).
TimeSeriesPanel ingest_panel(const std::string& path, double sampling_rate);

// Companion metadata: sampling rate, generator seed, and (when the panel was
// simulated) the full mixing model: gain matrix row-major, latent specs,
// channel noise level, and planted edges.
void write_panel_sidecar_json(const std::string& path, const TimeSeriesPanel& panel,
                              std::uint64_t seed, const MixingModel* model);

// ---- labeled square matrices (coherence / distance) ---------------------

// First row ",lab1,...,labP"; each body row "labi,v1,...,vP".
void write_labeled_matrix_csv(const std::string& path,
                              const std::vector<std::string>& labels,
                              const Eigen::MatrixXd& values);

// Returns (labels, values); enforces squareness and row/column label
// agreement. Same error taxonomy as ingest_panel.
std::pair<std::vector<std::string>, Eigen::MatrixXd> read_labeled_matrix_csv(
    const std::string& path);

void write_coherence_json(const std::string& path, const CoherenceMatrix& coh,
                          Kernel kernel, double bandwidth);

// Distance matrices reuse the labeled CSV; the JSON records how the matrix
// was estimated (band, kernel, bandwidth, transform).
struct DistanceMeta {
  std::pair<double, double> band_hz{0.0, 0.0};
  double sampling_rate = 1.0;
  std::string transform_id;
  Kernel kernel = Kernel::rectangular;
  double bandwidth = 0.0;
};
void write_distance_json(const std::string& path, const DistanceMatrix& dist,
                         const DistanceMeta& meta);

// ---- persistence diagrams ----------------------------------------------

// Schema: { "dims": {"0": [[b,d],...], ...},
//           "infinite": {"0": [b,...], ...},
//           "meta": {"thresholds": [...], "max_dim": m, "source_hash": s} }.
void write_diagram_json(const std::string& path, const PersistenceDiagram& pd);
PersistenceDiagram read_diagram_json(const std::string& path);

// Betti curves as right-continuous step functions: one row per breakpoint in
// the union of the per-dimension breakpoints, columns eps,beta0,beta1,beta2.
void write_betti_csv(const std::string& path, const BettiCurve& curve);

// ---- persistence landscapes ----------------------------------------------

// Schema: { "dim": k, "levels": [[[t,v],...], ...], "grid": {...} | null }.
// Generating pairs are not stored; a reloaded landscape evaluates by
// breakpoint interpolation, which agrees with the writer's polyline exactly.
void write_landscape_json(const std::string& path, const PersistenceLandscape& l);
PersistenceLandscape read_landscape_json(const std::string& path);

// Grid evaluation for plotting: header "t,level1,...,levelK", one row per
// grid point. levels == 0 uses the stored level count.
void write_landscape_grid_csv(const std::string& path, const PersistenceLandscape& l,
                              const GridSpec& grid, int levels = 0);

// ---- permutation test reports --------------------------------------------

// Schema: { "report": {label, homology_dim, levels, observed, p_value,
//           threshold, alpha, B, seed, null_sample}, "config": echo }.
void write_report_json(const std::string& path, const PermutationTestReport& report,
                       const nlohmann::ordered_json& config_echo);
PermutationTestReport read_report_json(const std::string& path);

// One "value" column, one row per null replicate (histogram-ready).
void write_null_sample_csv(const std::string& path, const std::vector<double>& nulls);

// Pretty-printed JSON writer shared by every JSON artifact (2-space indent,
// trailing newline); creates parent directories as needed.
void write_json_file(const std::string& path, const nlohmann::ordered_json& j);

// ---- hashing / manifest ---------------------------------------------------

// FNV-1a 64-bit over the raw file bytes, as a 16-digit lowercase hex string.
std::string file_content_hash(const std::string& path);

// { "artifacts": [ {"path", "bytes", "fnv1a64"}, ... ] } sorted by path.
// Paths are stored relative to the manifest's directory so reruns into
// different output directories hash identically.
void write_manifest_json(const std::string& path,
                         const std::vector<std::string>& relative_paths,
                         const std::string& root_dir);

}  // namespace tdanet
