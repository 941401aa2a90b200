#pragma once

#include <Eigen/Dense>

#include <array>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tdanet {

// Error categories map onto CLI exit codes: config_error -> 2,
// data_error -> 3, guard_error -> 4.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct data_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct guard_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// P channels x T samples of a real-valued multivariate signal.
struct TimeSeriesPanel {
  Eigen::MatrixXd values;  // P x T
  double sampling_rate = 1.0;
  std::vector<std::string> channel_labels;

  int channels() const { return static_cast<int>(values.rows()); }
  long samples() const { return static_cast<long>(values.cols()); }
  void validate() const;
};

// Symmetric nonnegative dissimilarity matrix with zero diagonal.
// The triangle inequality is not required; Rips accepts dissimilarities.
struct DistanceMatrix {
  Eigen::MatrixXd values;  // P x P
  std::vector<std::string> labels;

  int size() const { return static_cast<int>(values.rows()); }
  void validate() const;
};

// One persistence pair. Infinite deaths are stored separately in the diagram.
struct Pair {
  double birth = 0.0;
  double death = 0.0;
  double persistence() const { return death - birth; }
};

inline bool operator==(const Pair& a, const Pair& b) {
  return a.birth == b.birth && a.death == b.death;
}
inline bool operator<(const Pair& a, const Pair& b) {
  return a.birth != b.birth ? a.birth < b.birth : a.death < b.death;
}

// Birth-death multisets per homology dimension k in {0, 1, 2}.
struct PersistenceDiagram {
  std::array<std::vector<Pair>, 3> finite;
  std::array<std::vector<double>, 3> infinite;  // births of unbounded classes
  int max_dim = 2;  // simplex dimension cap; H_k is valid for k < max_dim
  std::vector<double> thresholds;  // distinct edge values of the filtration
  std::string source_hash;

  const std::vector<Pair>& finite_pairs(int dim) const { return finite.at(dim); }
  void sort_pairs();
};

// Right-continuous step functions epsilon -> beta_k(epsilon).
struct BettiCurve {
  struct Step {
    std::vector<double> eps;   // ascending breakpoints
    std::vector<long> count;   // value on [eps[i], eps[i+1])
    long at(double e) const;   // value before the first breakpoint is count_before
    long count_before = 0;
  };
  std::array<Step, 3> dims;
};

struct GridSpec {
  double t_min = 0.0;
  double t_max = 1.0;
  int n = 512;

  double step() const { return (t_max - t_min) / (n - 1); }
  double point(int i) const { return t_min + step() * i; }
};

inline bool operator==(const GridSpec& a, const GridSpec& b) {
  return a.t_min == b.t_min && a.t_max == b.t_max && a.n == b.n;
}

// Piecewise-linear levels lambda_1 >= lambda_2 >= ... >= 0, each stored as an
// ascending breakpoint list. Levels beyond the stored count are identically 0.
struct PersistenceLandscape {
  std::vector<std::vector<std::pair<double, double>>> levels;
  int homology_dim = 0;
  std::optional<GridSpec> grid;  // set when the breakpoints are grid samples
  // Generating pairs when built straight from a diagram; value() then
  // evaluates the k-th largest tent directly instead of interpolating the
  // breakpoint polyline. Empty for grid-backed or deserialized landscapes.
  std::vector<Pair> pairs;

  int level_count() const { return static_cast<int>(levels.size()); }
  double value(int level, double t) const;
};

enum class Kernel { rectangular, parzen };

std::string kernel_name(Kernel k);
Kernel kernel_from_string(const std::string& name);

// One-sided kernel-smoothed cross-spectral estimate f_hat(omega_k).
struct SpectralMatrix {
  std::vector<double> frequencies;       // cycles/sample, k/T for k = 0..floor(T/2)
  std::vector<Eigen::MatrixXcd> values;  // K Hermitian P x P matrices
  double bandwidth = 0.0;                // cycles/sample
  Kernel kernel = Kernel::rectangular;
  long T = 0;                            // sample count behind the grid (spacing 1/T)
  double sampling_rate = 1.0;            // Hz, copied from the source panel
  std::vector<std::string> labels;

  int channels() const { return values.empty() ? 0 : static_cast<int>(values.front().rows()); }
};

struct CoherenceMatrix {
  Eigen::MatrixXd values;  // P x P in [0,1], unit diagonal
  std::pair<double, double> band_hz{0.0, 0.0};
  double sampling_rate = 1.0;
  std::vector<std::string> labels;

  void validate() const;
};

// AR(2) spec through its characteristic roots M * exp(+-i 2 pi psi).
struct Ar2Spec {
  double root_magnitude = 1.05;  // M > 1
  double phase = 0.1;            // psi in (0, 0.5), cycles per sample
  double innovation_sd = 1.0;

  void validate() const;
};

struct MixingModel {
  Eigen::MatrixXd mixing;  // P x L channel gains
  std::vector<Ar2Spec> latent_specs;
  double noise_sd = 0.0;
  std::vector<std::pair<int, int>> ground_truth_edges;  // 0-based, i < j

  int channels() const { return static_cast<int>(mixing.rows()); }
  int latents() const { return static_cast<int>(mixing.cols()); }
  void validate() const;
};

struct PointCloud {
  Eigen::MatrixXd points;  // N x m
  int delay = 1;
  int dimension = 2;
  std::string channel;

  long size() const { return static_cast<long>(points.rows()); }
};

struct SmoothedSeries {
  std::vector<double> values;
  int window = 1;
};

// Simplices carry at most 4 vertices (max_dim <= 3).
struct Simplex {
  std::array<int, 4> verts{-1, -1, -1, -1};
  int dim = 0;
  double value = 0.0;
};

struct Filtration {
  std::vector<Simplex> simplices;  // sorted by (value, dim, lexicographic verts)
  int max_dim = 2;
  int vertex_count = 0;
  std::vector<double> thresholds;  // sorted distinct edge values
};

struct GroupSample {
  std::vector<PersistenceLandscape> landscapes;  // one per subject
  int homology_dim = 0;
  GridSpec grid;

  int size() const { return static_cast<int>(landscapes.size()); }
};

struct PermutationTestReport {
  double observed = 0.0;
  std::vector<double> null_sample;
  double p_value = 1.0;
  double threshold = 0.0;  // (1-alpha) empirical quantile of the null sample
  double alpha = 0.05;
  long B = 0;
  std::uint64_t seed = 0;
  int levels = 0;
  int homology_dim = 0;
  std::string label;  // e.g. frequency band name
};

}  // namespace tdanet
