#include "tdanet/types.hpp"

#include <cmath>

namespace tdanet {

void TimeSeriesPanel::validate() const {
  if (values.rows() < 1 || values.cols() < 2)
    throw data_error("panel: need at least 1 channel and 2 samples");
  if (!values.allFinite()) throw data_error("panel: non-finite sample value");
  if (!(sampling_rate > 0.0)) throw data_error("panel: sampling_rate must be positive");
  if (!channel_labels.empty() && static_cast<long>(channel_labels.size()) != values.rows())
    throw data_error("panel: channel_labels size does not match channel count");
}

void DistanceMatrix::validate() const {
  if (values.rows() != values.cols() || values.rows() < 1)
    throw data_error("distance matrix: must be square and non-empty");
  if (!values.allFinite()) throw data_error("distance matrix: non-finite entry");
  const int n = size();
  for (int i = 0; i < n; ++i) {
    if (values(i, i) != 0.0) throw data_error("distance matrix: nonzero diagonal");
    for (int j = i + 1; j < n; ++j) {
      if (values(i, j) < 0.0) throw data_error("distance matrix: negative entry");
      if (values(i, j) != values(j, i)) throw data_error("distance matrix: not symmetric");
    }
  }
  if (!labels.empty() && static_cast<int>(labels.size()) != n)
    throw data_error("distance matrix: labels size does not match");
}

void Ar2Spec::validate() const {
  if (!(root_magnitude > 1.0))
    throw config_error("ar2: root_magnitude must exceed 1 for stationarity");
  if (!(phase > 0.0) || !(phase < 0.5))
    throw config_error("ar2: phase must lie in (0, 0.5)");
  if (!(innovation_sd >= 0.0)) throw config_error("ar2: innovation_sd must be nonnegative");
}

void CoherenceMatrix::validate() const {
  const Eigen::Index p = values.rows();
  if (p < 1 || values.cols() != p)
    throw data_error("coherence matrix: must be square and non-empty");
  if (!values.allFinite()) throw data_error("coherence matrix: entries must be finite");
  for (Eigen::Index i = 0; i < p; ++i) {
    if (values(i, i) != 1.0)
      throw data_error("coherence matrix: diagonal must be exactly 1");
    for (Eigen::Index j = 0; j < p; ++j) {
      if (values(i, j) != values(j, i))
        throw data_error("coherence matrix: must be exactly symmetric");
      if (values(i, j) < 0.0 || values(i, j) > 1.0)
        throw data_error("coherence matrix: entries must lie in [0, 1]");
    }
  }
  if (!labels.empty() && static_cast<Eigen::Index>(labels.size()) != p)
    throw data_error("coherence matrix: label count must match size");
}

void MixingModel::validate() const {
  if (mixing.rows() < 1 || mixing.cols() < 1)
    throw config_error("mixing model: matrix must be at least 1x1");
  if (!mixing.allFinite()) throw config_error("mixing model: matrix entries must be finite");
  if (static_cast<int>(latent_specs.size()) != latents())
    throw config_error("mixing model: one AR(2) spec is required per latent column");
  for (const auto& spec : latent_specs) spec.validate();
  if (!(noise_sd >= 0.0)) throw config_error("mixing model: noise_sd must be nonnegative");
  for (const auto& [i, j] : ground_truth_edges) {
    if (i < 0 || j < 0 || i >= channels() || j >= channels() || i >= j)
      throw config_error("mixing model: ground-truth edge indices out of range");
  }
}

}  // namespace tdanet
