#include "tdanet/sim.hpp"

#include <cmath>
#include <numbers>

#include "tdanet/rng.hpp"

namespace tdanet {

std::pair<double, double> ar2_coefficients(double root_magnitude, double phase) {
  if (!(root_magnitude > 1.0))
    throw config_error("ar2_coefficients: root magnitude must exceed 1");
  if (!(phase > 0.0) || !(phase < 0.5))
    throw config_error("ar2_coefficients: phase must lie in (0, 0.5)");
  const double phi1 =
      2.0 * std::cos(2.0 * std::numbers::pi * phase) / root_magnitude;
  const double phi2 = -1.0 / (root_magnitude * root_magnitude);
  return {phi1, phi2};
}

double ar2_stationary_variance(const Ar2Spec& spec) {
  spec.validate();
  const auto [phi1, phi2] = ar2_coefficients(spec.root_magnitude, spec.phase);
  const double s2 = spec.innovation_sd * spec.innovation_sd;
  const double one_minus = 1.0 - phi2;
  return s2 * one_minus /
         ((1.0 + phi2) * (one_minus * one_minus - phi1 * phi1));
}

std::vector<double> simulate_ar2(const Ar2Spec& spec, long samples,
                                 long burn_in, std::uint64_t seed) {
  spec.validate();
  if (samples < 1) throw data_error("simulate_ar2: need at least one sample");
  if (burn_in < 0) throw config_error("simulate_ar2: burn_in must be nonnegative");

  const auto [phi1, phi2] = ar2_coefficients(spec.root_magnitude, spec.phase);
  Rng rng(seed);
  std::vector<double> out(static_cast<std::size_t>(samples));
  double prev1 = 0.0;  // x_{t-1}, zero initial state
  double prev2 = 0.0;  // x_{t-2}
  const long total = burn_in + samples;
  for (long t = 0; t < total; ++t) {
    const double innovation =
        spec.innovation_sd > 0.0 ? spec.innovation_sd * rng.gaussian() : 0.0;
    const double x = phi1 * prev1 + phi2 * prev2 + innovation;
    prev2 = prev1;
    prev1 = x;
    if (t >= burn_in) out[static_cast<std::size_t>(t - burn_in)] = x;
  }
  return out;
}

TimeSeriesPanel simulate_mixture(const MixingModel& model, long samples,
                                 double sampling_rate, std::uint64_t seed,
                                 long burn_in) {
  model.validate();
  if (samples < 2) throw data_error("simulate_mixture: need at least two samples");
  if (!(sampling_rate > 0.0))
    throw config_error("simulate_mixture: sampling rate must be positive");

  const int P = model.channels();
  const int L = model.latents();

  Eigen::MatrixXd latents(L, samples);
  for (int l = 0; l < L; ++l) {
    const auto z = simulate_ar2(model.latent_specs[static_cast<std::size_t>(l)],
                                samples, burn_in,
                                derive_stream(seed, static_cast<std::uint64_t>(l)));
    for (long t = 0; t < samples; ++t) latents(l, t) = z[static_cast<std::size_t>(t)];
  }

  TimeSeriesPanel panel;
  panel.values = model.mixing * latents;
  if (model.noise_sd > 0.0) {
    for (int i = 0; i < P; ++i) {
      Rng rng(derive_stream(seed, static_cast<std::uint64_t>(L + i)));
      for (long t = 0; t < samples; ++t)
        panel.values(i, t) += model.noise_sd * rng.gaussian();
    }
  }
  panel.sampling_rate = sampling_rate;
  panel.channel_labels.reserve(static_cast<std::size_t>(P));
  for (int i = 0; i < P; ++i)
    panel.channel_labels.push_back("ch" + std::to_string(i + 1));
  panel.validate();
  return panel;
}

namespace {

// Rows of a mixing matrix given as (gain, latent indices) incidence lists.
struct RowSpec {
  double gain;
  std::vector<int> latents;
};

Eigen::MatrixXd build_mixing(int latent_count, const std::vector<RowSpec>& rows) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()),
                                            latent_count);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (int l : rows[i].latents) a(static_cast<Eigen::Index>(i), l) = rows[i].gain;
  return a;
}

std::vector<std::pair<int, int>> shared_latent_edges(const Eigen::MatrixXd& a) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = i + 1; j < a.rows(); ++j) {
      bool share = false;
      for (int l = 0; l < a.cols(); ++l)
        if (a(i, l) != 0.0 && a(j, l) != 0.0) share = true;
      if (share) edges.emplace_back(i, j);
    }
  return edges;
}

}  // namespace

Preset preset_from_string(const std::string& name) {
  if (name == "example1" || name == "1") return Preset::example1;
  if (name == "example2" || name == "2") return Preset::example2;
  if (name == "example3-cyclic" || name == "3-cyclic") return Preset::example3_cyclic;
  if (name == "example3-random" || name == "3-random") return Preset::example3_random;
  throw config_error("unknown preset '" + name +
                     "' (expected example1, example2, example3-cyclic, example3-random)");
}

std::string preset_name(Preset preset) {
  switch (preset) {
    case Preset::example1: return "example1";
    case Preset::example2: return "example2";
    case Preset::example3_cyclic: return "example3-cyclic";
    case Preset::example3_random: return "example3-random";
  }
  throw config_error("preset_name: invalid preset value");
}

MixingModel preset_model(Preset preset, double noise_scale) {
  if (!(noise_scale >= 0.0))
    throw config_error("preset_model: noise scale must be nonnegative");

  MixingModel model;
  switch (preset) {
    case Preset::example1:
      // Nine channels over eight latents; every channel averages two latents.
      model.mixing = build_mixing(8, {{0.5, {0, 1}},
                                      {0.5, {1, 2}},
                                      {0.5, {2, 3}},
                                      {0.5, {0, 3}},
                                      {0.5, {3, 4}},
                                      {0.5, {4, 5}},
                                      {0.5, {5, 6}},
                                      {0.5, {6, 7}},
                                      {0.5, {4, 7}}});
      break;
    case Preset::example2:
      // A 4-cycle plus four channels driven by one common latent (a clique).
      model.mixing = build_mixing(5, {{0.5, {0, 1}},
                                      {0.5, {1, 2}},
                                      {0.5, {2, 3}},
                                      {0.5, {0, 3}},
                                      {0.5, {3, 4}},
                                      {1.0, {4}},
                                      {1.0, {4}},
                                      {1.0, {4}},
                                      {1.0, {4}}});
      break;
    case Preset::example3_cyclic:
      // Six channels around one chordless cycle: channel i shares one latent
      // with each ring neighbour.
      model.mixing = build_mixing(6, {{1.0, {5, 0}},
                                      {1.0, {0, 1}},
                                      {1.0, {1, 2}},
                                      {1.0, {2, 3}},
                                      {1.0, {3, 4}},
                                      {1.0, {4, 5}}});
      break;
    case Preset::example3_random:
      // Same channel count and latent budget, no chordless cycle.
      model.mixing = build_mixing(6, {{1.0, {5, 2, 3}},
                                      {1.0, {5, 1}},
                                      {1.0, {0}},
                                      {1.0, {0, 1, 2}},
                                      {1.0, {3, 4}},
                                      {1.0, {4}}});
      break;
  }

  const int L = static_cast<int>(model.mixing.cols());
  model.latent_specs.assign(static_cast<std::size_t>(L),
                            Ar2Spec{1.05, 0.10, 1.0});
  model.noise_sd = noise_scale;
  model.ground_truth_edges = shared_latent_edges(model.mixing);
  model.validate();
  return model;
}

std::pair<TimeSeriesPanel, MixingModel> preset_example(Preset preset,
                                                       double noise_scale,
                                                       std::uint64_t seed,
                                                       long samples,
                                                       double sampling_rate) {
  MixingModel model = preset_model(preset, noise_scale);
  TimeSeriesPanel panel = simulate_mixture(model, samples, sampling_rate, seed);
  return {std::move(panel), std::move(model)};
}

}  // namespace tdanet
