#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tdanet/types.hpp"

namespace tdanet {

// AR(2) coefficients (phi1, phi2) placing the characteristic roots of
// 1 - phi1 B - phi2 B^2 at M e^{+-i 2 pi psi}:
//   phi1 = 2 cos(2 pi psi) / M,   phi2 = -1 / M^2.
// M > 1 gives a causal stationary process with a spectral peak near
// frequency psi (in cycles per sample). Throws config_error when M <= 1
// or psi lies outside (0, 0.5).
std::pair<double, double> ar2_coefficients(double root_magnitude, double phase);

// Stationary variance of the AR(2) process defined by `spec` (Yule-Walker
// closed form). Useful for sanity checks against sample variance.
double ar2_stationary_variance(const Ar2Spec& spec);

// Simulate one AR(2) path of length `samples`. The recursion starts from a
// zero state and runs `burn_in` extra steps that are discarded so the
// returned stretch is effectively stationary. Gaussian innovations with
// standard deviation spec.innovation_sd; fully determined by `seed`.
std::vector<double> simulate_ar2(const Ar2Spec& spec, long samples,
                                 long burn_in = 1024, std::uint64_t seed = 0);

// Simulate a P-channel panel from independent AR(2) latents:
//   Y(t) = A Z(t) + noise_sd * eps(t),  eps iid standard Gaussian.
// Latent l uses the sub-stream derive_stream(seed, l); channel noise i uses
// derive_stream(seed, L + i), so panels are reproducible and individual
// series do not depend on how many other series exist.
// Throws config_error when the model is inconsistent (spec count vs columns)
// and data_error when samples < 2.
TimeSeriesPanel simulate_mixture(const MixingModel& model, long samples,
                                 double sampling_rate, std::uint64_t seed,
                                 long burn_in = 1024);

// Built-in benchmark generators with a planted connectivity pattern.
//   example1       9 channels, 8 latents; ground truth holds two chordless
//                  4-cycles {1,2,3,4} and {6,7,8,9} plus bridging edges
//                  through channel 5 and the (6,9) chord of the pentagon.
//   example2       9 channels, 5 latents; a 4-cycle {1,2,3,4} plus a
//                  4-clique {6,7,8,9} (all four driven by the same latent).
//   example3_cyclic  6 channels on a single chordless 6-cycle.
//   example3_random  6 channels with acyclic/triangle-only connectivity.
// `noise_scale` multiplies the additive channel noise (the "c" knob for
// example 3; use 1.0 for examples 1 and 2).
enum class Preset { example1, example2, example3_cyclic, example3_random };

// Parses "example1", "example2", "example3-cyclic", "example3-random"
// (also accepts "1", "2", "3-cyclic", "3-random"). Throws config_error on
// anything else.
Preset preset_from_string(const std::string& name);
std::string preset_name(Preset preset);

// The mixing model for a preset (matrix, latent specs, noise level, ground
// truth edges) without simulating. All latents share root_magnitude 1.05 and
// phase 0.10 so every planted edge lives in one frequency band (8-12 Hz at
// the default 100 Hz sampling rate).
MixingModel preset_model(Preset preset, double noise_scale);

// Simulate a preset panel. Returns the panel and the model that produced it.
std::pair<TimeSeriesPanel, MixingModel> preset_example(Preset preset,
                                                       double noise_scale,
                                                       std::uint64_t seed,
                                                       long samples,
                                                       double sampling_rate = 100.0);

}  // namespace tdanet
