#pragma once

#include <string>
#include <utility>

#include "tdanet/types.hpp"

namespace tdanet {

// Options for the kernel-smoothed cross-spectral estimator.
struct SmoothingOptions {
  Kernel kernel = Kernel::rectangular;
  // Kernel half-width in cycles per sample. Zero selects the default
  // 4 / sqrt(T). Must satisfy 0 < bandwidth < 0.5 once resolved.
  double bandwidth = 0.0;
  // Subtract each channel's sample mean before transforming.
  bool remove_mean = false;
  // Smallest admissible number of positive-weight grid frequencies in the
  // kernel support. With fewer than 3 the smoothed matrix is (near) rank one
  // and every coherence collapses to 1, so 3 is the default guard; tests of
  // the rank-one limit may lower it to 1 deliberately.
  int min_support = 3;
};

// Unitary one-sided Fourier coefficients, P x K with K = floor(T/2) + 1.
// Channel i, bin k holds (1/sqrt(T)) * sum_{t=1..T} X_i(t) exp(-i 2 pi t k/T),
// i.e. samples are indexed from 1, so bin k carries an extra phase
// exp(-i 2 pi k / T) relative to the 0-based transform. The phase cancels in
// every cross product; it is kept so coefficients match the direct sum.
Eigen::MatrixXcd fourier_coefficients(const TimeSeriesPanel& panel);

// Kernel-smoothed cross-spectral matrices on the one-sided grid k/T.
// f_hat(omega_k) = sum_omega w(omega - omega_k) d(omega) d(omega)^*, with the
// sum running over the full two-sided grid (periodic wrap, conjugate
// symmetry for the negative half) and weights normalized to sum to one.
// Throws config_error when the resolved bandwidth leaves fewer than
// options.min_support positive-weight bins, exceeds the grid, or lies
// outside (0, 0.5).
SpectralMatrix smoothed_cross_spectrum(const TimeSeriesPanel& panel,
                                       const SmoothingOptions& options = {});

// Band-averaged squared coherence: entry (i,j) is the mean over in-band grid
// frequencies of |f_ij|^2 / (f_ii f_jj), diagonal forced to 1. The band is
// given in Hz; sampling_rate 0 uses the rate stored in `spec`. Throws
// config_error for an invalid band and data_error when no grid frequency
// falls inside the band (the message names the band and the grid spacing).
CoherenceMatrix band_coherence(const SpectralMatrix& spec,
                               std::pair<double, double> band_hz,
                               double sampling_rate = 0.0);

// Decreasing transforms turning coherence into a dissimilarity.
enum class CoherenceTransform { one_minus, sqrt_one_minus_sq };

std::string transform_name(CoherenceTransform t);
CoherenceTransform transform_from_string(const std::string& name);

// Entrywise D = G(C) with an exactly zero diagonal. one_minus: G(x) = 1 - x;
// sqrt_one_minus_sq: G(x) = sqrt(1 - x^2).
DistanceMatrix coherence_to_distance(
    const CoherenceMatrix& coh,
    CoherenceTransform transform = CoherenceTransform::one_minus);

}  // namespace tdanet
