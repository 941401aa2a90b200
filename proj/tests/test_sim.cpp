#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <set>
#include <vector>

#include "doctest.h"
#include "tdanet/rng.hpp"
#include "tdanet/sim.hpp"

#define CHECK_NEAR(a, b, tol) CHECK(std::abs((a) - (b)) <= (tol))

using namespace tdanet;

namespace {

// Raw periodogram argmax over positive Fourier frequencies, in cycles/sample.
double periodogram_peak(const std::vector<double>& x) {
  const long T = static_cast<long>(x.size());
  std::vector<double> in(x);
  std::vector<fftw_complex> out(static_cast<std::size_t>(T / 2 + 1));
  fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(T), in.data(),
                                        out.data(), FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  long best_k = 1;
  double best = -1.0;
  for (long k = 1; k <= T / 2; ++k) {
    const double re = out[static_cast<std::size_t>(k)][0];
    const double im = out[static_cast<std::size_t>(k)][1];
    const double power = re * re + im * im;
    if (power > best) {
      best = power;
      best_k = k;
    }
  }
  return static_cast<double>(best_k) / static_cast<double>(T);
}

double sample_variance(const std::vector<double>& x) {
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double acc = 0.0;
  for (double v : x) acc += (v - mean) * (v - mean);
  return acc / static_cast<double>(x.size());
}

std::set<std::pair<int, int>> edge_set(const MixingModel& m) {
  return {m.ground_truth_edges.begin(), m.ground_truth_edges.end()};
}

}  // namespace

TEST_CASE("ar2 coefficients closed forms and domain") {
  {
    const auto [phi1, phi2] = ar2_coefficients(1.01, 0.1);
    CHECK_NEAR(phi1, 2.0 * std::cos(0.2 * std::numbers::pi) / 1.01, 1e-15);
    CHECK_NEAR(phi2, -1.0 / (1.01 * 1.01), 1e-15);
  }
  {
    const auto [phi1, phi2] = ar2_coefficients(1.414, 0.154);
    CHECK_NEAR(phi1, (2.0 / 1.414) * std::cos(2.0 * std::numbers::pi * 0.154), 1e-12);
    CHECK_NEAR(phi2, -1.0 / (1.414 * 1.414), 1e-15);
  }
  {
    const auto [phi1, phi2] = ar2_coefficients(1e6, 0.2);
    CHECK(std::abs(phi2) < 1e-11);
    CHECK(std::abs(phi1) < 1e-5);
  }
  CHECK_THROWS_AS((void)ar2_coefficients(1.0, 0.1), config_error);
  CHECK_THROWS_AS((void)ar2_coefficients(0.5, 0.1), config_error);
  CHECK_THROWS_AS((void)ar2_coefficients(1.05, 0.0), config_error);
  CHECK_THROWS_AS((void)ar2_coefficients(1.05, 0.5), config_error);
  CHECK_THROWS_AS((void)ar2_coefficients(1.05, 0.7), config_error);
}

TEST_CASE("ar2 coefficients place the characteristic roots") {
  const double grid_m[] = {1.01, 1.05, 1.414, 2.0, 10.0};
  const double grid_psi[] = {0.02, 0.1, 0.154, 0.25, 0.42};
  for (double m : grid_m)
    for (double psi : grid_psi) {
      const auto [phi1, phi2] = ar2_coefficients(m, psi);
      for (double sign : {1.0, -1.0}) {
        const std::complex<double> z =
            std::polar(m, sign * 2.0 * std::numbers::pi * psi);
        const std::complex<double> value = 1.0 - phi1 * z - phi2 * z * z;
        const double scale =
            1.0 + std::abs(phi1 * z) + std::abs(phi2 * z * z);
        CHECK(std::abs(value) <= 1e-10 * scale);
      }
    }
}

TEST_CASE("zero innovation keeps the zero state") {
  Ar2Spec spec{1.2, 0.3, 0.0};
  const auto x = simulate_ar2(spec, 64, 128, 9001);
  REQUIRE(x.size() == 64);
  for (double v : x) CHECK(v == 0.0);
}

TEST_CASE("zero initial state: first post-burn-in sample with burn_in 0") {
  Ar2Spec spec{1.05, 0.1, 1.0};
  const auto x = simulate_ar2(spec, 4, 0, 1234);
  Rng rng(1234);
  const double expected = spec.innovation_sd * rng.gaussian();
  CHECK(x[0] == expected);
}

TEST_CASE("simulate_ar2 is deterministic in the seed") {
  Ar2Spec spec{1.05, 0.1, 1.0};
  const auto a = simulate_ar2(spec, 256, 1024, 7);
  const auto b = simulate_ar2(spec, 256, 1024, 7);
  const auto c = simulate_ar2(spec, 256, 1024, 8);
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("simulate_ar2 argument validation") {
  Ar2Spec spec{1.05, 0.1, 1.0};
  CHECK_THROWS_AS((void)simulate_ar2(spec, 0, 16, 1), data_error);
  CHECK_THROWS_AS((void)simulate_ar2(spec, 16, -1, 1), config_error);
  Ar2Spec bad{0.9, 0.1, 1.0};
  CHECK_THROWS_AS((void)simulate_ar2(bad, 16, 16, 1), config_error);
}

TEST_CASE("sample variance matches the stationary closed form") {
  Ar2Spec spec{1.05, 0.1, 1.0};
  const double target = ar2_stationary_variance(spec);
  CHECK(target > 0.0);
  const auto x = simulate_ar2(spec, 1L << 16, 4096, 42);
  const double got = sample_variance(x);
  CHECK(std::abs(got - target) / target <= 0.10);
}

TEST_CASE("periodogram peak sits at the designed frequency") {
  Ar2Spec spec{1.05, 0.1, 1.0};
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto x = simulate_ar2(spec, 4096, 1024, seed);
    const double peak = periodogram_peak(x);
    CHECK(std::abs(peak - 0.1) <= 0.02);
  }
}

TEST_CASE("mixture output is exactly linear in the mixing matrix") {
  MixingModel model;
  model.mixing = Eigen::MatrixXd(3, 2);
  model.mixing << 0.7, -0.3, 1.1, 0.0, 0.25, 2.0;
  model.latent_specs = {Ar2Spec{1.05, 0.1, 1.0}, Ar2Spec{1.2, 0.3, 0.5}};
  model.noise_sd = 0.0;

  MixingModel doubled = model;
  doubled.mixing = 2.0 * model.mixing;

  const auto p1 = simulate_mixture(model, 512, 100.0, 99);
  const auto p2 = simulate_mixture(doubled, 512, 100.0, 99);
  REQUIRE(p1.values.rows() == p2.values.rows());
  REQUIRE(p1.values.cols() == p2.values.cols());
  CHECK((p2.values.array() == (2.0 * p1.values).array()).all());
}

TEST_CASE("identity mixing with zero noise reproduces the latents") {
  MixingModel model;
  model.mixing = Eigen::MatrixXd::Identity(3, 3);
  model.latent_specs = {Ar2Spec{1.05, 0.1, 1.0}, Ar2Spec{1.1, 0.2, 1.0},
                        Ar2Spec{1.3, 0.4, 2.0}};
  model.noise_sd = 0.0;

  const std::uint64_t seed = 1717;
  const auto panel = simulate_mixture(model, 300, 50.0, seed);
  for (int l = 0; l < 3; ++l) {
    const auto z = simulate_ar2(model.latent_specs[static_cast<std::size_t>(l)],
                                300, 1024, derive_stream(seed, static_cast<std::uint64_t>(l)));
    for (long t = 0; t < 300; ++t)
      CHECK(panel.values(l, t) == z[static_cast<std::size_t>(t)]);
  }
  CHECK(panel.sampling_rate == 50.0);
  CHECK(panel.channel_labels == std::vector<std::string>{"ch1", "ch2", "ch3"});
}

TEST_CASE("channel noise perturbs the panel without changing its shape") {
  MixingModel model;
  model.mixing = Eigen::MatrixXd::Identity(2, 2);
  model.latent_specs = {Ar2Spec{1.05, 0.1, 1.0}, Ar2Spec{1.05, 0.2, 1.0}};
  model.noise_sd = 0.0;
  const auto clean = simulate_mixture(model, 128, 100.0, 5);
  model.noise_sd = 0.5;
  const auto noisy = simulate_mixture(model, 128, 100.0, 5);
  REQUIRE(noisy.values.rows() == clean.values.rows());
  REQUIRE(noisy.values.cols() == clean.values.cols());
  CHECK(!(noisy.values.array() == clean.values.array()).all());
  // The latent draw is unchanged, so the difference is exactly the noise term.
  const Eigen::MatrixXd diff = noisy.values - clean.values;
  CHECK(diff.array().abs().maxCoeff() > 0.0);
}

TEST_CASE("simulate_mixture validates its inputs") {
  MixingModel model;
  model.mixing = Eigen::MatrixXd::Identity(2, 2);
  model.latent_specs = {Ar2Spec{1.05, 0.1, 1.0}};  // one spec for two columns
  CHECK_THROWS_AS((void)simulate_mixture(model, 64, 100.0, 1), config_error);
  model.latent_specs.push_back(Ar2Spec{1.05, 0.1, 1.0});
  CHECK_THROWS_AS((void)simulate_mixture(model, 1, 100.0, 1), data_error);
  CHECK_THROWS_AS((void)simulate_mixture(model, 64, 0.0, 1), config_error);
}

TEST_CASE("preset names round-trip and reject unknown ids") {
  for (Preset p : {Preset::example1, Preset::example2, Preset::example3_cyclic,
                   Preset::example3_random})
    CHECK(preset_from_string(preset_name(p)) == p);
  CHECK(preset_from_string("1") == Preset::example1);
  CHECK(preset_from_string("3-cyclic") == Preset::example3_cyclic);
  CHECK_THROWS_AS((void)preset_from_string("example9"), config_error);
  CHECK_THROWS_AS((void)preset_from_string(""), config_error);
}

TEST_CASE("preset example1 matrix and ground truth") {
  const auto model = preset_model(Preset::example1, 1.0);
  REQUIRE(model.mixing.rows() == 9);
  REQUIRE(model.mixing.cols() == 8);
  // Every channel averages exactly two latents with gain one half.
  int nonzeros = 0;
  for (int i = 0; i < 9; ++i) {
    double row_sum = 0.0;
    for (int l = 0; l < 8; ++l) {
      if (model.mixing(i, l) != 0.0) {
        ++nonzeros;
        CHECK(model.mixing(i, l) == 0.5);
      }
      row_sum += model.mixing(i, l);
    }
    CHECK(row_sum == 1.0);
  }
  CHECK(nonzeros == 18);
  CHECK(model.mixing(0, 0) == 0.5);
  CHECK(model.mixing(0, 1) == 0.5);
  CHECK(model.mixing(3, 0) == 0.5);
  CHECK(model.mixing(3, 3) == 0.5);
  CHECK(model.mixing(8, 4) == 0.5);
  CHECK(model.mixing(8, 7) == 0.5);

  const std::set<std::pair<int, int>> expected = {
      {0, 1}, {1, 2}, {2, 3}, {0, 3},          // first 4-cycle
      {4, 5}, {5, 6}, {6, 7}, {7, 8},          // ring through channel 5
      {4, 8}, {5, 8},                          // chords closing {6,7,8,9}
      {2, 4}, {3, 4}};                         // bridge into channel 5
  CHECK(edge_set(model) == expected);
  CHECK(model.latent_specs.size() == 8);
  for (const auto& s : model.latent_specs) {
    CHECK(s.root_magnitude == 1.05);
    CHECK(s.phase == 0.10);
  }
}

TEST_CASE("preset example2 matrix and ground truth") {
  const auto model = preset_model(Preset::example2, 1.0);
  REQUIRE(model.mixing.rows() == 9);
  REQUIRE(model.mixing.cols() == 5);
  for (int i = 5; i < 9; ++i) {
    CHECK(model.mixing(i, 4) == 1.0);
    for (int l = 0; l < 4; ++l) CHECK(model.mixing(i, l) == 0.0);
  }
  CHECK(model.mixing(4, 3) == 0.5);
  CHECK(model.mixing(4, 4) == 0.5);

  const auto edges = edge_set(model);
  // Planted 4-cycle.
  for (auto e : {std::pair{0, 1}, std::pair{1, 2}, std::pair{2, 3}, std::pair{0, 3}})
    CHECK(edges.count(e) == 1);
  // Chordless: no diagonals.
  CHECK(edges.count({0, 2}) == 0);
  CHECK(edges.count({1, 3}) == 0);
  // Planted 4-clique on channels 6..9 (all six pairs).
  for (int i = 5; i < 9; ++i)
    for (int j = i + 1; j < 9; ++j) CHECK(edges.count({i, j}) == 1);
}

TEST_CASE("preset example3 ground truths") {
  const auto cyc = preset_model(Preset::example3_cyclic, 0.5);
  REQUIRE(cyc.mixing.rows() == 6);
  REQUIRE(cyc.mixing.cols() == 6);
  CHECK(cyc.noise_sd == 0.5);
  const std::set<std::pair<int, int>> ring = {{0, 1}, {1, 2}, {2, 3},
                                              {3, 4}, {4, 5}, {0, 5}};
  CHECK(edge_set(cyc) == ring);

  const auto rnd = preset_model(Preset::example3_random, 0.5);
  REQUIRE(rnd.mixing.rows() == 6);
  REQUIRE(rnd.mixing.cols() == 6);
  const std::set<std::pair<int, int>> expected = {{0, 1}, {0, 3}, {0, 4},
                                                  {1, 3}, {2, 3}, {4, 5}};
  CHECK(edge_set(rnd) == expected);
}

TEST_CASE("preset panels are reproducible and carry the sampling rate") {
  const auto [p1, m1] = preset_example(Preset::example1, 1.0, 77, 256);
  const auto [p2, m2] = preset_example(Preset::example1, 1.0, 77, 256);
  CHECK(p1.sampling_rate == 100.0);
  CHECK(p1.channels() == 9);
  CHECK(p1.samples() == 256);
  CHECK((p1.values.array() == p2.values.array()).all());
  CHECK(m1.ground_truth_edges == m2.ground_truth_edges);

  const auto [p3, m3] = preset_example(Preset::example3_cyclic, 0.5, 77, 256, 200.0);
  CHECK(p3.sampling_rate == 200.0);
  CHECK(p3.channels() == 6);
}
