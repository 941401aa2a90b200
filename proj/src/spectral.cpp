#include "tdanet/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <sstream>
#include <vector>

namespace tdanet {

std::string kernel_name(Kernel k) {
  switch (k) {
    case Kernel::rectangular: return "rectangular";
    case Kernel::parzen: return "parzen";
  }
  throw config_error("kernel_name: invalid kernel value");
}

Kernel kernel_from_string(const std::string& name) {
  if (name == "rectangular") return Kernel::rectangular;
  if (name == "parzen") return Kernel::parzen;
  throw config_error("unknown kernel '" + name + "' (expected rectangular or parzen)");
}

std::string transform_name(CoherenceTransform t) {
  switch (t) {
    case CoherenceTransform::one_minus: return "one_minus";
    case CoherenceTransform::sqrt_one_minus_sq: return "sqrt_one_minus_sq";
  }
  throw config_error("transform_name: invalid transform value");
}

CoherenceTransform transform_from_string(const std::string& name) {
  if (name == "one_minus") return CoherenceTransform::one_minus;
  if (name == "sqrt_one_minus_sq") return CoherenceTransform::sqrt_one_minus_sq;
  throw config_error("unknown coherence transform '" + name +
                     "' (expected one_minus or sqrt_one_minus_sq)");
}

namespace {

// FFTW's planner is not thread-safe; plan creation and destruction must be
// serialized even though executing distinct plans concurrently is fine.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// Kernel profile on the normalized offset u = delta / bandwidth, support |u| <= 1.
double kernel_weight(Kernel kernel, double u) {
  const double a = std::abs(u);
  if (a > 1.0) return 0.0;
  switch (kernel) {
    case Kernel::rectangular:
      return 1.0;
    case Kernel::parzen:
      if (a <= 0.5) return 1.0 - 6.0 * a * a + 6.0 * a * a * a;
      return 2.0 * (1.0 - a) * (1.0 - a) * (1.0 - a);
  }
  return 0.0;
}

// Complex forward/backward FFT pair of a fixed length sharing one buffer.
class FftPair {
 public:
  explicit FftPair(long n) : n_(n), buf_(static_cast<std::size_t>(n)) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    forward_ = fftw_plan_dft_1d(static_cast<int>(n),
                                reinterpret_cast<fftw_complex*>(buf_.data()),
                                reinterpret_cast<fftw_complex*>(buf_.data()),
                                FFTW_FORWARD, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_1d(static_cast<int>(n),
                                 reinterpret_cast<fftw_complex*>(buf_.data()),
                                 reinterpret_cast<fftw_complex*>(buf_.data()),
                                 FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~FftPair() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }
  FftPair(const FftPair&) = delete;
  FftPair& operator=(const FftPair&) = delete;

  std::vector<std::complex<double>>& buffer() { return buf_; }
  void forward() { fftw_execute(forward_); }
  // Unnormalized inverse; caller divides by n.
  void backward() { fftw_execute(backward_); }
  long size() const { return n_; }

 private:
  long n_;
  std::vector<std::complex<double>> buf_;
  fftw_plan forward_;
  fftw_plan backward_;
};

}  // namespace

Eigen::MatrixXcd fourier_coefficients(const TimeSeriesPanel& panel) {
  panel.validate();
  const int P = panel.channels();
  const long T = panel.samples();
  const long K = T / 2 + 1;

  Eigen::MatrixXcd coef(P, K);
  std::vector<double> in(static_cast<std::size_t>(T));
  std::vector<std::complex<double>> out(static_cast<std::size_t>(K));
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(
        static_cast<int>(T), in.data(), reinterpret_cast<fftw_complex*>(out.data()),
        FFTW_ESTIMATE);
  }

  const double scale = 1.0 / std::sqrt(static_cast<double>(T));
  for (int i = 0; i < P; ++i) {
    for (long t = 0; t < T; ++t) in[static_cast<std::size_t>(t)] = panel.values(i, t);
    fftw_execute(plan);
    for (long k = 0; k < K; ++k) {
      // Samples are indexed 1..T, so the transform picks up one grid phase.
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) /
                           static_cast<double>(T);
      coef(i, k) = scale * std::polar(1.0, angle) * out[static_cast<std::size_t>(k)];
    }
  }
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  return coef;
}

SpectralMatrix smoothed_cross_spectrum(const TimeSeriesPanel& panel,
                                       const SmoothingOptions& options) {
  panel.validate();
  const int P = panel.channels();
  const long T = panel.samples();
  const long K = T / 2 + 1;

  if (options.min_support < 1)
    throw config_error("smoothed_cross_spectrum: min_support must be at least 1");
  double h = options.bandwidth;
  if (h == 0.0) h = 4.0 / std::sqrt(static_cast<double>(T));
  if (!(h > 0.0) || !(h < 0.5))
    throw config_error("smoothed_cross_spectrum: bandwidth must lie in (0, 0.5)");

  // Positive-weight offsets of the kernel on the grid of spacing 1/T.
  const double span = h * static_cast<double>(T);
  long max_offset = static_cast<long>(std::floor(span + 1e-9));
  std::vector<double> weights;  // offsets 0..max_offset (mirrored below)
  for (long j = 0; j <= max_offset; ++j)
    weights.push_back(kernel_weight(options.kernel, static_cast<double>(j) / span));
  while (!weights.empty() && weights.back() == 0.0) {
    weights.pop_back();
    --max_offset;
  }
  const long support = 2 * max_offset + 1;
  if (support < options.min_support) {
    std::ostringstream msg;
    msg << "smoothed_cross_spectrum: bandwidth " << h << " leaves only " << support
        << " grid frequencies in the kernel support (need at least "
        << options.min_support << "); coherence would be degenerate";
    throw config_error(msg.str());
  }
  double weight_sum = weights[0];
  for (long j = 1; j <= max_offset; ++j) weight_sum += 2.0 * weights[static_cast<std::size_t>(j)];

  // Full two-sided coefficient grid; the upper half mirrors by conjugation.
  Eigen::MatrixXcd full(P, T);
  if (options.remove_mean) {
    TimeSeriesPanel centered = panel;
    for (int i = 0; i < P; ++i)
      centered.values.row(i).array() -= panel.values.row(i).mean();
    full.leftCols(K) = fourier_coefficients(centered);
  } else {
    full.leftCols(K) = fourier_coefficients(panel);
  }
  for (long m = K; m < T; ++m)
    for (int i = 0; i < P; ++i) full(i, m) = std::conj(full(i, T - m));

  // Normalized symmetric weight array on the circular grid, then its FFT.
  FftPair fft(T);
  std::vector<std::complex<double>> weight_spectrum(static_cast<std::size_t>(T));
  {
    auto& buf = fft.buffer();
    std::fill(buf.begin(), buf.end(), std::complex<double>(0.0, 0.0));
    buf[0] = weights[0] / weight_sum;
    for (long j = 1; j <= max_offset; ++j) {
      const double w = weights[static_cast<std::size_t>(j)] / weight_sum;
      buf[static_cast<std::size_t>(j)] = w;
      buf[static_cast<std::size_t>(T - j)] = w;
    }
    fft.forward();
    weight_spectrum = buf;
  }

  SpectralMatrix spec;
  spec.frequencies.resize(static_cast<std::size_t>(K));
  for (long k = 0; k < K; ++k)
    spec.frequencies[static_cast<std::size_t>(k)] =
        static_cast<double>(k) / static_cast<double>(T);
  spec.values.assign(static_cast<std::size_t>(K), Eigen::MatrixXcd::Zero(P, P));
  spec.bandwidth = h;
  spec.kernel = options.kernel;
  spec.T = T;
  spec.sampling_rate = panel.sampling_rate;
  spec.labels = panel.channel_labels;

  // Smooth each cross-periodogram g_ij(m) = d_i(m) conj(d_j(m)) by circular
  // correlation with the (real, even) weight array via the convolution
  // theorem: FFT(g) is multiplied bin-wise by the real FFT of the weights.
  auto& buf = fft.buffer();
  const double inv_t = 1.0 / static_cast<double>(T);
  for (int i = 0; i < P; ++i) {
    for (int j = i; j < P; ++j) {
      for (long m = 0; m < T; ++m)
        buf[static_cast<std::size_t>(m)] = full(i, m) * std::conj(full(j, m));
      fft.forward();
      for (long m = 0; m < T; ++m)
        buf[static_cast<std::size_t>(m)] *=
            weight_spectrum[static_cast<std::size_t>(m)].real();
      fft.backward();
      if (i == j) {
        for (long k = 0; k < K; ++k) {
          // Exact arithmetic gives a nonnegative real average; round-off from
          // the transform pair may leave a tiny imaginary part or negative
          // dust, which is cleared so the diagonal is exactly real.
          double v = buf[static_cast<std::size_t>(k)].real() * inv_t;
          if (v < 0.0) v = 0.0;
          spec.values[static_cast<std::size_t>(k)](i, i) = v;
        }
      } else {
        for (long k = 0; k < K; ++k) {
          const std::complex<double> v = buf[static_cast<std::size_t>(k)] * inv_t;
          spec.values[static_cast<std::size_t>(k)](i, j) = v;
          spec.values[static_cast<std::size_t>(k)](j, i) = std::conj(v);
        }
      }
    }
  }
  return spec;
}

CoherenceMatrix band_coherence(const SpectralMatrix& spec,
                               std::pair<double, double> band_hz,
                               double sampling_rate) {
  if (spec.values.empty() || spec.frequencies.size() != spec.values.size())
    throw data_error("band_coherence: spectral matrix is empty or inconsistent");
  const double sr = sampling_rate > 0.0 ? sampling_rate : spec.sampling_rate;
  if (!(sr > 0.0)) throw config_error("band_coherence: sampling rate must be positive");
  const auto [low, high] = band_hz;
  if (!(low >= 0.0) || !(high > low) || !(high <= sr / 2.0 + 1e-12))
    throw config_error("band_coherence: band must satisfy 0 <= low < high <= SR/2");

  const int P = spec.channels();
  std::vector<std::size_t> in_band;
  for (std::size_t k = 0; k < spec.frequencies.size(); ++k) {
    const double hz = spec.frequencies[k] * sr;
    if (hz >= low && hz <= high) in_band.push_back(k);
  }
  if (in_band.empty()) {
    std::ostringstream msg;
    msg << "band_coherence: no grid frequency falls in [" << low << ", " << high
        << "] Hz; the grid spacing is " << sr / static_cast<double>(spec.T)
        << " Hz — lengthen the series or widen the band";
    throw data_error(msg.str());
  }

  CoherenceMatrix coh;
  coh.values = Eigen::MatrixXd::Zero(P, P);
  for (int i = 0; i < P; ++i) coh.values(i, i) = 1.0;
  for (int i = 0; i < P; ++i) {
    for (int j = i + 1; j < P; ++j) {
      double acc = 0.0;
      for (std::size_t k : in_band) {
        const auto& f = spec.values[k];
        const double pii = f(i, i).real();
        const double pjj = f(j, j).real();
        if (!(pii > 0.0) || !(pjj > 0.0))
          throw data_error("band_coherence: a channel has no spectral power in band");
        double c = std::norm(f(i, j)) / (pii * pjj);
        if (c > 1.0) {
          if (c > 1.0 + 1e-9)
            throw data_error("band_coherence: coherence exceeds 1 beyond round-off");
          c = 1.0;
        }
        acc += c;
      }
      const double mean = acc / static_cast<double>(in_band.size());
      coh.values(i, j) = mean;
      coh.values(j, i) = mean;
    }
  }
  coh.band_hz = band_hz;
  coh.sampling_rate = sr;
  coh.labels = spec.labels;
  coh.validate();
  return coh;
}

DistanceMatrix coherence_to_distance(const CoherenceMatrix& coh,
                                     CoherenceTransform transform) {
  coh.validate();
  const Eigen::Index P = coh.values.rows();
  DistanceMatrix dist;
  dist.values = Eigen::MatrixXd::Zero(P, P);
  for (Eigen::Index i = 0; i < P; ++i) {
    for (Eigen::Index j = 0; j < P; ++j) {
      if (i == j) continue;
      const double c = coh.values(i, j);
      double d = 0.0;
      switch (transform) {
        case CoherenceTransform::one_minus:
          d = 1.0 - c;
          break;
        case CoherenceTransform::sqrt_one_minus_sq:
          d = std::sqrt(std::max(0.0, 1.0 - c * c));
          break;
      }
      dist.values(i, j) = d;
    }
  }
  dist.labels = coh.labels;
  dist.validate();
  return dist;
}

}  // namespace tdanet
