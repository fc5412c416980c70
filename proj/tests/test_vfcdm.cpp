#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "sknaflow/error.hpp"
#include "sknaflow/vfcdm.hpp"
#include "support.hpp"

using Catch::Approx;
using namespace sknaflow;
using testing::interior;
using testing::kTwoPi;

namespace {

// Ideal band limit by a direct O(n^2) DFT: keep |f| <= cutoff, drop the rest.
std::vector<double> dft_band_limit(const std::vector<double>& x, double fs, double cutoff) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> w(n);
  for (std::size_t k = 0; k < n; ++k) w[k] = std::polar(1.0, -kTwoPi * static_cast<double>(k) / static_cast<double>(n));
  std::vector<std::complex<double>> spec(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double f = static_cast<double>(std::min(k, n - k)) * fs / static_cast<double>(n);
    if (f > cutoff) continue;
    std::complex<double> s = 0.0;
    std::size_t idx = 0;
    for (std::size_t t = 0; t < n; ++t) {
      s += x[t] * w[idx];
      idx += k;
      if (idx >= n) idx -= n;
    }
    spec[k] = s;
  }
  std::vector<double> y(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    if (spec[k] == 0.0) continue;
    std::size_t idx = 0;
    for (std::size_t t = 0; t < n; ++t) {
      y[t] += (spec[k] * std::conj(w[idx])).real();
      idx += k;
      if (idx >= n) idx -= n;
    }
  }
  for (auto& v : y) v /= static_cast<double>(n);
  return y;
}

double energy(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

}  // namespace

TEST_CASE("twelve components tile 0-1920 Hz", "[vfcdm][tiling]") {
  const double fs = 4000.0;
  const auto x = testing::white_noise(16000, 77);
  const auto want = dft_band_limit(x, fs, 1920.0);

  const auto dec = decompose(x, fs);
  REQUIRE(dec.components.size() == 12);
  REQUIRE(dec.components.front().band == FrequencyBand{0.0, 160.0});
  REQUIRE(dec.components.back().band == FrequencyBand{1760.0, 1920.0});
  REQUIRE(dec.components[3].center_hz == 560.0);
  const auto sum = dec.sum_reconstructed({0.0, 1920.0});
  const double err = testing::relative_rms_error(interior(sum, 4000), interior(want, 4000));
  INFO("relative RMS error " << err);
  REQUIRE(err <= 0.10);

  DecomposeOptions sharp;
  sharp.lpf_order = 4.0 * 824.0;
  const auto fine = decompose(x, fs, sharp).sum_reconstructed({0.0, 1920.0});
  const double fine_err = testing::relative_rms_error(interior(fine, 4000), interior(want, 4000));
  INFO("relative RMS error at 4x order " << fine_err);
  REQUIRE(fine_err <= 0.02);
}

TEST_CASE("a tone lands in its own component with the right amplitude", "[vfcdm][tone]") {
  const double fs = 4000.0;
  const std::size_t n = 40000;
  for (double f : {200.0, 500.0, 750.0, 1000.0, 1500.0}) {
    INFO("tone " << f << " Hz");
    const auto x = testing::tone(n, fs, f, 3.0, 0.4);
    const auto dec = decompose(x, fs);
    double total = 0.0, own = 0.0;
    const BandComponent* home = nullptr;
    for (const auto& c : dec.components) {
      const double e = energy(interior(c.reconstructed, 4000));
      total += e;
      if (c.band.low_hz <= f && f < c.band.high_hz) {
        own = e;
        home = &c;
      }
    }
    REQUIRE(home != nullptr);
    REQUIRE(own / total >= 0.95);
    for (double a : interior(home->amplitude, 4000)) REQUIRE(std::abs(a - 3.0) <= 0.02 * 3.0);
  }
}

TEST_CASE("decomposition is bit-identical across worker counts", "[vfcdm][parallel]") {
  const auto x = testing::white_noise(20000, 3);
  DecomposeOptions one, many;
  many.workers = 5;
  const auto a = decompose(x, 4000.0, one);
  const auto b = decompose(x, 4000.0, many);
  REQUIRE(a.dc == b.dc);
  for (std::size_t k = 0; k < a.components.size(); ++k) {
    REQUIRE(a.components[k].reconstructed == b.components[k].reconstructed);
    REQUIRE(a.components[k].amplitude == b.components[k].amplitude);
  }
}

TEST_CASE("decomposition parameters are checked", "[vfcdm]") {
  const auto x = testing::white_noise(20000, 3);
  DecomposeOptions wide;
  wide.band_width_hz = 200.0;  // 12 x 200 = 2400 Hz > Nyquist
  REQUIRE_THROWS_AS(decompose(x, 4000.0, wide), Error);
  DecomposeOptions none;
  none.n_components = 0;
  REQUIRE_THROWS_AS(decompose(x, 4000.0, none), Error);
}

TEST_CASE("cdm_component demodulates an offset tone", "[vfcdm][cdm]") {
  const double fs = 4000.0;
  const auto x = testing::tone(20000, fs, 510.0, 2.0);
  const auto c = cdm_component(x, fs, 500.0, 40.0);
  for (double a : interior(c.amplitude, 2000)) REQUIRE(a == Approx(2.0).epsilon(0.01));
  const auto track = instantaneous_frequency(c, fs);
  for (double f : interior(track.f_hz, 2000)) REQUIRE(f == Approx(510.0).margin(0.1));
  for (double v : interior(c.reconstructed, 2000)) REQUIRE(std::abs(v) <= 2.05);

  REQUIRE_THROWS_AS(cdm_component(x, fs, 500.0, 500.0), Error);
  REQUIRE_THROWS_AS(cdm_component(x, fs, 2100.0, 40.0), Error);
}

TEST_CASE("cdm_component at zero centre is a plain lowpass", "[vfcdm][cdm]") {
  std::vector<double> x(8000, 1.25);
  const auto c = cdm_component(x, 4000.0, 0.0, 50.0);
  for (double v : c.reconstructed) REQUIRE(v == Approx(1.25).margin(1e-9));
}

TEST_CASE("variable-frequency refinement follows a frequency-modulated tone", "[vfcdm][refine]") {
  const double fs = 4000.0;
  const std::size_t n = 40000;
  std::vector<double> x(n);
  FrequencyTrack track;
  track.f_hz.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    track.f_hz[i] = 500.0 + 20.0 * std::sin(kTwoPi * 0.5 * t);
    const double cycles = 500.0 * t + 20.0 * (1.0 - std::cos(kTwoPi * 0.5 * t)) / (kTwoPi * 0.5);
    x[i] = 1.5 * std::cos(kTwoPi * cycles);
  }
  const auto c = vfcdm_refine(x, fs, track, 10.0);
  REQUIRE(c.center_hz == Approx(500.0).margin(0.5));
  for (double a : interior(c.amplitude, 4000)) REQUIRE(std::abs(a - 1.5) <= 0.02 * 1.5);
  REQUIRE(testing::relative_rms_error(interior(c.reconstructed, 4000), interior(x, 4000)) <= 0.02);

  // A fixed 500 Hz demodulation with the same narrow lowpass misses most of it.
  const auto fixed = cdm_component(x, fs, 500.0, 10.0);
  REQUIRE(testing::rms(interior(fixed.amplitude, 4000)) < 1.0);

  REQUIRE_THROWS_AS(vfcdm_refine(x, fs, track, 600.0), Error);
  FrequencyTrack short_track{{500.0, 500.0}};
  REQUIRE_THROWS_AS(vfcdm_refine(x, fs, short_track, 10.0), Error);
}

TEST_CASE("phase unwrapping removes 2 pi jumps", "[vfcdm]") {
  std::vector<double> wrapped;
  for (int i = 0; i < 50; ++i) wrapped.push_back(std::remainder(0.4 * i, kTwoPi));
  const auto u = unwrap_phase(wrapped);
  for (int i = 0; i < 50; ++i) REQUIRE(u[i] == Approx(0.4 * i).margin(1e-12));
}
