#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include "sknaflow/band.hpp"
#include "sknaflow/filters.hpp"

namespace sknaflow {

// One demodulated narrow band: x_k(t) = A(t) cos(2 pi f0 t + phi(t)).
struct BandComponent {
  double center_hz = 0.0;
  FrequencyBand band;
  std::vector<double> amplitude;      // A(t) >= 0
  std::vector<double> phase;          // phi(t), unwrapped, radians
  std::vector<double> reconstructed;  // A(t) cos(2 pi f0 t + phi(t))
};

struct Decomposition {
  std::vector<BandComponent> components;
  double fs = 0.0;
  // Zero-phase lowpass of the input at half the band width. Its content is
  // also carried by the lowest component, so it is not part of the sum.
  std::vector<double> dc;

  std::size_t length() const noexcept { return dc.size(); }

  // Sum of the reconstructed components whose bands lie inside `selection`.
  std::vector<double> sum_reconstructed(FrequencyBand selection) const;
};

struct FrequencyTrack {
  std::vector<double> f_hz;
};

struct DecomposeOptions {
  std::size_t n_components = 12;
  double band_width_hz = 160.0;
  // Lowpass FIR order; zero selects the default design for the half-band cutoff.
  double lpf_order = 0.0;
  std::size_t workers = 1;
};

// Complex demodulation at a fixed centre: multiply by exp(-j 2 pi f0 t),
// zero-phase lowpass at fc, A = 2|z_lp|, phi = unwrapped arg z_lp.
// Only the order/transition fields of `lpf` are used; its cutoff is fc.
// Requires 0 < fc < f0 < fs/2, or f0 == 0 (plain lowpass, A = |z_lp|).
BandComponent cdm_component(std::span<const double> signal, double fs, double f0, double fc,
                            const FilterSpec& lpf = {});

// Shared, read-only state for one fixed-band decomposition: the padded
// input and the lowpass convolver. component() may be called concurrently.
class Decomposer {
 public:
  Decomposer(std::span<const double> signal, double fs, const DecomposeOptions& options = {});
  ~Decomposer();

  std::size_t size() const noexcept { return options_.n_components; }
  std::size_t length() const noexcept { return length_; }
  double fs() const noexcept { return fs_; }
  FrequencyBand band(std::size_t k) const noexcept;

  BandComponent component(std::size_t k) const;
  std::vector<double> dc() const;

 private:
  struct State;
  DecomposeOptions options_;
  double fs_;
  std::size_t length_;
  std::unique_ptr<State> state_;
};

// Centres at band_width * (k - 1/2) for k = 1..n, lowpass cutoff at half the
// band width, so the bands tile [0, n * band_width]. Components are computed
// in parallel; the result is identical for every worker count.
Decomposition decompose(std::span<const double> signal, double fs, const DecomposeOptions& options = {});

// f(t) = f0 + dphi/dt / (2 pi), central differences inside, one-sided at the ends.
FrequencyTrack instantaneous_frequency(const BandComponent& component, double fs);

// Demodulates along exp(-j 2 pi integral f(t) dt) (trapezoidal integral),
// lowpasses at fc2 and reports centre_hz as the mean of the track.
BandComponent vfcdm_refine(std::span<const double> signal, double fs, const FrequencyTrack& track, double fc2,
                           const FilterSpec& lpf = {});

// CSV `t_s,band_low_hz,band_high_hz,amplitude`, one row per component per
// `step` samples.
void write_tfs_csv(const Decomposition& decomposition, const std::filesystem::path& path, std::size_t step = 1);

std::vector<double> unwrap_phase(std::span<const double> wrapped);

}  // namespace sknaflow
