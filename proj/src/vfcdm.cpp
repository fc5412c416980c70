#include "sknaflow/vfcdm.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <string>

#include "sknaflow/error.hpp"
#include "sknaflow/fft.hpp"
#include "sknaflow/parallel.hpp"

namespace sknaflow {

namespace {

constexpr const char* kModule = "vfcdm";
constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Demodulated {
  std::vector<double> amplitude;
  std::vector<double> phase;
  std::vector<double> reconstructed;
};

// `carrier` holds the fractional carrier cycle count for every padded sample.
Demodulated demodulate(std::span<const double> padded, std::size_t pad, std::size_t n,
                       std::span<const double> carrier, const fft::FirConvolver& conv, double amplitude_scale) {
  std::vector<fft::cplx> z(padded.size());
  for (std::size_t i = 0; i < padded.size(); ++i) z[i] = padded[i] * std::polar(1.0, -kTwoPi * carrier[i]);
  const auto full = conv.convolve(std::span<const fft::cplx>(z));
  const std::size_t offset = pad + (conv.tap_count() - 1) / 2;

  Demodulated out;
  out.amplitude.resize(n);
  out.reconstructed.resize(n);
  std::vector<double> wrapped(n);
  for (std::size_t i = 0; i < n; ++i) {
    const fft::cplx v = full[offset + i];
    out.amplitude[i] = amplitude_scale * std::abs(v);
    wrapped[i] = std::arg(v);
  }
  out.phase = unwrap_phase(wrapped);
  for (std::size_t i = 0; i < n; ++i) {
    out.reconstructed[i] = out.amplitude[i] * std::cos(kTwoPi * carrier[pad + i] + out.phase[i]);
  }
  return out;
}

// Fractional cycles of a fixed carrier, time zero at the first unpadded sample.
std::vector<double> fixed_carrier(double f0, double fs, std::size_t padded_len, std::size_t pad) {
  std::vector<double> frac(padded_len);
  for (std::size_t i = 0; i < padded_len; ++i) {
    const double cycles = f0 * (static_cast<double>(i) - static_cast<double>(pad)) / fs;
    frac[i] = cycles - std::floor(cycles);
  }
  return frac;
}

std::vector<double> lowpass_taps(const FilterSpec& lpf, double cutoff, double fs) {
  FilterSpec spec = lpf;
  spec.kind = FilterKind::lowpass;
  spec.cutoffs_hz = {cutoff};
  return design_fir(spec, fs);
}

BandComponent make_component(double center, FrequencyBand band, Demodulated&& d) {
  BandComponent c;
  c.center_hz = center;
  c.band = band;
  c.amplitude = std::move(d.amplitude);
  c.phase = std::move(d.phase);
  c.reconstructed = std::move(d.reconstructed);
  return c;
}

}  // namespace

std::vector<double> unwrap_phase(std::span<const double> wrapped) {
  std::vector<double> out(wrapped.begin(), wrapped.end());
  double offset = 0.0;
  for (std::size_t i = 1; i < out.size(); ++i) {
    const double d = wrapped[i] - wrapped[i - 1];
    if (d > std::numbers::pi) offset -= kTwoPi;
    else if (d < -std::numbers::pi) offset += kTwoPi;
    out[i] = wrapped[i] + offset;
  }
  return out;
}

std::vector<double> Decomposition::sum_reconstructed(FrequencyBand selection) const {
  std::vector<double> sum(length(), 0.0);
  for (const auto& c : components) {
    if (!selection.contains(c.band)) continue;
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += c.reconstructed[i];
  }
  return sum;
}

BandComponent cdm_component(std::span<const double> signal, double fs, double f0, double fc, const FilterSpec& lpf) {
  const std::string op = "cdm_component";
  if (!(fs > 0.0)) throw Error(ErrorKind::parameter, kModule, op, "fs must be positive");
  if (!(fc > 0.0)) throw Error(ErrorKind::parameter, kModule, op, "fc must be positive");
  if (f0 < 0.0 || !(f0 < fs / 2.0)) {
    throw Error(ErrorKind::parameter, kModule, op, "f0 must lie in [0, fs/2)");
  }
  if (f0 > 0.0 && fc >= f0) {
    throw Error(ErrorKind::parameter, kModule, op,
                "fc " + std::to_string(fc) + " Hz must be below f0 " + std::to_string(f0) + " Hz");
  }
  if (signal.empty()) throw Error(ErrorKind::length, kModule, op, "empty signal");

  const auto taps = lowpass_taps(lpf, fc, fs);
  const std::size_t pad = taps.size();
  const auto padded = reflect_pad(signal, pad);
  const auto carrier = fixed_carrier(f0, fs, padded.size(), pad);
  const fft::FirConvolver conv(taps, padded.size());
  auto d = demodulate(padded, pad, signal.size(), carrier, conv, f0 > 0.0 ? 2.0 : 1.0);
  return make_component(f0, {std::max(0.0, f0 - fc), f0 + fc}, std::move(d));
}

struct Decomposer::State {
  State(std::vector<double> taps_in, std::vector<double> padded_in)
      : taps(std::move(taps_in)), padded(std::move(padded_in)), conv(taps, padded.size()) {}
  std::vector<double> taps;
  std::vector<double> padded;
  fft::FirConvolver conv;
};

Decomposer::Decomposer(std::span<const double> signal, double fs, const DecomposeOptions& options)
    : options_(options), fs_(fs), length_(signal.size()) {
  const std::string op = "decompose";
  if (options.n_components == 0) throw Error(ErrorKind::parameter, kModule, op, "n_components must be >= 1");
  if (!(options.band_width_hz > 0.0)) throw Error(ErrorKind::parameter, kModule, op, "band width must be positive");
  const double top = options.band_width_hz * static_cast<double>(options.n_components);
  if (!(top < fs / 2.0)) {
    throw Error(ErrorKind::parameter, kModule, op,
                "highest band edge " + std::to_string(top) + " Hz must be below Nyquist " + std::to_string(fs / 2.0));
  }
  if (signal.empty()) throw Error(ErrorKind::length, kModule, op, "empty signal");

  const double half = options.band_width_hz / 2.0;
  auto taps = lowpass_taps(FilterSpec::lowpass(half, options.lpf_order), half, fs);
  auto padded = reflect_pad(signal, taps.size());
  state_ = std::make_unique<State>(std::move(taps), std::move(padded));
}

Decomposer::~Decomposer() = default;

FrequencyBand Decomposer::band(std::size_t k) const noexcept {
  const double w = options_.band_width_hz;
  return {w * static_cast<double>(k), w * static_cast<double>(k + 1)};
}

BandComponent Decomposer::component(std::size_t k) const {
  const std::size_t pad = state_->taps.size();
  const double center = options_.band_width_hz * (static_cast<double>(k) + 0.5);
  const auto carrier = fixed_carrier(center, fs_, state_->padded.size(), pad);
  auto d = demodulate(state_->padded, pad, length_, carrier, state_->conv, 2.0);
  return make_component(center, band(k), std::move(d));
}

std::vector<double> Decomposer::dc() const {
  const auto full = state_->conv.convolve(std::span<const double>(state_->padded));
  const std::size_t offset = state_->taps.size() + (state_->taps.size() - 1) / 2;
  return {full.begin() + static_cast<std::ptrdiff_t>(offset),
          full.begin() + static_cast<std::ptrdiff_t>(offset + length_)};
}

Decomposition decompose(std::span<const double> signal, double fs, const DecomposeOptions& options) {
  const Decomposer decomposer(signal, fs, options);
  Decomposition out;
  out.fs = fs;
  out.components.resize(decomposer.size());

  // The extra work item is the dc trace.
  parallel_for(decomposer.size() + 1, options.workers, [&](std::size_t k) {
    if (k == decomposer.size()) out.dc = decomposer.dc();
    else out.components[k] = decomposer.component(k);
  });
  return out;
}

FrequencyTrack instantaneous_frequency(const BandComponent& component, double fs) {
  const auto& phi = component.phase;
  const std::size_t n = phi.size();
  FrequencyTrack track;
  track.f_hz.assign(n, component.center_hz);
  if (n < 2) return track;
  const double scale = fs / kTwoPi;
  track.f_hz[0] += scale * (phi[1] - phi[0]);
  track.f_hz[n - 1] += scale * (phi[n - 1] - phi[n - 2]);
  for (std::size_t i = 1; i + 1 < n; ++i) track.f_hz[i] += scale * 0.5 * (phi[i + 1] - phi[i - 1]);
  return track;
}

BandComponent vfcdm_refine(std::span<const double> signal, double fs, const FrequencyTrack& track, double fc2,
                           const FilterSpec& lpf) {
  const std::string op = "vfcdm_refine";
  const auto& f = track.f_hz;
  if (f.size() != signal.size() || signal.empty()) {
    throw Error(ErrorKind::length, kModule, op, "track and signal lengths differ");
  }
  double lo = f.front(), hi = f.front(), sum = 0.0;
  for (double v : f) {
    if (!std::isfinite(v)) throw Error(ErrorKind::data, kModule, op, "non-finite frequency track");
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    sum += v;
  }
  if (!(fc2 > 0.0) || !(fc2 < lo)) {
    throw Error(ErrorKind::parameter, kModule, op,
                "fc2 " + std::to_string(fc2) + " Hz must lie in (0, min(track) = " + std::to_string(lo) + ")");
  }

  const auto taps = lowpass_taps(lpf, fc2, fs);
  const std::size_t pad = taps.size();
  const std::size_t n = signal.size();
  const auto padded = reflect_pad(signal, pad);

  // Trapezoidal running integral of f(t) in cycles; the padding continues
  // with the end frequencies held constant.
  std::vector<long double> cycles(padded.size());
  const long double inv_fs = 1.0L / static_cast<long double>(fs);
  cycles[pad] = 0.0L;
  for (std::size_t i = 1; i < n; ++i) {
    cycles[pad + i] = cycles[pad + i - 1] + 0.5L * (static_cast<long double>(f[i - 1]) + f[i]) * inv_fs;
  }
  for (std::size_t k = 1; k <= pad; ++k) {
    cycles[pad - k] = -static_cast<long double>(k) * f.front() * inv_fs;
    cycles[pad + n - 1 + k] = cycles[pad + n - 1] + static_cast<long double>(k) * f.back() * inv_fs;
  }
  std::vector<double> carrier(padded.size());
  for (std::size_t i = 0; i < padded.size(); ++i) carrier[i] = static_cast<double>(cycles[i] - std::floor(cycles[i]));

  const fft::FirConvolver conv(taps, padded.size());
  auto d = demodulate(padded, pad, n, carrier, conv, 2.0);
  const double mean = sum / static_cast<double>(n);
  return make_component(mean, {std::max(0.0, lo - fc2), hi + fc2}, std::move(d));
}

void write_tfs_csv(const Decomposition& decomposition, const std::filesystem::path& path, std::size_t step) {
  if (step == 0) step = 1;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, kModule, "write_tfs_csv", "cannot open " + path.string());
  out << "t_s,band_low_hz,band_high_hz,amplitude\n";
  char buf[128];
  for (std::size_t i = 0; i < decomposition.length(); i += step) {
    const double t = static_cast<double>(i) / decomposition.fs;
    for (const auto& c : decomposition.components) {
      std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%.9g\n", t, c.band.low_hz, c.band.high_hz, c.amplitude[i]);
      out << buf;
    }
  }
  if (!out) throw Error(ErrorKind::io, kModule, "write_tfs_csv", "write failed for " + path.string());
}

}  // namespace sknaflow
