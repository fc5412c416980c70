#include "sknaflow/filters.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "sknaflow/error.hpp"
#include "sknaflow/fft.hpp"
#include "sknaflow/table.hpp"

namespace sknaflow {

namespace {

constexpr const char* kModule = "dsp-filters";
constexpr double kPi = std::numbers::pi;

// Direct convolution is cheaper than an FFT pair below this tap count.
constexpr std::size_t kDirectTapLimit = 64;

std::vector<double> hamming(std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (n == 1) return w;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.54 - 0.46 * std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  return w;
}

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(kPi * x) / (kPi * x); }

// Windowed-sinc lowpass with unit DC gain.
std::vector<double> windowed_lowpass(double cutoff_hz, double fs, std::span<const double> window) {
  const std::size_t n = window.size();
  const double mid = static_cast<double>(n - 1) / 2.0;
  const double fc = cutoff_hz / fs;
  std::vector<double> h(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    h[i] = 2.0 * fc * sinc(2.0 * fc * (static_cast<double>(i) - mid)) * window[i];
    sum += h[i];
  }
  for (auto& v : h) v /= sum;
  return h;
}

std::size_t make_odd(std::size_t n) { return n % 2 == 0 ? n + 1 : n; }

// Odd reflection about the end samples; indices beyond one full reflection clamp.
double reflected(std::span<const double> x, std::ptrdiff_t i) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  if (i >= 0 && i < n) return x[static_cast<std::size_t>(i)];
  if (i < 0) {
    const auto k = std::min<std::ptrdiff_t>(-i, n - 1);
    return 2.0 * x[0] - x[static_cast<std::size_t>(k)];
  }
  const auto k = std::min<std::ptrdiff_t>(i - (n - 1), n - 1);
  return 2.0 * x[static_cast<std::size_t>(n - 1)] - x[static_cast<std::size_t>(n - 1 - k)];
}

std::vector<double> full_convolution(std::span<const double> x, std::span<const double> h) {
  if (h.size() <= kDirectTapLimit) {
    std::vector<double> y(x.size() + h.size() - 1, 0.0);
    for (std::size_t i = 0; i < y.size(); ++i) {
      const std::size_t k_lo = i >= x.size() ? i - x.size() + 1 : 0;
      const std::size_t k_hi = std::min(i, h.size() - 1);
      double acc = 0.0;
      for (std::size_t k = k_lo; k <= k_hi; ++k) acc += h[k] * x[i - k];
      y[i] = acc;
    }
    return y;
  }
  fft::FirConvolver conv(h, x.size());
  return conv.convolve(x);
}

struct Biquad {
  double b0, b1, b2, a1, a2;

  void run(std::vector<double>& x) const {
    double s1 = 0.0, s2 = 0.0;
    for (auto& v : x) {
      const double in = v;
      const double out = b0 * in + s1;
      s1 = b1 * in - a1 * out + s2;
      s2 = b2 * in - a2 * out;
      v = out;
    }
  }
};

Biquad design_notch(double center_hz, double q, double fs) {
  const double w0 = 2.0 * kPi * center_hz / fs;
  const double bw = w0 / q;
  const double gain = 1.0 / (1.0 + std::tan(bw / 2.0));
  const double c = std::cos(w0);
  return {gain, -2.0 * gain * c, gain, -2.0 * gain * c, 2.0 * gain - 1.0};
}

// Samples for the notch transient to decay by e^-10.
std::size_t notch_settle_samples(const Biquad& bq) {
  const double radius = std::sqrt(std::max(bq.a2, 0.0));
  if (radius >= 1.0) return 0;
  return static_cast<std::size_t>(std::ceil(10.0 / (1.0 - radius)));
}

}  // namespace

std::vector<double> reflect_pad(std::span<const double> x, std::size_t pad) {
  std::vector<double> out(x.size() + 2 * pad);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = reflected(x, static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(pad));
  }
  return out;
}

FilterSpec FilterSpec::lowpass(double cutoff_hz, double order) {
  return FilterSpec{FilterKind::lowpass, {cutoff_hz}, order, true, 0.0};
}

FilterSpec FilterSpec::highpass(double cutoff_hz, double order) {
  return FilterSpec{FilterKind::highpass, {cutoff_hz}, order, true, 0.0};
}

FilterSpec FilterSpec::bandpass(double low_hz, double high_hz, double order) {
  return FilterSpec{FilterKind::bandpass, {low_hz, high_hz}, order, true, 0.0};
}

void validate(const FilterSpec& spec, double fs) {
  const std::string op = "design_fir";
  if (!(fs > 0.0)) throw Error(ErrorKind::parameter, kModule, op, "sample rate must be positive");
  const double nyquist = fs / 2.0;
  const std::size_t want = spec.kind == FilterKind::bandpass ? 2 : 1;
  if (spec.cutoffs_hz.size() != want) {
    throw Error(ErrorKind::parameter, kModule, op,
                "expected " + std::to_string(want) + " cutoff(s), got " + std::to_string(spec.cutoffs_hz.size()));
  }
  for (double c : spec.cutoffs_hz) {
    if (!(c > 0.0) || !(c < nyquist)) {
      throw Error(ErrorKind::parameter, kModule, op,
                  "cutoff " + std::to_string(c) + " Hz must lie in (0, " + std::to_string(nyquist) + ") Hz");
    }
  }
  if (spec.kind == FilterKind::bandpass && !(spec.cutoffs_hz[0] < spec.cutoffs_hz[1])) {
    throw Error(ErrorKind::parameter, kModule, op, "bandpass needs low < high");
  }
  if (spec.order_or_q < 0.0 || spec.transition_hz < 0.0) {
    throw Error(ErrorKind::parameter, kModule, op, "order and transition width must be non-negative");
  }
}

double default_transition_hz(const FilterSpec& spec, double fs) {
  const double nyquist = fs / 2.0;
  double narrowest = nyquist;
  for (double c : spec.cutoffs_hz) narrowest = std::min({narrowest, c, nyquist - c});
  return 0.2 * narrowest;
}

std::size_t hamming_taps_for(double transition_hz, double fs) {
  return make_odd(static_cast<std::size_t>(std::ceil(3.3 * fs / transition_hz)));
}

std::vector<double> design_fir(const FilterSpec& spec, double fs) {
  if (spec.kind == FilterKind::notch) {
    throw Error(ErrorKind::design, kModule, "design_fir", "notch filters are IIR; use apply_notch_bank");
  }
  validate(spec, fs);

  const double transition = spec.transition_hz > 0.0 ? spec.transition_hz : default_transition_hz(spec, fs);
  const std::size_t needed = hamming_taps_for(transition, fs);
  std::size_t taps = needed;
  if (spec.order_or_q > 0.0) {
    auto order = static_cast<std::size_t>(std::ceil(spec.order_or_q));
    if (order % 2 == 1) ++order;
    taps = order + 1;
    if (taps < 3) throw Error(ErrorKind::design, kModule, "design_fir", "order must be at least 2");
    if (spec.transition_hz > 0.0 && taps < needed) {
      throw Error(ErrorKind::design, kModule, "design_fir",
                  "order " + std::to_string(order) + " too small for a " + std::to_string(transition) +
                      " Hz transition (needs " + std::to_string(needed - 1) + ")");
    }
  }

  const auto window = hamming(taps);
  switch (spec.kind) {
    case FilterKind::lowpass:
      return windowed_lowpass(spec.cutoffs_hz[0], fs, window);
    case FilterKind::highpass: {
      auto h = windowed_lowpass(spec.cutoffs_hz[0], fs, window);
      for (auto& v : h) v = -v;
      h[taps / 2] += 1.0;
      return h;
    }
    case FilterKind::bandpass: {
      auto hi = windowed_lowpass(spec.cutoffs_hz[1], fs, window);
      const auto lo = windowed_lowpass(spec.cutoffs_hz[0], fs, window);
      for (std::size_t i = 0; i < taps; ++i) hi[i] -= lo[i];
      const double g = fir_gain(hi, 0.5 * (spec.cutoffs_hz[0] + spec.cutoffs_hz[1]), fs);
      for (auto& v : hi) v /= g;
      return hi;
    }
    case FilterKind::notch: break;
  }
  return {};
}

double fir_gain(std::span<const double> taps, double freq_hz, double fs) {
  std::complex<double> acc{0.0, 0.0};
  const double w = 2.0 * kPi * freq_hz / fs;
  for (std::size_t k = 0; k < taps.size(); ++k) acc += taps[k] * std::polar(1.0, -w * static_cast<double>(k));
  return std::abs(acc);
}

std::vector<double> apply_filter(std::span<const double> signal, std::span<const double> taps, bool zero_phase) {
  if (taps.empty()) throw Error(ErrorKind::parameter, kModule, "apply_filter", "empty coefficient set");
  if (signal.size() <= taps.size()) {
    throw Error(ErrorKind::length, kModule, "apply_filter",
                "signal of " + std::to_string(signal.size()) + " samples is not longer than the " +
                    std::to_string(taps.size()) + "-tap filter");
  }
  const std::size_t n = signal.size();
  if (!zero_phase) {
    auto full = full_convolution(signal, taps);
    full.resize(n);
    return full;
  }
  const std::size_t pad = taps.size();
  const std::size_t delay = (taps.size() - 1) / 2;
  const auto padded = reflect_pad(signal, pad);
  const auto full = full_convolution(padded, taps);
  return {full.begin() + static_cast<std::ptrdiff_t>(pad + delay),
          full.begin() + static_cast<std::ptrdiff_t>(pad + delay + n)};
}

void validate(const NotchList& notches, double fs) {
  const double nyquist = fs / 2.0;
  for (std::size_t i = 0; i < notches.entries.size(); ++i) {
    const auto& e = notches.entries[i];
    if (!(e.center_hz > 0.0) || !(e.center_hz < nyquist)) {
      throw Error(ErrorKind::parameter, kModule, "apply_notch_bank",
                  "notch centre " + std::to_string(e.center_hz) + " Hz outside (0, " + std::to_string(nyquist) + ")");
    }
    if (!(e.q > 0.0)) throw Error(ErrorKind::parameter, kModule, "apply_notch_bank", "notch q must be positive");
    if (i > 0 && !(e.center_hz > notches.entries[i - 1].center_hz)) {
      throw Error(ErrorKind::validation, kModule, "apply_notch_bank", "notch centres must be strictly increasing");
    }
  }
}

NotchList parse_notch_list(const std::string& csv_text, const std::string& source) {
  const auto table = parse_csv(csv_text, source);
  const std::size_t ci = table.column_index("center_hz");
  const std::size_t qi = table.column_index("q");
  NotchList list;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    Notch n;
    try {
      n.center_hz = std::stod(table.rows[r][ci]);
      if (table.rows[r][qi].find_first_not_of(" \t") != std::string::npos) n.q = std::stod(table.rows[r][qi]);
    } catch (const std::exception&) {
      throw Error(ErrorKind::parse, kModule, "load_notch_list", source + " row " + std::to_string(r + 2) + ": malformed number");
    }
    list.entries.push_back(n);
  }
  std::sort(list.entries.begin(), list.entries.end(),
            [](const Notch& a, const Notch& b) { return a.center_hz < b.center_hz; });
  return list;
}

NotchList load_notch_list(const std::filesystem::path& path) {
  return parse_notch_list(read_text_file(path, kModule, "load_notch_list"), path.string());
}

std::vector<double> apply_notch_bank(std::span<const double> signal, double fs, const NotchList& notches) {
  validate(notches, fs);
  if (notches.entries.empty() || signal.empty()) return {signal.begin(), signal.end()};

  std::vector<Biquad> sections;
  std::size_t pad = 0;
  for (const auto& e : notches.entries) {
    sections.push_back(design_notch(e.center_hz, e.q, fs));
    pad = std::max(pad, notch_settle_samples(sections.back()));
  }
  pad = std::min(pad, signal.size() - 1);

  auto work = reflect_pad(signal, pad);
  for (const auto& s : sections) s.run(work);
  std::reverse(work.begin(), work.end());
  for (const auto& s : sections) s.run(work);
  std::reverse(work.begin(), work.end());
  return {work.begin() + static_cast<std::ptrdiff_t>(pad),
          work.begin() + static_cast<std::ptrdiff_t>(pad + signal.size())};
}

std::vector<double> rectify(std::span<const double> signal) {
  std::vector<double> out(signal.size());
  std::transform(signal.begin(), signal.end(), out.begin(), [](double v) { return std::abs(v); });
  return out;
}

std::vector<double> moving_average(std::span<const double> signal, double fs, double window_s) {
  const double taps_real = window_s * fs;
  if (!(taps_real >= 1.0)) {
    throw Error(ErrorKind::parameter, kModule, "moving_average", "window_s * fs must be at least 1");
  }
  const auto taps = static_cast<std::ptrdiff_t>(std::llround(taps_real));
  const auto n = static_cast<std::ptrdiff_t>(signal.size());

  // Long-double prefix sums: exact for small integers and monotone for
  // non-negative input, so window sums of non-negative data never go negative.
  std::vector<long double> prefix(signal.size() + 1, 0.0L);
  for (std::ptrdiff_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + static_cast<long double>(signal[i]);

  std::vector<double> out(signal.size());
  const std::ptrdiff_t back = taps / 2;
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - back);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n, i - back + taps);
    out[i] = static_cast<double>((prefix[hi] - prefix[lo]) / static_cast<long double>(hi - lo));
  }
  return out;
}

Ratio rational_ratio(double fs_in, double fs_out) {
  if (!(fs_in > 0.0) || !(fs_out > 0.0)) {
    throw Error(ErrorKind::parameter, kModule, "resample", "sample rates must be positive");
  }
  const double ratio = fs_out / fs_in;
  for (std::size_t q = 1; q <= 64; ++q) {
    const double target = ratio * static_cast<double>(q);
    const double p = std::round(target);
    if (p >= 1.0 && std::abs(p - target) <= 1e-9 * target) return {static_cast<std::size_t>(p), q};
  }
  throw Error(ErrorKind::unsupported_ratio, kModule, "resample",
              "ratio " + std::to_string(fs_out) + "/" + std::to_string(fs_in) +
                  " is not a fraction with denominator <= 64");
}

std::vector<double> resample(std::span<const double> signal, double fs_in, double fs_out) {
  const Ratio r = rational_ratio(fs_in, fs_out);
  if (r.up == 1 && r.down == 1) return {signal.begin(), signal.end()};
  if (signal.empty()) return {};

  // Kaiser lowpass at the upsampled rate: passband to 0.4, stopband from 0.5
  // of the lower rate, 80 dB design attenuation.
  const double fs_up = fs_in * static_cast<double>(r.up);
  const double fs_min = std::min(fs_in, fs_out);
  const double cutoff = 0.45 * fs_min;
  const double transition = 0.1 * fs_min;
  constexpr double kAttenuationDb = 80.0;
  const double beta = 0.1102 * (kAttenuationDb - 8.7);
  const std::size_t taps = make_odd(static_cast<std::size_t>(
      std::ceil((kAttenuationDb - 7.95) / (2.285 * 2.0 * kPi * transition / fs_up))) + 1);

  std::vector<double> window(taps);
  const double i0_beta = std::cyl_bessel_i(0.0, beta);
  for (std::size_t i = 0; i < taps; ++i) {
    const double t = 2.0 * static_cast<double>(i) / static_cast<double>(taps - 1) - 1.0;
    window[i] = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - t * t))) / i0_beta;
  }
  auto h = windowed_lowpass(cutoff, fs_up, window);

  // Each polyphase branch gets unit DC gain, which also absorbs the factor
  // `up` lost to zero stuffing.
  for (std::size_t phase = 0; phase < r.up; ++phase) {
    double sum = 0.0;
    for (std::size_t k = phase; k < taps; k += r.up) sum += h[k];
    for (std::size_t k = phase; k < taps; k += r.up) h[k] /= sum;
  }

  const auto L = static_cast<std::ptrdiff_t>(r.up);
  const auto M = static_cast<std::ptrdiff_t>(r.down);
  const auto delay = static_cast<std::ptrdiff_t>((taps - 1) / 2);
  const std::size_t out_len = (signal.size() * r.up + r.down - 1) / r.down;
  std::vector<double> out(out_len);
  for (std::size_t m = 0; m < out_len; ++m) {
    const std::ptrdiff_t j0 = static_cast<std::ptrdiff_t>(m) * M + delay;
    double acc = 0.0;
    for (auto k = static_cast<std::size_t>(j0 % L); k < taps; k += r.up) {
      acc += h[k] * reflected(signal, (j0 - static_cast<std::ptrdiff_t>(k)) / L);
    }
    out[m] = acc;
  }
  return out;
}

}  // namespace sknaflow
