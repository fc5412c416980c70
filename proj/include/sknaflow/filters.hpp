#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <span>
#include <vector>

namespace sknaflow {

enum class FilterKind { lowpass, highpass, bandpass, notch };

struct FilterSpec {
  FilterKind kind = FilterKind::lowpass;
  std::vector<double> cutoffs_hz;
  // FIR order (taps - 1) for lowpass/highpass/bandpass, quality factor for
  // notch. Zero selects the default order.
  double order_or_q = 0.0;
  bool zero_phase = true;
  // Requested transition width; zero means "20% of the narrower of cutoff
  // and Nyquist - cutoff".
  double transition_hz = 0.0;

  static FilterSpec lowpass(double cutoff_hz, double order = 0.0);
  static FilterSpec highpass(double cutoff_hz, double order = 0.0);
  static FilterSpec bandpass(double low_hz, double high_hz, double order = 0.0);
};

void validate(const FilterSpec& spec, double fs);

// Width the default design targets for `spec` at `fs`.
double default_transition_hz(const FilterSpec& spec, double fs);

// Odd tap count a Hamming design needs for the given transition width.
std::size_t hamming_taps_for(double transition_hz, double fs);

// Linear-phase Hamming windowed-sinc. Lowpass taps sum to exactly one,
// highpass is the spectral inverse of the matching lowpass (zero DC gain) and
// bandpass is normalised to unit gain at the band centre. The tap count is
// always odd so the group delay is an integer number of samples.
std::vector<double> design_fir(const FilterSpec& spec, double fs);

// Magnitude of the FIR frequency response at `freq_hz`.
double fir_gain(std::span<const double> taps, double freq_hz, double fs);

// Extends both ends by `pad` samples of odd reflection (2 x[0] - x[k]),
// which continues constants and linear trends exactly.
std::vector<double> reflect_pad(std::span<const double> signal, std::size_t pad);

// Zero-phase mode compensates the (N-1)/2 group delay and pads both ends by
// odd reflection of one filter length. Causal mode starts from rest.
std::vector<double> apply_filter(std::span<const double> signal, std::span<const double> taps, bool zero_phase);

struct Notch {
  double center_hz = 0.0;
  double q = 30.0;
};

struct NotchList {
  std::vector<Notch> entries;
};

void validate(const NotchList& notches, double fs);

// CSV `center_hz,q`; q may be blank (defaults to 30).
NotchList parse_notch_list(const std::string& csv_text, const std::string& source = "<memory>");
NotchList load_notch_list(const std::filesystem::path& path);

// Cascade of second-order IIR notches run forward then backward over a
// reflection-padded copy of the signal.
std::vector<double> apply_notch_bank(std::span<const double> signal, double fs, const NotchList& notches);

std::vector<double> rectify(std::span<const double> signal);

// Centered sliding mean of round(window_s * fs) taps; the window shrinks to
// the available samples at either end.
std::vector<double> moving_average(std::span<const double> signal, double fs, double window_s);

// Smallest p/q (q <= 64) equal to fs_out/fs_in; throws unsupported_ratio otherwise.
struct Ratio {
  std::size_t up = 1;
  std::size_t down = 1;
};
Ratio rational_ratio(double fs_in, double fs_out);

// Polyphase rational resampler with a Kaiser anti-alias lowpass at
// 0.45 * min(fs_in, fs_out). Output length is ceil(n * fs_out / fs_in) and
// output sample m sits at input time m / fs_out.
std::vector<double> resample(std::span<const double> signal, double fs_in, double fs_out);

}  // namespace sknaflow
