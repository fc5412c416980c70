#pragma once

#include <span>
#include <string>
#include <vector>

#include "sknaflow/band.hpp"
#include "sknaflow/metrics.hpp"

namespace sknaflow {

struct PsdEstimate {
  std::vector<double> freqs_hz;
  std::vector<double> power;  // units^2 per Hz, one-sided
  double window_s = 0.0;
  double overlap_frac = 0.0;
};

struct BandPowerRow {
  FrequencyBand band;
  double absolute_power = 0.0;
  double normalized_power_pct = 0.0;
};

// Averaged Hamming-windowed periodograms with per-segment mean removal,
// scaled so that the integral of power over [0, fs/2] equals the variance.
PsdEstimate welch_psd(std::span<const double> signal, double fs, double window_s = 4.0, double overlap_frac = 0.5);

// 150-250, 250-500, ... , 1750-2000 Hz.
std::vector<FrequencyBand> default_psd_bands();

// Trapezoidal integral of the PSD between two frequencies, linearly
// interpolating at band edges that fall between bins.
double integrate_psd(const PsdEstimate& psd, FrequencyBand band);

// Normalised power is each band's share of the sum over the requested bands.
std::vector<BandPowerRow> band_power(const PsdEstimate& psd, std::span<const FrequencyBand> bands);

struct PsdAucResult {
  double absolute_auc = 0.0;
  double normalized_auc = 0.0;
};

// Per-segment scalar scores for the band-power comparison: absolute power
// in `score_band` and its percentage of power across `reference_bands`.
struct SegmentBandScore {
  double absolute = 0.0;
  double normalized_pct = 0.0;
};

SegmentBandScore segment_band_score(const PsdEstimate& psd, FrequencyBand score_band,
                                    std::span<const FrequencyBand> reference_bands);

// AUC of baseline (negatives) against task (positives) segment scores.
PsdAucResult psd_auc_comparison(std::span<const SegmentBandScore> negatives,
                                std::span<const SegmentBandScore> positives);

}  // namespace sknaflow
