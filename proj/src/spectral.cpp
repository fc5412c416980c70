#include "sknaflow/spectral.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "sknaflow/error.hpp"
#include "sknaflow/fft.hpp"

namespace sknaflow {

namespace {

constexpr const char* kModule = "spectral";

}  // namespace

PsdEstimate welch_psd(std::span<const double> signal, double fs, double window_s, double overlap_frac) {
  const std::string op = "welch_psd";
  if (!(fs > 0.0) || !(window_s > 0.0)) throw Error(ErrorKind::parameter, kModule, op, "fs and window_s must be positive");
  if (!(overlap_frac >= 0.0 && overlap_frac < 1.0)) {
    throw Error(ErrorKind::parameter, kModule, op, "overlap_frac must lie in [0, 1)");
  }
  const auto nperseg = static_cast<std::size_t>(std::llround(window_s * fs));
  if (nperseg < 2 || signal.size() < nperseg) {
    throw Error(ErrorKind::length, kModule, op,
                "signal of " + std::to_string(signal.size()) + " samples is shorter than one " +
                    std::to_string(nperseg) + "-sample window");
  }
  const auto overlap = static_cast<std::size_t>(std::floor(static_cast<double>(nperseg) * overlap_frac));
  const std::size_t hop = std::max<std::size_t>(1, nperseg - overlap);

  std::vector<double> window(nperseg);
  double window_energy = 0.0;
  for (std::size_t i = 0; i < nperseg; ++i) {
    window[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(nperseg - 1));
    window_energy += window[i] * window[i];
  }

  const std::size_t nfreq = nperseg / 2 + 1;
  std::vector<double> acc(nfreq, 0.0);
  std::size_t segments = 0;
  std::vector<fft::cplx> buf(nperseg);
  for (std::size_t start = 0; start + nperseg <= signal.size(); start += hop) {
    double mean = 0.0;
    for (std::size_t i = 0; i < nperseg; ++i) mean += signal[start + i];
    mean /= static_cast<double>(nperseg);
    for (std::size_t i = 0; i < nperseg; ++i) buf[i] = {(signal[start + i] - mean) * window[i], 0.0};
    const auto spec = fft::forward(buf);
    for (std::size_t k = 0; k < nfreq; ++k) acc[k] += std::norm(spec[k]);
    ++segments;
  }

  PsdEstimate psd;
  psd.window_s = window_s;
  psd.overlap_frac = overlap_frac;
  psd.freqs_hz.resize(nfreq);
  psd.power.resize(nfreq);
  const double scale = 1.0 / (fs * window_energy * static_cast<double>(segments));
  for (std::size_t k = 0; k < nfreq; ++k) {
    psd.freqs_hz[k] = static_cast<double>(k) * fs / static_cast<double>(nperseg);
    const bool unpaired = k == 0 || (nperseg % 2 == 0 && k == nperseg / 2);
    psd.power[k] = acc[k] * scale * (unpaired ? 1.0 : 2.0);
  }
  return psd;
}

std::vector<FrequencyBand> default_psd_bands() {
  return {{150, 250}, {250, 500}, {500, 750}, {750, 1000}, {1000, 1250}, {1250, 1500}, {1500, 1750}, {1750, 2000}};
}

double integrate_psd(const PsdEstimate& psd, FrequencyBand band) {
  const auto& f = psd.freqs_hz;
  const auto& p = psd.power;
  if (f.size() < 2 || f.size() != p.size()) {
    throw Error(ErrorKind::validation, kModule, "band_power", "malformed PSD estimate");
  }
  if (!(band.low_hz < band.high_hz) || band.low_hz < f.front() || band.high_hz > f.back() * (1.0 + 1e-12)) {
    throw Error(ErrorKind::range, kModule, "band_power",
                "band [" + std::to_string(band.low_hz) + ", " + std::to_string(band.high_hz) +
                    "] Hz outside the PSD range [" + std::to_string(f.front()) + ", " + std::to_string(f.back()) + "]");
  }
  const double hi_edge = std::min(band.high_hz, f.back());
  const double df = f[1] - f[0];

  auto value_at = [&](double x) {
    auto i = static_cast<std::size_t>(std::floor((x - f.front()) / df));
    if (i >= f.size() - 1) return p.back();
    const double t = (x - f[i]) / df;
    return p[i] + t * (p[i + 1] - p[i]);
  };

  // Sum trapezoids over [low, hi] with interpolated end points.
  double total = 0.0;
  double x0 = band.low_hz;
  double y0 = value_at(x0);
  auto i = static_cast<std::size_t>(std::floor((x0 - f.front()) / df)) + 1;
  for (; i < f.size() && f[i] < hi_edge; ++i) {
    if (f[i] <= x0) continue;
    total += 0.5 * (y0 + p[i]) * (f[i] - x0);
    x0 = f[i];
    y0 = p[i];
  }
  total += 0.5 * (y0 + value_at(hi_edge)) * (hi_edge - x0);
  return total;
}

std::vector<BandPowerRow> band_power(const PsdEstimate& psd, std::span<const FrequencyBand> bands) {
  std::vector<BandPowerRow> rows;
  double sum = 0.0;
  for (const auto& b : bands) {
    rows.push_back({b, integrate_psd(psd, b), 0.0});
    sum += rows.back().absolute_power;
  }
  for (auto& r : rows) r.normalized_power_pct = sum > 0.0 ? 100.0 * r.absolute_power / sum : 0.0;
  return rows;
}

SegmentBandScore segment_band_score(const PsdEstimate& psd, FrequencyBand score_band,
                                    std::span<const FrequencyBand> reference_bands) {
  double reference = 0.0;
  for (const auto& b : reference_bands) reference += integrate_psd(psd, b);
  const double absolute = integrate_psd(psd, score_band);
  return {absolute, reference > 0.0 ? 100.0 * absolute / reference : 0.0};
}

PsdAucResult psd_auc_comparison(std::span<const SegmentBandScore> negatives,
                                std::span<const SegmentBandScore> positives) {
  if (negatives.empty() || positives.empty()) {
    throw Error(ErrorKind::degenerate, kModule, "psd_auc_comparison", "need at least one segment per class");
  }
  LabeledScores absolute, normalized;
  for (const auto& s : negatives) {
    absolute.negatives.push_back(s.absolute);
    normalized.negatives.push_back(s.normalized_pct);
  }
  for (const auto& s : positives) {
    absolute.positives.push_back(s.absolute);
    normalized.positives.push_back(s.normalized_pct);
  }
  return {auc(roc(absolute)), auc(roc(normalized))};
}

}  // namespace sknaflow
