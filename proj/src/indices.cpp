#include "sknaflow/indices.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sknaflow/envelope.hpp"
#include "sknaflow/error.hpp"
#include "sknaflow/log.hpp"
#include "sknaflow/metrics.hpp"
#include "sknaflow/parallel.hpp"

namespace sknaflow {

namespace {

constexpr const char* kModule = "indices";

std::string describe(const SegmentAnnotation& s, std::size_t index) {
  return "segment " + std::to_string(index) + " (" + std::string(to_string(s.label)) + " " +
         std::string(to_string(s.condition)) + " " + std::to_string(s.start_s) + "-" + std::to_string(s.end_s) + " s)";
}

IndexSeries finish_tvskna(std::vector<double> summed, const BandSelection& selection, const BandSelection& snapped,
                          double fs, double smoothing_s) {
  const auto analytic = hilbert_analytic(summed);
  IndexSeries series;
  series.method = IndexMethod::tvskna;
  series.selection = selection.name;
  series.band_low_hz = snapped.low_hz;
  series.band_high_hz = snapped.high_hz;
  series.fs = fs;
  series.values = moving_average(analytic.amplitude, fs, smoothing_s);
  return series;
}

std::vector<double> normalized(std::vector<double> x, const std::string& selection) {
  try {
    return unit_variance_normalize(x);
  } catch (const Error& e) {
    throw Error(ErrorKind::degenerate, kModule, "compute_tvskna", "selection '" + selection + "': " + e.detail());
  }
}

}  // namespace

std::string_view to_string(IndexMethod method) { return method == IndexMethod::tvskna ? "tvskna" : "iskna"; }

std::vector<BandSelection> BandSelection::tvskna_presets() {
  return {{"TVSKNA1", 160.0, 1120.0}, {"TVSKNA2", 320.0, 1120.0}, {"TVSKNA3", 480.0, 1120.0}};
}

BandSelection snap_to_grid(const BandSelection& selection, double band_width_hz, std::size_t n_components) {
  const double top = band_width_hz * static_cast<double>(n_components);
  auto snap = [&](double f) { return std::clamp(std::round(f / band_width_hz) * band_width_hz, 0.0, top); };
  BandSelection out = selection;
  out.low_hz = snap(selection.low_hz);
  out.high_hz = snap(selection.high_hz);
  if (!(out.low_hz < out.high_hz)) {
    throw Error(ErrorKind::parameter, kModule, "compute_tvskna",
                "selection '" + selection.name + "' covers no complete band after snapping to the " +
                    std::to_string(band_width_hz) + " Hz grid");
  }
  if (out.low_hz != selection.low_hz || out.high_hz != selection.high_hz) {
    log::warn("selection '" + selection.name + "' snapped from " + std::to_string(selection.low_hz) + "-" +
              std::to_string(selection.high_hz) + " Hz to " + std::to_string(out.low_hz) + "-" +
              std::to_string(out.high_hz) + " Hz");
  }
  return out;
}

std::vector<double> preprocess(const Recording& recording, std::string_view channel, const NotchList& notches,
                               double target_fs) {
  const auto& ch = recording.channel(channel);
  const auto resampled = resample(ch.samples, recording.sample_rate_hz, target_fs);
  return apply_notch_bank(resampled, target_fs, notches);
}

IndexSeries compute_tvskna(const Decomposition& decomposition, const BandSelection& selection,
                           const TvsknaOptions& options) {
  const auto& dec = options.decomposition;
  const BandSelection snapped = snap_to_grid(selection, dec.band_width_hz, dec.n_components);

  std::vector<double> summed;
  if (options.normalization == NormalizationMode::summed) {
    summed = normalized(decomposition.sum_reconstructed(snapped.band()), selection.name);
  } else {
    summed.assign(decomposition.length(), 0.0);
    for (const auto& c : decomposition.components) {
      if (!snapped.band().contains(c.band)) continue;
      const auto z = normalized(c.reconstructed, selection.name);
      for (std::size_t i = 0; i < z.size(); ++i) summed[i] += z[i];
    }
  }
  return finish_tvskna(std::move(summed), selection, snapped, decomposition.fs, options.smoothing_s);
}

std::vector<IndexSeries> compute_tvskna_set(std::span<const double> preprocessed, double fs,
                                            std::span<const BandSelection> selections,
                                            const TvsknaOptions& options) {
  const auto& dec = options.decomposition;
  std::vector<BandSelection> snapped;
  for (const auto& sel : selections) snapped.push_back(snap_to_grid(sel, dec.band_width_hz, dec.n_components));

  const Decomposer decomposer(preprocessed, fs, dec);
  const std::size_t n = decomposer.length();
  std::vector<std::vector<double>> sums(selections.size(), std::vector<double>(n, 0.0));
  const std::size_t batch = std::max<std::size_t>(1, dec.workers);

  for (std::size_t first = 0; first < decomposer.size(); first += batch) {
    const std::size_t count = std::min(batch, decomposer.size() - first);
    std::vector<std::vector<double>> parts(count);
    parallel_for(count, dec.workers, [&](std::size_t j) {
      const std::size_t k = first + j;
      bool used = false;
      for (const auto& s : snapped) used = used || s.band().contains(decomposer.band(k));
      if (!used) return;
      auto c = decomposer.component(k);
      parts[j] = options.normalization == NormalizationMode::per_component
                     ? normalized(std::move(c.reconstructed), "component " + std::to_string(k))
                     : std::move(c.reconstructed);
    });
    for (std::size_t j = 0; j < count; ++j) {
      if (parts[j].empty()) continue;
      for (std::size_t s = 0; s < snapped.size(); ++s) {
        if (!snapped[s].band().contains(decomposer.band(first + j))) continue;
        for (std::size_t i = 0; i < n; ++i) sums[s][i] += parts[j][i];
      }
    }
  }

  std::vector<IndexSeries> out(selections.size());
  parallel_for(selections.size(), dec.workers, [&](std::size_t s) {
    auto summed = options.normalization == NormalizationMode::summed ? normalized(std::move(sums[s]), selections[s].name)
                                                                     : std::move(sums[s]);
    out[s] = finish_tvskna(std::move(summed), selections[s], snapped[s], fs, options.smoothing_s);
  });
  return out;
}

IndexSeries compute_tvskna(std::span<const double> preprocessed, double fs, const BandSelection& selection,
                           const TvsknaOptions& options) {
  return compute_tvskna(decompose(preprocessed, fs, options.decomposition), selection, options);
}

IndexSeries compute_iskna(std::span<const double> preprocessed, double fs, FrequencyBand band, double smoothing_s) {
  const auto taps = design_fir(FilterSpec::bandpass(band.low_hz, band.high_hz), fs);
  const auto filtered = apply_filter(preprocessed, taps, true);
  IndexSeries series;
  series.method = IndexMethod::iskna;
  series.selection = "iSKNA";
  series.band_low_hz = band.low_hz;
  series.band_high_hz = band.high_hz;
  series.fs = fs;
  series.values = moving_average(rectify(filtered), fs, smoothing_s);
  return series;
}

double SegmentWindows::window_for(Condition condition) const noexcept {
  switch (condition) {
    case Condition::VM: return vm_s;
    case Condition::ST: return st_s;
    case Condition::TG: return tg_s;
  }
  return tg_s;
}

SampleWindow segment_window(const SegmentAnnotation& segment, std::size_t segment_index, double fs,
                            std::size_t series_length, const SegmentWindows& windows, const char* operation) {
  const double window = windows.window_for(segment.condition);
  constexpr double kSlack = 1e-9;
  if (segment.duration_s() - windows.offset_s < window - kSlack) {
    throw Error(ErrorKind::window, kModule, operation,
                describe(segment, segment_index) + " is shorter than its " + std::to_string(window) + " s window");
  }
  const auto first = static_cast<std::size_t>(std::llround((segment.start_s + windows.offset_s) * fs));
  const auto count = static_cast<std::size_t>(std::llround(window * fs));
  if (count == 0 || first + count > series_length) {
    throw Error(ErrorKind::window, kModule, operation,
                describe(segment, segment_index) + " window runs past the end of the series");
  }
  return {first, count};
}

std::vector<SegmentIndexSet> extract_segment_indices(const IndexSeries& series,
                                                     std::span<const SegmentAnnotation> segments,
                                                     const SegmentWindows& windows) {
  std::vector<SegmentIndexSet> out;
  out.reserve(segments.size());
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto w = segment_window(segments[i], i, series.fs, series.values.size(), windows, "extract_segment_indices");
    const std::span<const double> slice(series.values.data() + w.first, w.count);
    SegmentIndexSet set;
    set.segment_index = i;
    set.segment = segments[i];
    set.max = *std::max_element(slice.begin(), slice.end());
    set.mean = mean_of(slice);
    set.sd = population_sd(slice);
    out.push_back(set);
  }
  return out;
}

}  // namespace sknaflow
