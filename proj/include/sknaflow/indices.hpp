#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sknaflow/band.hpp"
#include "sknaflow/filters.hpp"
#include "sknaflow/ingest.hpp"
#include "sknaflow/vfcdm.hpp"

namespace sknaflow {

enum class IndexMethod { tvskna, iskna };

std::string_view to_string(IndexMethod method);

struct BandSelection {
  std::string name;
  double low_hz = 0.0;
  double high_hz = 0.0;

  FrequencyBand band() const noexcept { return {low_hz, high_hz}; }

  // TVSKNA1 160-1120 Hz, TVSKNA2 320-1120 Hz, TVSKNA3 480-1120 Hz.
  static std::vector<BandSelection> tvskna_presets();
};

// Rounds both edges to the nearest multiple of `band_width_hz` inside
// [0, n_components * band_width_hz], logging a warning when anything moves.
BandSelection snap_to_grid(const BandSelection& selection, double band_width_hz, std::size_t n_components);

struct IndexSeries {
  IndexMethod method = IndexMethod::tvskna;
  std::string selection;
  double band_low_hz = 0.0;
  double band_high_hz = 0.0;
  std::vector<double> values;
  double fs = 0.0;
  std::string channel_id;
};

enum class NormalizationMode { summed, per_component };

struct TvsknaOptions {
  double smoothing_s = 0.1;
  NormalizationMode normalization = NormalizationMode::summed;
  DecomposeOptions decomposition;
};

// Resample to target_fs, then apply the notch bank. The 150 Hz highpass
// belongs to the PSD path only and is not applied here.
std::vector<double> preprocess(const Recording& recording, std::string_view channel, const NotchList& notches,
                               double target_fs = 4000.0);

// decompose -> sum selected components -> unit variance -> Hilbert
// amplitude -> centred moving average.
IndexSeries compute_tvskna(std::span<const double> preprocessed, double fs, const BandSelection& selection,
                           const TvsknaOptions& options = {});

// Same pipeline on an existing decomposition, so several selections can
// share one decomposition.
IndexSeries compute_tvskna(const Decomposition& decomposition, const BandSelection& selection,
                           const TvsknaOptions& options = {});

// Several selections from one decomposition without holding every component:
// components are produced `decomposition.workers` at a time and accumulated
// in index order, so the output does not depend on the worker count.
std::vector<IndexSeries> compute_tvskna_set(std::span<const double> preprocessed, double fs,
                                            std::span<const BandSelection> selections,
                                            const TvsknaOptions& options = {});

// Zero-phase bandpass -> rectify -> centred moving average.
IndexSeries compute_iskna(std::span<const double> preprocessed, double fs, FrequencyBand band = {500.0, 1000.0},
                          double smoothing_s = 0.1);

struct SegmentWindows {
  double vm_s = 30.0;
  double st_s = 120.0;
  double tg_s = 10.0;
  // Window start relative to the segment start.
  double offset_s = 0.0;

  double window_for(Condition condition) const noexcept;
};

struct SegmentIndexSet {
  std::size_t segment_index = 0;
  SegmentAnnotation segment;
  double max = 0.0;
  double mean = 0.0;
  double sd = 0.0;  // population
};

// Statistics over the first window_for(condition) seconds of each segment.
std::vector<SegmentIndexSet> extract_segment_indices(const IndexSeries& series,
                                                     std::span<const SegmentAnnotation> segments,
                                                     const SegmentWindows& windows = {});

// Sample range [first, first + count) covered by a segment's analysis window.
struct SampleWindow {
  std::size_t first = 0;
  std::size_t count = 0;
};
SampleWindow segment_window(const SegmentAnnotation& segment, std::size_t segment_index, double fs,
                            std::size_t series_length, const SegmentWindows& windows, const char* operation);

}  // namespace sknaflow
