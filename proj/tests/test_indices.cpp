#include <catch_amalgamated.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "sknaflow/error.hpp"
#include "sknaflow/filters.hpp"
#include "sknaflow/indices.hpp"
#include "support.hpp"

using Catch::Approx;
using namespace sknaflow;

TEST_CASE("TVSKNA presets sit on the 160 Hz grid", "[indices]") {
  const auto p = BandSelection::tvskna_presets();
  REQUIRE(p.size() == 3);
  REQUIRE(p[0].name == "TVSKNA1");
  REQUIRE(p[0].band() == FrequencyBand{160.0, 1120.0});
  REQUIRE(p[1].band() == FrequencyBand{320.0, 1120.0});
  REQUIRE(p[2].band() == FrequencyBand{480.0, 1120.0});
  for (const auto& s : p) REQUIRE(snap_to_grid(s, 160.0, 12).band() == s.band());
}

TEST_CASE("off-grid selections are snapped", "[indices]") {
  const auto s = snap_to_grid({"x", 150.0, 1000.0}, 160.0, 12);
  REQUIRE(s.low_hz == 160.0);
  REQUIRE(s.high_hz == 960.0);
  REQUIRE(snap_to_grid({"top", 1800.0, 5000.0}, 160.0, 12).high_hz == 1920.0);
  REQUIRE_THROWS_AS(snap_to_grid({"narrow", 170.0, 200.0}, 160.0, 12), Error);
}

TEST_CASE("TVSKNA responds to energy inside the selection only", "[indices][tvskna]") {
  const double fs = 4000.0;
  const std::size_t n = 40000;
  auto x = testing::white_noise(n, 4);
  // Add a strong 700 Hz tone during the second half.
  for (std::size_t i = n / 2; i < n; ++i) x[i] += 5.0 * std::cos(testing::kTwoPi * 700.0 * static_cast<double>(i) / fs);

  const auto presets = BandSelection::tvskna_presets();
  const auto t1 = compute_tvskna(x, fs, presets[0]);
  REQUIRE(t1.values.size() == n);
  REQUIRE(t1.fs == fs);
  REQUIRE(t1.method == IndexMethod::tvskna);
  const double first = testing::rms(std::span<const double>(t1.values).subspan(2000, 10000));
  const double second = testing::rms(std::span<const double>(t1.values).subspan(n / 2 + 8000, 10000));
  REQUIRE(second > 2.0 * first);

  // Tone outside 160-1120 Hz leaves the index unchanged in distribution.
  auto y = testing::white_noise(n, 4);
  for (std::size_t i = n / 2; i < n; ++i) y[i] += 5.0 * std::cos(testing::kTwoPi * 1700.0 * static_cast<double>(i) / fs);
  const auto t_out = compute_tvskna(y, fs, presets[0]);
  const double a = testing::rms(std::span<const double>(t_out.values).subspan(2000, 10000));
  const double b = testing::rms(std::span<const double>(t_out.values).subspan(n / 2 + 8000, 10000));
  REQUIRE(b / a == Approx(1.0).margin(0.25));
}

TEST_CASE("the streaming selection set matches one-at-a-time computation", "[indices][tvskna]") {
  const double fs = 4000.0;
  const auto x = testing::white_noise(24000, 9);
  const auto presets = BandSelection::tvskna_presets();
  for (auto mode : {NormalizationMode::summed, NormalizationMode::per_component}) {
    TvsknaOptions opts;
    opts.normalization = mode;
    const auto dec = decompose(x, fs, opts.decomposition);
    auto many = opts;
    many.decomposition.workers = 3;
    const auto set1 = compute_tvskna_set(x, fs, presets, opts);
    const auto set3 = compute_tvskna_set(x, fs, presets, many);
    for (std::size_t s = 0; s < presets.size(); ++s) {
      REQUIRE(set1[s].values == set3[s].values);
      const auto single = compute_tvskna(dec, presets[s], opts);
      REQUIRE(single.selection == set1[s].selection);
      for (std::size_t i = 0; i < single.values.size(); i += 97) {
        REQUIRE(set1[s].values[i] == Approx(single.values[i]).margin(1e-9));
      }
    }
  }
}

TEST_CASE("iSKNA is the smoothed rectified 500-1000 Hz band", "[indices][iskna]") {
  const double fs = 4000.0;
  const auto x = testing::tone(40000, fs, 750.0, 2.0);
  const auto s = compute_iskna(x, fs);
  REQUIRE(s.method == IndexMethod::iskna);
  REQUIRE(s.band_low_hz == 500.0);
  // Mean of |A cos| is 2A/pi.
  for (double v : testing::interior(s.values, 4000)) REQUIRE(v == Approx(4.0 / std::numbers::pi).epsilon(0.02));
  const auto off = compute_iskna(testing::tone(40000, fs, 200.0, 2.0), fs);
  for (double v : testing::interior(off.values, 4000)) REQUIRE(v < 0.02);
}

TEST_CASE("segment statistics use the condition window", "[indices][segments]") {
  IndexSeries series;
  series.fs = 10.0;
  series.values.resize(1000);
  for (std::size_t i = 0; i < series.values.size(); ++i) series.values[i] = static_cast<double>(i % 100);

  const std::vector<SegmentAnnotation> segments{
      {SegmentLabel::baseline, Condition::TG, 0.0, 20.0, std::nullopt},
      {SegmentLabel::task, Condition::TG, 20.0, 40.0, 6.0},
      {SegmentLabel::baseline, Condition::VM, 40.0, 75.0, std::nullopt}};
  const auto sets = extract_segment_indices(series, segments);
  REQUIRE(sets.size() == 3);
  // TG: first 10 s = samples 0..99 -> values 0..99.
  REQUIRE(sets[0].max == 99.0);
  REQUIRE(sets[0].mean == Approx(49.5));
  REQUIRE(sets[0].sd == Approx(std::sqrt((100.0 * 100.0 - 1.0) / 12.0)));
  REQUIRE(sets[1].mean == Approx(49.5));
  // VM: 30 s from sample 400 -> three full ramps.
  REQUIRE(sets[2].mean == Approx(49.5));
  REQUIRE(sets[2].segment_index == 2);

  SegmentWindows shifted;
  shifted.offset_s = 5.0;
  const auto later = extract_segment_indices(series, std::span(segments).first(1), shifted);
  REQUIRE(later[0].max == 99.0);
  REQUIRE(later[0].mean == Approx(49.5));
}

TEST_CASE("segments shorter than their window are reported by name", "[indices][segments]") {
  IndexSeries series;
  series.fs = 10.0;
  series.values.assign(1000, 1.0);
  const std::vector<SegmentAnnotation> segments{{SegmentLabel::baseline, Condition::ST, 0.0, 60.0, std::nullopt}};
  try {
    extract_segment_indices(series, segments);
    FAIL("expected a window error");
  } catch (const Error& e) {
    REQUIRE(e.kind() == ErrorKind::window);
    REQUIRE(std::string(e.what()).find("segment 0") != std::string::npos);
    REQUIRE(std::string(e.what()).find("ST") != std::string::npos);
  }
}

TEST_CASE("preprocessing resamples to the target rate", "[indices]") {
  Recording rec;
  rec.sample_rate_hz = 10000.0;
  rec.channels.push_back({"ch1", testing::tone(60000, 10000.0, 60.0)});
  const auto y = preprocess(rec, "ch1", NotchList{{{60.0, 30.0}}}, 4000.0);
  REQUIRE(y.size() == 24000);
  REQUIRE(testing::rms(testing::interior(y, 6000)) < 0.01);
  REQUIRE_THROWS_AS(preprocess(rec, "ch9", {}, 4000.0), Error);
}
