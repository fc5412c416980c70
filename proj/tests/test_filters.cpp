#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "sknaflow/error.hpp"
#include "sknaflow/filters.hpp"
#include "support.hpp"

using Catch::Approx;
using namespace sknaflow;
using testing::db;
using testing::interior;
using testing::rms;
using testing::tone;

namespace {

double tone_gain_db(std::span<const double> taps, double f, double fs) {
  const auto x = tone(static_cast<std::size_t>(fs * 4), fs, f);
  const auto y = apply_filter(x, taps, true);
  const std::size_t edge = static_cast<std::size_t>(fs / 2);
  return db(rms(interior(y, edge)) / rms(interior(x, edge)));
}

}  // namespace

TEST_CASE("bandpass 500-1000 Hz passes the centre and rejects outside tones", "[filters][fir]") {
  const double fs = 4000.0;
  const auto taps = design_fir(FilterSpec::bandpass(500.0, 1000.0), fs);
  REQUIRE(taps.size() % 2 == 1);
  REQUIRE(db(fir_gain(taps, 750.0, fs)) >= -1.0);
  REQUIRE(db(fir_gain(taps, 250.0, fs)) <= -40.0);
  REQUIRE(db(fir_gain(taps, 1500.0, fs)) <= -40.0);

  REQUIRE(tone_gain_db(taps, 750.0, fs) >= -1.0);
  REQUIRE(tone_gain_db(taps, 250.0, fs) <= -40.0);
  REQUIRE(tone_gain_db(taps, 1500.0, fs) <= -40.0);
}

TEST_CASE("lowpass taps sum to one and highpass removes DC exactly", "[filters][fir]") {
  const double fs = 4000.0;
  const auto lp = design_fir(FilterSpec::lowpass(80.0), fs);
  REQUIRE(std::accumulate(lp.begin(), lp.end(), 0.0) == Approx(1.0).margin(1e-12));
  const auto hp = design_fir(FilterSpec::highpass(150.0), fs);
  REQUIRE(std::abs(std::accumulate(hp.begin(), hp.end(), 0.0)) <= 1e-12);
  REQUIRE(db(fir_gain(hp, 1000.0, fs)) == Approx(0.0).margin(0.1));
}

TEST_CASE("default transition and tap count", "[filters][fir]") {
  const double fs = 4000.0;
  // 20% of min(80, 1920) = 16 Hz; ceil(3.3 * 4000 / 16) = 825, already odd.
  REQUIRE(default_transition_hz(FilterSpec::lowpass(80.0), fs) == Approx(16.0));
  REQUIRE(design_fir(FilterSpec::lowpass(80.0), fs).size() == 825);
  REQUIRE(hamming_taps_for(10.0, 1000.0) == 331);
  REQUIRE(design_fir(FilterSpec::lowpass(80.0, 100.0), fs).size() == 101);
  REQUIRE(design_fir(FilterSpec::lowpass(80.0, 101.0), fs).size() == 103);
}

TEST_CASE("filter specs outside the valid range are rejected", "[filters][fir]") {
  REQUIRE_THROWS_AS(design_fir(FilterSpec::lowpass(2500.0), 4000.0), Error);
  REQUIRE_THROWS_AS(design_fir(FilterSpec::bandpass(1000.0, 500.0), 4000.0), Error);
  FilterSpec notch;
  notch.kind = FilterKind::notch;
  notch.cutoffs_hz = {60.0};
  REQUIRE_THROWS_AS(design_fir(notch, 4000.0), Error);
}

TEST_CASE("zero-phase filtering keeps a pulse centred", "[filters][fir]") {
  const double fs = 1000.0;
  std::vector<double> x(2000, 0.0);
  x[1000] = 1.0;
  const auto taps = design_fir(FilterSpec::lowpass(50.0), fs);
  const auto y = apply_filter(x, taps, true);
  const auto peak = std::max_element(y.begin(), y.end()) - y.begin();
  REQUIRE(peak == 1000);
  REQUIRE(y[990] == Approx(y[1010]).margin(1e-12));
}

TEST_CASE("causal filtering delays by the group delay", "[filters][fir]") {
  std::vector<double> x(400, 0.0);
  x[100] = 1.0;
  const auto taps = design_fir(FilterSpec::lowpass(50.0, 20.0), 1000.0);
  const auto y = apply_filter(x, taps, false);
  REQUIRE(std::max_element(y.begin(), y.end()) - y.begin() == 110);
}

TEST_CASE("signals not longer than the filter are rejected", "[filters][fir]") {
  const auto taps = design_fir(FilterSpec::lowpass(80.0), 4000.0);
  const std::vector<double> x(taps.size(), 1.0);
  try {
    apply_filter(x, taps, true);
    FAIL("expected a length error");
  } catch (const Error& e) {
    REQUIRE(e.kind() == ErrorKind::length);
  }
}

TEST_CASE("reflection padding continues linear trends", "[filters]") {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  const auto p = reflect_pad(x, 2);
  REQUIRE(p == std::vector<double>{-1.0, 0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0});
}

TEST_CASE("resampler keeps a 100 Hz tone and rejects 2.2 kHz", "[filters][resample]") {
  const double fs_in = 10000.0, fs_out = 4000.0;
  const std::size_t n = 50000;
  const auto r = rational_ratio(fs_in, fs_out);
  REQUIRE(r.up == 2);
  REQUIRE(r.down == 5);

  const auto low = resample(tone(n, fs_in, 100.0), fs_in, fs_out);
  REQUIRE(low.size() == 20000);
  const auto want = tone(low.size(), fs_out, 100.0);
  const auto mid = interior(low, 2000);
  REQUIRE(rms(mid) / rms(interior(want, 2000)) == Approx(1.0).margin(0.01));
  REQUIRE(testing::relative_rms_error(mid, interior(want, 2000)) <= 0.01);

  const auto high = resample(tone(n, fs_in, 2200.0), fs_in, fs_out);
  REQUIRE(db(rms(interior(high, 2000)) / rms(interior(tone(n, fs_in, 2200.0), 5000))) <= -60.0);
}

TEST_CASE("resampler preserves DC and handles identity and upsampling", "[filters][resample]") {
  const std::vector<double> dc(1001, 3.5);
  for (double v : resample(dc, 10000.0, 4000.0)) REQUIRE(v == Approx(3.5).margin(1e-12));
  const auto same = resample(dc, 4000.0, 4000.0);
  REQUIRE(same == dc);
  const auto up = resample(tone(4000, 2000.0, 50.0), 2000.0, 4000.0);
  REQUIRE(up.size() == 8000);
  REQUIRE(testing::relative_rms_error(interior(up, 800), interior(tone(8000, 4000.0, 50.0), 800)) <= 0.01);
}

TEST_CASE("irrational resampling ratios are rejected", "[filters][resample]") {
  try {
    rational_ratio(10000.0, 4000.0 * std::numbers::pi);
    FAIL("expected unsupported_ratio");
  } catch (const Error& e) {
    REQUIRE(e.kind() == ErrorKind::unsupported_ratio);
  }
}

TEST_CASE("notch bank removes the targeted tones by at least 40 dB", "[filters][notch]") {
  const double fs = 4000.0;
  const std::size_t n = 40000;
  const NotchList notches{{{60.0, 30.0}, {180.0, 30.0}, {733.0, 20.0}}};
  for (double f : {60.0, 180.0, 733.0}) {
    const auto x = tone(n, fs, f, 1.0, 0.3);
    const auto y = apply_notch_bank(x, fs, notches);
    INFO("tone " << f << " Hz");
    REQUIRE(db(rms(interior(y, 4000)) / rms(interior(x, 4000))) <= -40.0);
  }
  const auto pass = tone(n, fs, 400.0);
  const auto y = apply_notch_bank(pass, fs, notches);
  REQUIRE(db(rms(interior(y, 4000)) / rms(interior(pass, 4000))) == Approx(0.0).margin(0.1));
}

TEST_CASE("single 300 Hz notch", "[filters][notch]") {
  const double fs = 4000.0;
  const std::size_t n = 40000;
  const NotchList one{{{300.0, 30.0}}};
  const auto hit = tone(n, fs, 300.0);
  REQUIRE(rms(interior(apply_notch_bank(hit, fs, one), 4000)) <= 0.01 * rms(interior(hit, 4000)));
  const auto miss = tone(n, fs, 400.0);
  REQUIRE(rms(interior(apply_notch_bank(miss, fs, one), 4000)) / rms(interior(miss, 4000)) == Approx(1.0).margin(0.01));
  // centre +- 4 half-bandwidths = 300 +- 20 Hz.
  for (double f : {280.0, 320.0}) {
    const auto x = tone(n, fs, f);
    REQUIRE(std::abs(db(rms(interior(apply_notch_bank(x, fs, one), 4000)) / rms(interior(x, 4000)))) <= 1.0);
  }
  const auto noise = testing::white_noise(5000, 2);
  REQUIRE(apply_notch_bank(noise, fs, {}) == noise);
}

TEST_CASE("notch banks with disjoint centres commute", "[filters][notch]") {
  const double fs = 4000.0;
  const auto x = testing::white_noise(40000, 1);
  const NotchList a{{{60.0, 30.0}, {500.0, 10.0}}};
  const NotchList b{{{180.0, 30.0}, {1234.0, 20.0}}};
  const auto ab = apply_notch_bank(apply_notch_bank(x, fs, a), fs, b);
  const auto ba = apply_notch_bank(apply_notch_bank(x, fs, b), fs, a);
  REQUIRE(testing::relative_rms_error(ab, ba) <= 1e-6);
}

TEST_CASE("notch lists are parsed and validated", "[filters][notch]") {
  const auto list = parse_notch_list("center_hz,q\n60,30\n120,\n");
  REQUIRE(list.entries.size() == 2);
  REQUIRE(list.entries[1].q == 30.0);
  REQUIRE_THROWS_AS(validate(NotchList{{{120.0, 30.0}, {60.0, 30.0}}}, 4000.0), Error);
  REQUIRE_THROWS_AS(validate(NotchList{{{2500.0, 30.0}}}, 4000.0), Error);
  REQUIRE_THROWS_AS(parse_notch_list("freq,q\n60,30\n"), Error);
}

TEST_CASE("moving average is centred and shrinks at the ends", "[filters]") {
  const std::vector<double> x{1, 2, 3, 4, 5, 6, 7};
  // 3-sample window at fs = 1 Hz.
  const auto y = moving_average(x, 1.0, 3.0);
  REQUIRE(y[0] == Approx(1.5));
  REQUIRE(y[3] == Approx(4.0));
  REQUIRE(y[6] == Approx(6.5));
  const std::vector<double> c(50, 2.0);
  for (double v : moving_average(c, 4000.0, 0.1)) REQUIRE(v == Approx(2.0));
}

TEST_CASE("rectify takes absolute values", "[filters]") {
  REQUIRE(rectify(std::vector<double>{-1.5, 0.0, 2.0}) == std::vector<double>{1.5, 0.0, 2.0});
}
