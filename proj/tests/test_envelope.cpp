#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include "sknaflow/envelope.hpp"
#include "sknaflow/error.hpp"
#include "support.hpp"

using Catch::Approx;
using namespace sknaflow;
using testing::kTwoPi;

TEST_CASE("Hilbert amplitude recovers an AM envelope", "[envelope]") {
  const double fs = 4000.0;
  const std::size_t n = 40000;
  std::vector<double> x(n), env(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    env[i] = 1.0 + 0.5 * std::cos(kTwoPi * 2.0 * t);
    x[i] = env[i] * std::cos(kTwoPi * 200.0 * t);
  }
  const auto a = hilbert_analytic(x);
  REQUIRE(a.amplitude.size() == n);
  REQUIRE(testing::relative_rms_error(testing::interior(a.amplitude, 4000), testing::interior(env, 4000)) <= 0.02);
  REQUIRE(a.real_part == x);
}

TEST_CASE("Hilbert transform of a cosine is a sine", "[envelope]") {
  const double fs = 1000.0;
  const std::size_t n = 1000;  // whole number of cycles
  const auto x = testing::tone(n, fs, 50.0);
  const auto a = hilbert_analytic(x);
  for (std::size_t i = 0; i < n; ++i) {
    REQUIRE(a.imag_part[i] == Approx(std::sin(kTwoPi * 50.0 * static_cast<double>(i) / fs)).margin(1e-9));
    REQUIRE(a.amplitude[i] == Approx(1.0).margin(1e-9));
  }
}

TEST_CASE("Hilbert input checks", "[envelope]") {
  REQUIRE_THROWS_AS(hilbert_analytic(std::vector<double>(4, 1.0)), Error);
  std::vector<double> bad(64, 0.0);
  bad[10] = std::numeric_limits<double>::quiet_NaN();
  try {
    hilbert_analytic(bad);
    FAIL("expected a data error");
  } catch (const Error& e) {
    REQUIRE(e.kind() == ErrorKind::data);
  }
}

TEST_CASE("unit variance normalisation", "[envelope]") {
  const auto z = unit_variance_normalize(std::vector<double>{1.0, 3.0, 5.0, 7.0});
  double m = 0.0, s = 0.0;
  for (double v : z) m += v;
  m /= 4.0;
  for (double v : z) s += (v - m) * (v - m);
  REQUIRE(m == Approx(0.0).margin(1e-12));
  REQUIRE(s / 4.0 == Approx(1.0));
  REQUIRE_THROWS_AS(unit_variance_normalize(std::vector<double>(10, 2.0)), Error);
}
