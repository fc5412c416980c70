#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <vector>

namespace testing {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline std::vector<double> white_noise(std::size_t n, std::uint64_t seed, double sigma = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, sigma);
  std::vector<double> x(n);
  for (auto& v : x) v = d(rng);
  return x;
}

inline std::vector<double> tone(std::size_t n, double fs, double f, double amplitude = 1.0, double phase = 0.0) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = amplitude * std::cos(kTwoPi * f * static_cast<double>(i) / fs + phase);
  return x;
}

inline double rms(std::span<const double> x) {
  long double s = 0.0L;
  for (double v : x) s += static_cast<long double>(v) * v;
  return x.empty() ? 0.0 : std::sqrt(static_cast<double>(s / x.size()));
}

// Middle part of a signal, dropping `edge` samples on each side.
inline std::span<const double> interior(std::span<const double> x, std::size_t edge) {
  return x.subspan(edge, x.size() - 2 * edge);
}

inline double relative_rms_error(std::span<const double> got, std::span<const double> want) {
  long double e = 0.0L, r = 0.0L;
  for (std::size_t i = 0; i < got.size(); ++i) {
    const long double d = static_cast<long double>(got[i]) - want[i];
    e += d * d;
    r += static_cast<long double>(want[i]) * want[i];
  }
  return std::sqrt(static_cast<double>(e / r));
}

inline double db(double ratio) { return 20.0 * std::log10(ratio); }

}  // namespace testing
