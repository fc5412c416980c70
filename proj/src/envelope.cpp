#include "sknaflow/envelope.hpp"

#include <cmath>
#include <string>

#include "sknaflow/error.hpp"
#include "sknaflow/fft.hpp"

namespace sknaflow {

namespace {

constexpr const char* kModule = "envelope";

}  // namespace

AnalyticSignal hilbert_analytic(std::span<const double> signal) {
  const std::size_t n = signal.size();
  if (n < 8) {
    throw Error(ErrorKind::length, kModule, "hilbert_analytic", "need at least 8 samples, got " + std::to_string(n));
  }
  std::vector<fft::cplx> buf(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(signal[i])) {
      throw Error(ErrorKind::data, kModule, "hilbert_analytic", "non-finite sample at index " + std::to_string(i));
    }
    buf[i] = {signal[i], 0.0};
  }

  auto spec = fft::forward(buf);
  const std::size_t half = n / 2;
  for (std::size_t k = 1; k < n; ++k) {
    if (k < half || (k == half && n % 2 == 1)) spec[k] *= 2.0;
    else if (k > half) spec[k] = 0.0;
  }
  const auto z = fft::inverse(spec);

  AnalyticSignal out;
  out.real_part.assign(signal.begin(), signal.end());
  out.imag_part.resize(n);
  out.amplitude.resize(n);
  out.phase.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = out.real_part[i];
    const double y = z[i].imag();
    out.imag_part[i] = y;
    out.amplitude[i] = std::sqrt(x * x + y * y);
    out.phase[i] = std::atan2(y, x);
  }
  return out;
}

std::vector<double> unit_variance_normalize(std::span<const double> signal) {
  if (signal.empty()) throw Error(ErrorKind::degenerate, kModule, "unit_variance_normalize", "empty signal");
  const double n = static_cast<double>(signal.size());
  double mean = 0.0;
  for (double v : signal) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : signal) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / n);
  if (!(sd > 0.0) || !std::isfinite(sd)) {
    throw Error(ErrorKind::degenerate, kModule, "unit_variance_normalize", "signal has zero variance");
  }
  std::vector<double> out(signal.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (signal[i] - mean) / sd;
  return out;
}

}  // namespace sknaflow
