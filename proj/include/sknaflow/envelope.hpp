#pragma once

#include <span>
#include <vector>

namespace sknaflow {

// Z(t) = X'(t) + i Y'(t) = a(t) exp(i theta(t)).
struct AnalyticSignal {
  std::vector<double> real_part;
  std::vector<double> imag_part;  // discrete Hilbert transform of real_part
  std::vector<double> amplitude;
  std::vector<double> phase;
};

// FFT construction: keep DC (and Nyquist for even lengths) as is, double the
// positive bins, zero the negative ones, invert.
AnalyticSignal hilbert_analytic(std::span<const double> signal);

// Mean removal and division by the population (1/N) standard deviation.
std::vector<double> unit_variance_normalize(std::span<const double> signal);

}  // namespace sknaflow
