#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace sknaflow::fft {

using cplx = std::complex<double>;

// Smallest n' >= n whose only prime factors are 2, 3, 5 and 7.
std::size_t next_fast_size(std::size_t n);

std::vector<cplx> forward(std::span<const cplx> input);
// Normalized by 1/n, so inverse(forward(x)) == x.
std::vector<cplx> inverse(std::span<const cplx> input);

// Linear convolution against a fixed real tap set via one FFT pair per call.
// Plans are built once at construction; convolve() is safe to call from
// several threads at once and its result does not depend on which thread runs it.
class FirConvolver {
 public:
  FirConvolver(std::span<const double> taps, std::size_t input_length);
  ~FirConvolver();
  FirConvolver(const FirConvolver&) = delete;
  FirConvolver& operator=(const FirConvolver&) = delete;

  std::size_t input_length() const noexcept { return input_length_; }
  std::size_t tap_count() const noexcept { return tap_count_; }

  // Full convolution, length input_length() + tap_count() - 1.
  std::vector<cplx> convolve(std::span<const cplx> input) const;
  std::vector<double> convolve(std::span<const double> input) const;

 private:
  struct Plans;
  std::size_t input_length_;
  std::size_t tap_count_;
  std::size_t fft_size_;
  std::vector<cplx> taps_spectrum_;
  std::unique_ptr<Plans> plans_;
};

}  // namespace sknaflow::fft
