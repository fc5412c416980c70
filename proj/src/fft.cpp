#include "sknaflow/fft.hpp"

#include <algorithm>
#include <cstring>
#include <mutex>
#include <stdexcept>

#include <fftw3.h>

namespace sknaflow::fft {

namespace {

// FFTW's planner is not reentrant; execution on distinct buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};
using Buffer = std::unique_ptr<fftw_complex[], FftwFree>;

Buffer alloc(std::size_t n) {
  auto* p = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * std::max<std::size_t>(n, 1)));
  if (!p) throw std::bad_alloc();
  return Buffer(p);
}

class Plan {
 public:
  Plan(std::size_t n, int sign) {
    auto in = alloc(n);
    auto out = alloc(n);
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_1d(static_cast<int>(n), in.get(), out.get(), sign, FFTW_ESTIMATE);
    if (!plan_) throw std::runtime_error("fft: plan creation failed");
  }
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;

  // Buffers come from fftw_malloc, so they share the planning alignment.
  void execute(fftw_complex* in, fftw_complex* out) const { fftw_execute_dft(plan_, in, out); }

 private:
  fftw_plan plan_{};
};

void copy_in(std::span<const cplx> src, fftw_complex* dst, std::size_t n) {
  std::memset(dst, 0, sizeof(fftw_complex) * n);
  std::memcpy(dst, src.data(), sizeof(fftw_complex) * std::min(n, src.size()));
}

std::vector<cplx> transform(std::span<const cplx> input, int sign) {
  const std::size_t n = input.size();
  if (n == 0) return {};
  Plan plan(n, sign);
  auto in = alloc(n);
  auto out = alloc(n);
  copy_in(input, in.get(), n);
  plan.execute(in.get(), out.get());
  std::vector<cplx> result(n);
  std::copy_n(reinterpret_cast<const cplx*>(out.get()), n, result.data());
  return result;
}

}  // namespace

std::size_t next_fast_size(std::size_t n) {
  if (n <= 1) return 1;
  for (std::size_t m = n;; ++m) {
    std::size_t r = m;
    for (std::size_t p : {2u, 3u, 5u, 7u}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return m;
  }
}

std::vector<cplx> forward(std::span<const cplx> input) { return transform(input, FFTW_FORWARD); }

std::vector<cplx> inverse(std::span<const cplx> input) {
  auto out = transform(input, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(out.size());
  for (auto& v : out) v *= scale;
  return out;
}

struct FirConvolver::Plans {
  Plans(std::size_t n) : forward(n, FFTW_FORWARD), backward(n, FFTW_BACKWARD) {}
  Plan forward;
  Plan backward;
};

FirConvolver::FirConvolver(std::span<const double> taps, std::size_t input_length)
    : input_length_(input_length), tap_count_(taps.size()) {
  if (taps.empty()) throw std::invalid_argument("FirConvolver: empty tap set");
  fft_size_ = next_fast_size(input_length + taps.size() - 1);
  plans_ = std::make_unique<Plans>(fft_size_);

  auto in = alloc(fft_size_);
  auto out = alloc(fft_size_);
  std::memset(in.get(), 0, sizeof(fftw_complex) * fft_size_);
  for (std::size_t i = 0; i < taps.size(); ++i) in[i][0] = taps[i];
  plans_->forward.execute(in.get(), out.get());
  taps_spectrum_.resize(fft_size_);
  std::copy_n(reinterpret_cast<const cplx*>(out.get()), fft_size_, taps_spectrum_.data());
}

FirConvolver::~FirConvolver() = default;

std::vector<cplx> FirConvolver::convolve(std::span<const cplx> input) const {
  if (input.size() != input_length_) throw std::invalid_argument("FirConvolver: input length mismatch");
  auto a = alloc(fft_size_);
  auto b = alloc(fft_size_);
  copy_in(input, a.get(), fft_size_);
  plans_->forward.execute(a.get(), b.get());
  auto* spec = reinterpret_cast<cplx*>(b.get());
  const double scale = 1.0 / static_cast<double>(fft_size_);
  for (std::size_t i = 0; i < fft_size_; ++i) spec[i] *= taps_spectrum_[i] * scale;
  plans_->backward.execute(b.get(), a.get());

  std::vector<cplx> out(input_length_ + tap_count_ - 1);
  std::copy_n(reinterpret_cast<const cplx*>(a.get()), out.size(), out.data());
  return out;
}

std::vector<double> FirConvolver::convolve(std::span<const double> input) const {
  std::vector<cplx> z(input.begin(), input.end());
  auto full = convolve(std::span<const cplx>(z));
  std::vector<double> out(full.size());
  std::transform(full.begin(), full.end(), out.begin(), [](const cplx& c) { return c.real(); });
  return out;
}

}  // namespace sknaflow::fft
