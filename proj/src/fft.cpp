#include "chaosflow/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace chaosflow {

namespace {
// Planner calls are not thread-safe in FFTW; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct FftPlan::Impl {
  std::size_t total = 0;
  fftw_complex* buf = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
    if (buf) fftw_free(buf);
  }
};

FftPlan::FftPlan(std::size_t n, std::size_t cols) : impl_(std::make_unique<Impl>()) {
  if (n == 0) throw std::invalid_argument("FFT length must be positive");
  impl_->total = cols > 0 ? n * cols : n;
  std::lock_guard lock(planner_mutex());
  impl_->buf = fftw_alloc_complex(impl_->total);
  if (!impl_->buf) throw std::bad_alloc();
  const int ni = static_cast<int>(n), nc = static_cast<int>(cols);
  if (cols > 0) {
    impl_->fwd = fftw_plan_dft_2d(ni, nc, impl_->buf, impl_->buf, FFTW_FORWARD, FFTW_ESTIMATE);
    impl_->bwd = fftw_plan_dft_2d(ni, nc, impl_->buf, impl_->buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  } else {
    impl_->fwd = fftw_plan_dft_1d(ni, impl_->buf, impl_->buf, FFTW_FORWARD, FFTW_ESTIMATE);
    impl_->bwd = fftw_plan_dft_1d(ni, impl_->buf, impl_->buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  if (!impl_->fwd || !impl_->bwd) throw std::runtime_error("FFTW planning failed");
}

FftPlan::~FftPlan() = default;
FftPlan::FftPlan(FftPlan&&) noexcept = default;
FftPlan& FftPlan::operator=(FftPlan&&) noexcept = default;

std::size_t FftPlan::size() const { return impl_->total; }
cplx* FftPlan::data() { return reinterpret_cast<cplx*>(impl_->buf); }
void FftPlan::forward() { fftw_execute(impl_->fwd); }
void FftPlan::backward() { fftw_execute(impl_->bwd); }

}  // namespace chaosflow
