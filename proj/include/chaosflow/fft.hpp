#pragma once

// Thin owning wrapper over FFTW plans for in-place complex transforms.
// Unnormalized in both directions, FFTW sign conventions:
// forward  X_k = Σ x_j e^{-2πi jk/n},  backward x_j = Σ X_k e^{+2πi jk/n}.

#include <complex>
#include <memory>
#include <vector>

namespace chaosflow {

using cplx = std::complex<double>;

class FftPlan {
 public:
  /// 1D transform of length n, or 2D (rows × cols, row-major) when cols > 0.
  explicit FftPlan(std::size_t n, std::size_t cols = 0);
  ~FftPlan();
  FftPlan(FftPlan&&) noexcept;
  FftPlan& operator=(FftPlan&&) noexcept;
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  std::size_t size() const;
  /// Work buffer the plans were created on; transforms run in place on it.
  cplx* data();
  void forward();
  void backward();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace chaosflow
