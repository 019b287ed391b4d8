#include <doctest.h>

#include <cmath>
#include <numbers>

#include "chaosflow/fft.hpp"

using namespace chaosflow;

TEST_CASE("1D transform against a direct sum") {
  const std::size_t n = 12;
  FftPlan plan(n);
  std::vector<cplx> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = cplx(std::sin(0.7 * i), std::cos(1.3 * i * i));
  std::copy(x.begin(), x.end(), plan.data());
  plan.forward();
  for (std::size_t k = 0; k < n; ++k) {
    cplx s{};
    for (std::size_t j = 0; j < n; ++j) s += x[j] * std::polar(1.0, -2 * std::numbers::pi * double(j * k) / n);
    CHECK(std::abs(plan.data()[k] - s) < 1e-12);
  }
  plan.backward();
  for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(plan.data()[i] / double(n) - x[i]) < 1e-13);
}

TEST_CASE("2D transform against a direct sum") {
  const std::size_t r = 5, c = 6;
  FftPlan plan(r, c);
  for (std::size_t i = 0; i < r * c; ++i) plan.data()[i] = cplx(double(i % 7), -double(i % 3));
  std::vector<cplx> x(plan.data(), plan.data() + r * c);
  plan.backward();
  for (std::size_t a = 0; a < r; ++a) {
    for (std::size_t b = 0; b < c; ++b) {
      cplx s{};
      for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < c; ++j) {
          s += x[i * c + j] * std::polar(1.0, 2 * std::numbers::pi * (double(i * a) / r + double(j * b) / c));
        }
      }
      CHECK(std::abs(plan.data()[a * c + b] - s) < 1e-11);
    }
  }
}
