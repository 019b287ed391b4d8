#include <doctest.h>

#include <cmath>
#include <numbers>

#include "chaosflow/kicked_rotor.hpp"

using namespace chaosflow;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("golden-ratio hbar") {
  CHECK(hbar_from_golden_fraction(0.15) == doctest::Approx(2 * pi * 0.15 / ((std::sqrt(5.0) - 1) / 2)));
  CHECK(kInverseGolden == doctest::Approx((std::sqrt(5.0) - 1) / 2).epsilon(1e-15));
}

TEST_CASE("rotation phases") {
  const auto h = rotation_phases(3, 0.4, false);
  const auto l = rotation_phases(3, 0.4, true);
  for (int m = -3; m <= 3; ++m) {
    CHECK(std::abs(h[m + 3] - std::polar(1.0, -0.2 * m * m)) < 1e-15);
    CHECK(std::abs(l[m + 3] - std::polar(1.0, -0.4 * m * m)) < 1e-15);
  }
}

TEST_CASE("kick against the Bessel expansion") {
  const int L = 30;
  const double k = 2.7;
  KickOperator kick(L, k);
  std::vector<cplx> amp(2 * L + 1, 0.0);
  amp[L] = 1.0;
  amp[L + 2] = cplx(0.0, 1.0);
  const auto in = amp;
  kick.apply(amp.data());
  // e^{-ik cos θ} = Σ_n (-i)^n J_n(k) e^{inθ}
  for (int l = -L; l <= L; ++l) {
    cplx s{};
    for (int m = -L; m <= L; ++m) {
      const int n = l - m;
      const double jn = std::cyl_bessel_j(std::abs(n), k) * ((n < 0 && n % 2) ? -1.0 : 1.0);
      s += std::pow(cplx(0, -1), n) * jn * in[m + L];
    }
    CHECK(std::abs(amp[l + L] - s) < 1e-12);
  }
}

TEST_CASE("one kick from l=0 gives E = K^2/4") {
  const QkrParams p{7.0, 0.9, false};
  const auto psi = floquet_step(RotorWavefunction::basis(120, 0), p);
  CHECK(psi.energy(p.hbar) == doctest::Approx(49.0 / 4).epsilon(1e-10));
  CHECK(psi.norm2() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Floquet matrix columns away from the edge are orthonormal") {
  const int L = 45;
  const auto U = floquet_matrix(L, QkrParams{2.0, 1.0, false});
  // |l| <= 15: J_n(2) is below 1e-20 for n > 28, so nothing reaches the edge
  const auto C = U.middleCols(L - 15, 31);
  CHECK((C.adjoint() * C - ComplexMatrix::Identity(31, 31)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(unitarity_defect(U) > 1e-3);
}

TEST_CASE("quantum resonance and anti-resonance") {
  // hbar = 4π: free rotation is the identity, kicks add coherently.
  const double hbar = 4 * pi, K = 3 * hbar;
  const auto r = evolve(RotorWavefunction::basis(200, 0), QkrParams{K, hbar, false}, 10);
  for (int n = 0; n <= 10; ++n) CHECK(r.energy[n] == doctest::Approx(K * K * n * n / 4).epsilon(1e-9));
  // hbar = 2π: rotation shifts θ by π, so pairs of kicks cancel.
  const auto a = evolve(RotorWavefunction::basis(200, 0), QkrParams{K, 2 * pi, false}, 6);
  for (int n = 0; n <= 6; n += 2) CHECK(std::abs(a.energy[n]) < 1e-9);
  // the literal phase at hbar = 2π is the resonance again
  const auto b = evolve(RotorWavefunction::basis(200, 0), QkrParams{K, 2 * pi, true}, 4);
  CHECK(b.energy[4] == doctest::Approx(K * K * 16 / 4).epsilon(1e-9));
}

TEST_CASE("leakage triggers enlargement and does not change the result") {
  const QkrParams p{10.0, 1.0, false};
  QkrPropagator small(8, p);
  auto psi = RotorWavefunction::basis(8, 0);
  CHECK_THROWS_AS(small.step(psi), LeakageError);
  const auto grown = evolve(RotorWavefunction::basis(32, 0), p, 40);
  const auto big = evolve(RotorWavefunction::basis(1024, 0), p, 40);
  CHECK(grown.enlargements > 0);
  for (int n = 0; n <= 40; ++n) CHECK(grown.energy[n] == doctest::Approx(big.energy[n]).epsilon(1e-8));
}

TEST_CASE("localization fit recovers a synthetic exponential") {
  const int L = 300;
  std::vector<double> P(2 * L + 1);
  for (int l = -L; l <= L; ++l) P[l + L] = std::exp(-std::abs(l) / 5.0);
  const auto f = localization_length(P, L);
  CHECK(f.length == doctest::Approx(5.0).epsilon(1e-6));
  CHECK(f.r2 > 0.999);
  CHECK(f.good);
  CHECK(std::abs(f.center) < 1e-9);
}

TEST_CASE("crossover estimates") {
  const auto c = crossover_estimates(10.0, 1.0);
  CHECK(c.n_info == doctest::Approx(400 / (pi * std::exp(1.0))));
  CHECK(c.n_uncertainty == doctest::Approx(100 / (2 * pi * pi)));
}
