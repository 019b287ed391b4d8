#include <doctest.h>

#include <cmath>

#include "chaosflow/spin_boson.hpp"

using namespace chaosflow;

namespace {

ComplexVector random_boson(int levels, Rng& r) {
  ComplexVector c(levels);
  for (int i = 0; i < levels; ++i) c(i) = cplx(standard_normal(r), standard_normal(r));
  return c / c.norm();
}

ComplexVector vacuum() {
  ComplexVector c = ComplexVector::Zero(1);
  c(0) = 1.0;
  return c;
}

}  // namespace

TEST_CASE("Hamiltonian structure") {
  const auto sys = SpinBosonSystem::rabi(1.0, 1.3, 0.2, 6);
  CHECK(sys.dim() == 14);
  const auto H = build_hamiltonian(sys);
  CHECK(hermiticity_defect(H) == 0.0);
  CHECK((ComplexMatrix(build_hamiltonian_sparse(sys).cast<cplx>()) - H).norm() == 0.0);
  // g = 0: spectrum is ±ω0/2 + ω(n + ½)
  const auto free = SpinBosonSystem::rabi(1.0, 1.3, 0.0, 6);
  const DensePropagator P(build_hamiltonian(free));
  std::vector<double> expect;
  for (int n = 0; n <= 6; ++n) {
    expect.push_back(-0.5 + 1.3 * (n + 0.5));
    expect.push_back(0.5 + 1.3 * (n + 0.5));
  }
  std::sort(expect.begin(), expect.end());
  for (int i = 0; i < 14; ++i) CHECK(P.energies()(i) == doctest::Approx(expect[i]));

  const auto lad = SpinBosonSystem::ladder(3, 1.0, 1.5, 0.3, 2);
  CHECK(lad.omega[0] == doctest::Approx(0.5));
  CHECK(lad.omega[2] == doctest::Approx(1.5));
  CHECK(lad.g[1] == doctest::Approx(0.3 / std::sqrt(3.0)));
  CHECK(lad.dim() == 54);
  CHECK_THROWS(SpinBosonSystem::rabi(1.0, 0.0, 0.1, 5).validate());
}

TEST_CASE("initial cat state, parity and diagnostics") {
  const auto sys = SpinBosonSystem::rabi(1.0, 1.0, 0.2, 10);
  for (int sign : {1, -1}) {
    const auto psi = initial_state(sys, sign, vacuum());
    CHECK(psi.norm() == doctest::Approx(1.0));
    CHECK(parity_expectation(sys, psi) == doctest::Approx(sign));
    const auto d = spin_diagnostics(sys, psi);
    CHECK(d.a[0] == doctest::Approx(0.5 * sign));
    CHECK(d.purity == doctest::Approx(1.0));
    CHECK(std::abs(d.entropy) < 1e-12);
  }
  ComplexVector big = ComplexVector::Zero(12);
  big(11) = 1.0;
  CHECK_THROWS(initial_state(sys, 1, big));
  CHECK_THROWS(initial_state(sys, 0, vacuum()));
}

TEST_CASE("vacuum dephasing against the closed form") {
  const auto sys = SpinBosonSystem::rabi(0.0, 1.0, 0.3, 30);
  const auto psi0 = initial_state(sys, 1, vacuum());
  const DensePropagator P(build_hamiltonian(sys));
  for (double t : {0.3, 1.0, 2.0, 3.1, 5.0}) {
    const auto rho = reduced_spin(sys, P.evolve(psi0, t));
    const double expect = 0.5 * std::exp(-4 * 0.09 * (1 - std::cos(t)));
    CHECK(std::abs(rho(0, 1)) == doctest::Approx(expect).epsilon(1e-9));
    CHECK(dephasing_coherence(sys, t) == doctest::Approx(expect));
  }
}

TEST_CASE("initial-time derivatives against finite differences") {
  Rng r(17);
  for (int trial = 0; trial < 5; ++trial) {
    const double g = 0.1 + 0.3 * uniform01(r), w0 = 0.5 + uniform01(r), w1 = 0.5 + uniform01(r);
    const auto sys = SpinBosonSystem::rabi(w0, w1, g, 40);
    const auto c = random_boson(6, r);
    const int sign = trial % 2 ? -1 : 1;
    double S = 0;
    for (int a = 0; a + 1 < 6; ++a) S += std::sqrt(a + 1.0) * (c(a + 1) * std::conj(c(a))).real();
    const auto oc = appendix_c_oracles(sys, c, sign);
    CHECK(oc.S == doctest::Approx(S));
    CHECK(oc.az_ddot == doctest::Approx(sign * 2 * g * w0 * S));
    const auto fd = appendix_c_finite_difference(sys, c, sign);
    CHECK(fd.az_ddot == doctest::Approx(oc.az_ddot).epsilon(1e-3));
    CHECK(std::abs(fd.az_dot) < 1e-6);
    CHECK(std::abs(fd.purity_dot) < 1e-6);
    CHECK(fd.purity_ddot == doctest::Approx(oc.purity_ddot).epsilon(1e-3));

    // full reduced-matrix derivatives by Richardson central differences
    const auto psi0 = initial_state(sys, sign, c);
    const DensePropagator P(build_hamiltonian(sys));
    auto rs = [&](double t) { return reduced_spin(sys, P.evolve(psi0, t)); };
    auto d1 = [&](double h) { return ComplexMatrix((rs(h) - rs(-h)) / (2 * h)); };
    auto d2 = [&](double h) { return ComplexMatrix((rs(h) - 2 * rs(0) + rs(-h)) / (h * h)); };
    const double h = 1e-2;
    const ComplexMatrix first = (4 * d1(h / 2) - d1(h)) / 3;
    const ComplexMatrix second = (4 * d2(h / 2) - d2(h)) / 3;
    CHECK((first - oc.rho_dot).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((second - oc.rho_ddot).cwiseAbs().maxCoeff() < 1e-5 * (1 + oc.rho_ddot.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("Krylov and dense propagation agree") {
  Rng r(2);
  const auto sys = SpinBosonSystem::rabi(1.0, 0.8, 0.25, 30);
  const auto psi0 = initial_state(sys, 1, random_boson(4, r));
  const DensePropagator D(build_hamiltonian(sys));
  const KrylovPropagator K(build_hamiltonian_sparse(sys));
  ComplexVector psi = psi0;
  K.advance(psi, 7.5);
  CHECK((psi - D.evolve(psi0, 7.5)).norm() < 1e-8);
}

TEST_CASE("evolution conserves norm, energy and parity") {
  const auto sys = SpinBosonSystem::rabi(1.0, 1.0, 0.2, 40);
  const auto run = evolve(sys, initial_state(sys, 1, vacuum()), 0.5, 100.0);
  REQUIRE(run.t.size() == 201);
  for (std::size_t i = 0; i < run.t.size(); ++i) {
    CHECK(std::abs(run.norm[i] - 1.0) < 1e-10);
    CHECK(std::abs(run.energy[i] - run.energy[0]) < 1e-9);
    CHECK(std::abs(run.parity[i] - run.parity[0]) < 1e-9);
  }
  EvolveOptions kr;
  kr.force_krylov = true;
  const auto k = evolve(sys, initial_state(sys, 1, vacuum()), 0.5, 10.0, kr);
  for (std::size_t i = 0; i < k.t.size(); ++i) CHECK(k.az[i] == doctest::Approx(run.az[i]).epsilon(1e-7));
}

TEST_CASE("truncation guard") {
  ComplexVector coh(12);
  double amp = std::exp(-2.0);
  for (int n = 0; n < 12; ++n) {
    coh(n) = amp;
    amp *= 2.0 / std::sqrt(n + 1.0);
  }
  coh /= coh.norm();
  const auto sys = SpinBosonSystem::rabi(1.0, 1.0, 0.5, 11);
  EvolveOptions strict;
  strict.auto_escalate = false;
  CHECK_THROWS_AS(evolve(sys, initial_state(sys, 1, coh), 0.5, 20.0, strict), TruncationError);
  const auto run = evolve(sys, initial_state(sys, 1, coh), 0.5, 20.0);
  CHECK(run.escalations > 0);
  CHECK(run.system.n_max > 11);

  const auto bigger = SpinBosonSystem::rabi(1.0, 1.0, 0.5, 20);
  const auto psi = initial_state(sys, -1, coh);
  const auto e = embed_state(sys, bigger, psi);
  CHECK(e.norm() == doctest::Approx(1.0));
  CHECK(parity_expectation(bigger, e) == doctest::Approx(parity_expectation(sys, psi)));
}

TEST_CASE("switching statistics with hysteresis") {
  std::vector<double> t, a;
  for (int i = 0; i <= 400; ++i) {
    t.push_back(i * 0.1);
    a.push_back(0.45 * std::cos(2 * M_PI * i * 0.1 / 10.0));
  }
  const auto st = switching_statistics(t, a, 0.3);
  CHECK(st.flips == 8);
  CHECK(st.mean_closed_dwell == doctest::Approx(5.0).epsilon(0.05));
  // chatter inside the band never flips
  std::vector<double> small(t.size(), 0.0);
  for (std::size_t i = 0; i < small.size(); ++i) small[i] = 0.2 * std::sin(double(i));
  CHECK(switching_statistics(t, small, 0.3).flips == 0);
  CHECK_THROWS(switching_statistics(t, a, 0.6));
}
