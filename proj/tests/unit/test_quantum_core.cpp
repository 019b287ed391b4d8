#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "chaosflow/quantum_core.hpp"

using namespace chaosflow;

TEST_CASE("Fourier kernels are unitary") {
  for (int J : {2, 3, 8, 17, 64}) {
    CHECK(unitarity_defect(dft_matrix(J)) < 1e-12);
    CHECK(unitarity_defect(sym_dft_matrix(J)) < 1e-12);
  }
  CHECK(std::abs(sym_dft_matrix(1)(0, 0) - cplx(0, 1)) < 1e-15);
  const auto F = dft_matrix(4);
  CHECK(std::abs(F(1, 1) - cplx(0, 0.5)) < 1e-15);
  CHECK(std::abs(F(2, 3) - cplx(-0.5, 0)) < 1e-15);
}

TEST_CASE("entropy and purity of simple states") {
  ComplexVector psi = ComplexVector::Zero(3);
  psi(1) = 1.0;
  const auto pure = DensityMatrix::pure(psi);
  CHECK(std::abs(von_neumann_entropy(pure)) < 1e-12);
  CHECK(purity(pure.matrix()) == doctest::Approx(1.0));
  const ComplexMatrix mixed = ComplexMatrix::Identity(5, 5) / 5.0;
  CHECK(von_neumann_entropy(mixed) == doctest::Approx(std::log(5.0)));
  CHECK(von_neumann_entropy(mixed, 2.0) == doctest::Approx(2 * std::log(5.0)));
  CHECK(purity(mixed) == doctest::Approx(0.2));
}

TEST_CASE("entropy is invariant under unitary conjugation") {
  Rng r(12);
  for (int d : {2, 7, 30}) {
    const auto rho = random_density_matrix(d, r);
    const auto U = random_unitary(d, r);
    CHECK(unitarity_defect(U) < 1e-12);
    CHECK(std::abs(von_neumann_entropy(rho) - von_neumann_entropy(ComplexMatrix(U * rho * U.adjoint()))) < 1e-10);
    CHECK(hermiticity_defect(rho) < 1e-14);
    CHECK(std::abs(rho.trace() - 1.0) < 1e-13);
  }
}

TEST_CASE("density matrix validation") {
  ComplexMatrix bad = ComplexMatrix::Identity(2, 2) / 2.0;
  bad(0, 1) = 0.3;
  CHECK_THROWS(DensityMatrix(bad));
  ComplexMatrix neg = ComplexMatrix::Zero(2, 2);
  neg(0, 0) = 1.2;
  neg(1, 1) = -0.2;
  CHECK_THROWS_AS(density_eigenvalues(neg), std::domain_error);
  neg(0, 0) = 1.0 + 1e-12;
  neg(1, 1) = -1e-12;
  CHECK(density_eigenvalues(neg).minCoeff() == 0.0);
}

TEST_CASE("Bloch vector conventions") {
  ComplexVector up(2);
  up << 1.0, 0.0;
  auto a = bloch_vector(DensityMatrix::pure(up).matrix());
  CHECK(a[2] == doctest::Approx(0.5));
  ComplexVector plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  a = bloch_vector(DensityMatrix::pure(plus).matrix());
  CHECK(a[0] == doctest::Approx(0.5));
  CHECK(std::abs(a[2]) < 1e-15);
  Rng r(3);
  const auto rho = random_density_matrix(2, r);
  a = bloch_vector(rho);
  CHECK(purity(rho) == doctest::Approx(0.5 + 2 * (a[0] * a[0] + a[1] * a[1] + a[2] * a[2])));
  CHECK(hermiticity_defect(pauli_y()) == 0.0);
  CHECK((pauli_x() * pauli_y() - cplx(0, 1) * pauli_z()).norm() < 1e-15);
}

TEST_CASE("partial trace of a product state") {
  Rng r(5);
  const auto A = random_density_matrix(3, r);
  const auto B = random_density_matrix(4, r);
  ComplexMatrix AB(12, 12);
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) AB.block(a * 4, b * 4, 4, 4) = A(a, b) * B;
  }
  CHECK((partial_trace(AB, 3, 4, Keep::A) - A).norm() < 1e-14);
  CHECK((partial_trace(AB, 3, 4, Keep::B) - B).norm() < 1e-14);
}

TEST_CASE("cylinder Wigner function marginals") {
  Rng r(6);
  const int L = 6, d = 2 * L + 1;
  ComplexMatrix rho = ComplexMatrix::Zero(d, d);
  rho.block(2, 2, d - 4, d - 4) = random_density_matrix(d - 4, r);
  const auto W = wigner_cylinder(rho, 0.7);
  CHECK(W.n_theta == 4 * L + 2);
  CHECK(W.total_mass() == doctest::Approx(1.0));
  // even rows carry the diagonal, odd rows integrate to zero
  for (int n = -2 * L; n <= 2 * L; ++n) {
    const double expect = (n % 2 == 0) ? rho(n / 2 + L, n / 2 + L).real() : 0.0;
    CHECK(std::abs(W.row_marginal(n) - expect) < 1e-13);
  }
  CHECK(W.p(4) == doctest::Approx(1.4));
  // pure angular momentum state: flat in theta
  ComplexMatrix e = ComplexMatrix::Zero(d, d);
  e(L + 1, L + 1) = 1.0;
  const auto We = wigner_cylinder(e, 1.0);
  for (int k = 0; k < We.n_theta; ++k) CHECK(We.at(2, k) == doctest::Approx(1.0 / (2 * std::numbers::pi)));
  ComplexMatrix edge = ComplexMatrix::Zero(d, d);
  edge(0, 0) = 1.0;
  CHECK_THROWS(wigner_cylinder(edge, 1.0));
}
