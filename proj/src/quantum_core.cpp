#include "chaosflow/quantum_core.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "chaosflow/fft.hpp"

namespace chaosflow {

namespace {
constexpr double kPi = std::numbers::pi;
}

ComplexMatrix dft_matrix(int J) {
  if (J < 2) throw std::invalid_argument("DFT size must be >= 2");
  ComplexMatrix F(J, J);
  const double s = 1.0 / std::sqrt(static_cast<double>(J));
  for (int j = 0; j < J; ++j) {
    for (int l = 0; l < J; ++l) {
      // Reduce jl mod J before forming the angle to keep it small.
      const double ang = 2.0 * kPi * static_cast<double>((static_cast<long>(j) * l) % J) / J;
      F(j, l) = std::polar(s, ang);
    }
  }
  return F;
}

ComplexMatrix sym_dft_matrix(int J) {
  if (J < 1) throw std::invalid_argument("DFT size must be >= 1");
  ComplexMatrix G(J, J);
  const double s = 1.0 / std::sqrt(static_cast<double>(J));
  for (int j = 0; j < J; ++j) {
    for (int l = 0; l < J; ++l) {
      // (j+½)(l+½) = ((2j+1)(2l+1))/4; reduce mod 4J for accuracy.
      const long q = (static_cast<long>(2 * j + 1) * (2 * l + 1)) % (4L * J);
      G(j, l) = std::polar(s, 2.0 * kPi * static_cast<double>(q) / (4.0 * J));
    }
  }
  return G;
}

double unitarity_defect(const ComplexMatrix& U) {
  if (U.rows() != U.cols()) throw std::invalid_argument("unitarity check needs a square matrix");
  return (U.adjoint() * U - ComplexMatrix::Identity(U.rows(), U.cols())).cwiseAbs().maxCoeff();
}

double hermiticity_defect(const ComplexMatrix& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("hermiticity check needs a square matrix");
  return (A - A.adjoint()).cwiseAbs().maxCoeff();
}

namespace {
ComplexMatrix ginibre(int d, Rng& rng) {
  ComplexMatrix Z(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const double re = standard_normal(rng);
      const double im = standard_normal(rng);
      Z(i, j) = {re, im};
    }
  }
  return Z;
}
}  // namespace

ComplexMatrix random_unitary(int d, Rng& rng) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  Eigen::HouseholderQR<ComplexMatrix> qr(ginibre(d, rng));
  ComplexMatrix Q = qr.householderQ();
  const ComplexMatrix R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) {
    const double a = std::abs(R(j, j));
    if (a > 0.0) Q.col(j) *= R(j, j) / a;
  }
  return Q;
}

ComplexMatrix random_density_matrix(int d, Rng& rng) {
  const ComplexMatrix G = ginibre(d, rng);
  ComplexMatrix rho = G * G.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

DensityMatrix::DensityMatrix(ComplexMatrix rho, double tol) : rho_(std::move(rho)) {
  if (rho_.rows() != rho_.cols() || rho_.rows() == 0) {
    throw std::invalid_argument("density matrix must be square and non-empty");
  }
  if (!rho_.allFinite()) throw std::domain_error("density matrix has non-finite entries");
  if (hermiticity_defect(rho_) > tol) throw std::domain_error("density matrix is not hermitian");
  if (std::abs(rho_.trace() - cplx(1.0, 0.0)) > tol) {
    throw std::domain_error("density matrix trace differs from 1");
  }
  density_eigenvalues(rho_, tol);
}

DensityMatrix DensityMatrix::pure(const ComplexVector& psi) {
  return DensityMatrix(psi * psi.adjoint() / psi.squaredNorm());
}

Eigen::VectorXd density_eigenvalues(const ComplexMatrix& rho, double tol) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigen-decomposition failed");
  Eigen::VectorXd ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -tol) {
      throw std::domain_error("density matrix has eigenvalue " + std::to_string(ev(i)));
    }
    if (ev(i) < 0.0) ev(i) = 0.0;
  }
  return ev;
}

double von_neumann_entropy(const ComplexMatrix& rho, double c) {
  const Eigen::VectorXd ev = density_eigenvalues(rho);
  CompensatedSum s;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > 0.0) s += ev(i) * std::log(ev(i));
  }
  return -c * s.value();
}

double purity(const ComplexMatrix& rho) {
  // Tr ρ² = Σ |ρ_ij|² for hermitian ρ.
  return rho.cwiseAbs2().sum();
}

ComplexMatrix pauli_x() {
  ComplexMatrix s(2, 2);
  s << 0, 1, 1, 0;
  return s;
}

ComplexMatrix pauli_y() {
  ComplexMatrix s(2, 2);
  s << 0, cplx(0, -1), cplx(0, 1), 0;
  return s;
}

ComplexMatrix pauli_z() {
  ComplexMatrix s(2, 2);
  s << 1, 0, 0, -1;
  return s;
}

std::array<double, 3> bloch_vector(const ComplexMatrix& rho) {
  if (rho.rows() != 2 || rho.cols() != 2) throw std::invalid_argument("Bloch vector needs a 2x2 matrix");
  return {0.5 * (rho * pauli_x()).trace().real(), 0.5 * (rho * pauli_y()).trace().real(),
          0.5 * (rho * pauli_z()).trace().real()};
}

ComplexMatrix partial_trace(const ComplexMatrix& rho, int dA, int dB, Keep keep) {
  if (dA < 1 || dB < 1 || rho.rows() != static_cast<Eigen::Index>(dA) * dB || rho.cols() != rho.rows()) {
    throw std::invalid_argument("partial trace: dimensions do not factor the matrix");
  }
  if (keep == Keep::A) {
    ComplexMatrix r = ComplexMatrix::Zero(dA, dA);
    for (int a = 0; a < dA; ++a)
      for (int a2 = 0; a2 < dA; ++a2)
        for (int b = 0; b < dB; ++b) r(a, a2) += rho(a * dB + b, a2 * dB + b);
    return r;
  }
  ComplexMatrix r = ComplexMatrix::Zero(dB, dB);
  for (int a = 0; a < dA; ++a) r += rho.block(a * dB, a * dB, dB, dB);
  return r;
}

double WignerCylinder::theta(int k) const { return 2.0 * kPi * k / n_theta; }
double WignerCylinder::dtheta() const { return 2.0 * kPi / n_theta; }

double WignerCylinder::row_marginal(int n) const {
  CompensatedSum s;
  for (int k = 0; k < n_theta; ++k) s += at(n, k);
  return s.value() * dtheta();
}

double WignerCylinder::total_mass() const {
  CompensatedSum s;
  for (double w : W) s += w;
  return s.value() * dtheta();
}

WignerCylinder wigner_cylinder(const ComplexMatrix& rho, double hbar, int n_theta, double leak_tol) {
  if (rho.rows() != rho.cols() || rho.rows() % 2 == 0) {
    throw std::invalid_argument("Wigner input must be square with odd size 2L+1");
  }
  const int L = static_cast<int>(rho.rows() / 2);
  const double edge = std::abs(rho(0, 0)) + std::abs(rho(2 * L, 2 * L));
  if (edge > leak_tol) {
    throw std::domain_error("Wigner: boundary diagonal mass " + std::to_string(edge) +
                            " exceeds truncation tolerance");
  }
  if (n_theta == 0) n_theta = 4 * L + 2;
  if (n_theta < 4 * L + 1) throw std::invalid_argument("n_theta too small: angular harmonics alias");

  WignerCylinder w;
  w.L = L;
  w.hbar = hbar;
  w.n_theta = n_theta;
  w.W.assign(static_cast<std::size_t>(w.rows()) * n_theta, 0.0);
  FftPlan plan(static_cast<std::size_t>(n_theta));
  cplx* buf = plan.data();
  for (int n = -2 * L; n <= 2 * L; ++n) {
    std::fill(buf, buf + n_theta, cplx{});
    // l + m = n, l − m = d with d ≡ n (mod 2).
    for (int l = -L; l <= L; ++l) {
      const int m = n - l;
      if (m < -L || m > L) continue;
      const int d = l - m;
      buf[((d % n_theta) + n_theta) % n_theta] += rho(l + L, m + L);
    }
    plan.backward();
    double* row = &w.W[static_cast<std::size_t>(n + 2 * L) * n_theta];
    for (int k = 0; k < n_theta; ++k) row[k] = buf[k].real() / (2.0 * kPi);
  }
  return w;
}

}  // namespace chaosflow
