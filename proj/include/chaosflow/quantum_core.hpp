#pragma once

// Dense complex linear algebra shared by every quantum module: Fourier
// kernels, density-operator functionals, partial trace and the cylinder
// Wigner function.

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <vector>

#include "chaosflow/rng.hpp"

namespace chaosflow {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// (F_J)_{jl} = e^{2πi jl/J}/√J.
ComplexMatrix dft_matrix(int J);
/// (G_J)_{jl} = e^{2πi (j+½)(l+½)/J}/√J, the antiperiodic-grid transform.
ComplexMatrix sym_dft_matrix(int J);

double unitarity_defect(const ComplexMatrix& U);    // ‖U†U − 1‖_max
double hermiticity_defect(const ComplexMatrix& A);  // ‖A − A†‖_max

/// Haar-distributed unitary from QR of a complex Ginibre matrix with the
/// diagonal phases of R absorbed.
ComplexMatrix random_unitary(int d, Rng& rng);
/// Random full-rank density matrix G G† / Tr, G complex Ginibre.
ComplexMatrix random_density_matrix(int d, Rng& rng);

/// Density operator with validated invariants: hermitian and unit trace to
/// `tol`, eigenvalues ≥ −tol.
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix rho, double tol = 1e-10);
  static DensityMatrix pure(const ComplexVector& psi);

  const ComplexMatrix& matrix() const { return rho_; }
  Eigen::Index dim() const { return rho_.rows(); }

 private:
  ComplexMatrix rho_;
};

/// Eigenvalues of a hermitian matrix; values in [−tol, 0) clipped to zero,
/// anything more negative throws std::domain_error.
Eigen::VectorXd density_eigenvalues(const ComplexMatrix& rho, double tol = 1e-10);

double von_neumann_entropy(const ComplexMatrix& rho, double c = 1.0);
inline double von_neumann_entropy(const DensityMatrix& rho, double c = 1.0) {
  return von_neumann_entropy(rho.matrix(), c);
}
double purity(const ComplexMatrix& rho);

ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();

/// a_k = ½ Tr(ρ σ_k), basis order (↑, ↓) with σ_z = diag(1, −1). With this
/// normalization purity = ½ + 2|a|².
std::array<double, 3> bloch_vector(const ComplexMatrix& rho);

enum class Keep { A, B };
/// Reduced density matrix of a dA·dB system; index = a·dB + b.
ComplexMatrix partial_trace(const ComplexMatrix& rho, int dA, int dB, Keep keep);

/// W(n, θ) = (1/2π) Σ_{l+m=n} ρ_{lm} e^{i(l−m)θ} on rows n = −2L..2L
/// (momentum p = ħn/2) and θ_k = 2πk/n_theta.
struct WignerCylinder {
  int L = 0;
  double hbar = 1.0;
  int n_theta = 0;
  std::vector<double> W;  // row-major, (4L+1) × n_theta

  int rows() const { return 4 * L + 1; }
  double at(int n, int k) const { return W[static_cast<std::size_t>(n + 2 * L) * n_theta + k]; }
  double p(int n) const { return 0.5 * hbar * n; }
  double theta(int k) const;
  double dtheta() const;
  double total_mass() const;
  /// ∫ W(n, θ) dθ for row n.
  double row_marginal(int n) const;
};

/// ρ indexed by l ∈ [−L, L] (row/col index l + L). n_theta = 0 picks the
/// smallest alias-free size 4L+2. Throws if the diagonal mass on the two
/// boundary rows exceeds `leak_tol`.
WignerCylinder wigner_cylinder(const ComplexMatrix& rho, double hbar, int n_theta = 0,
                               double leak_tol = 1e-6);

}  // namespace chaosflow
