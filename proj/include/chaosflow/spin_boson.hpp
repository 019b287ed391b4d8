#pragma once

// Spin-½ coupled to N truncated boson modes (ħ = 1):
//   H = (ω0/2) σx + Σ_n g_n σz (a_n + a_n†) + Σ_n ω_n (a_n† a_n + ½),
// coupling switched on at t = 0. Basis index = s·B + Σ_j n_j (n_max+1)^j
// with s = 0 for ↑, s = 1 for ↓ and B = (n_max+1)^N.

#include <Eigen/Sparse>
#include <array>
#include <stdexcept>
#include <vector>

#include "chaosflow/quantum_core.hpp"

namespace chaosflow {

struct TruncationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SpinBosonSystem {
  int N = 1;
  double omega0 = 1.0;
  std::vector<double> omega;  // ω_n
  std::vector<double> g;      // g_n
  int n_max = 20;
  std::size_t max_dim = std::size_t{1} << 22;

  /// N = 1 quantum Rabi model.
  static SpinBosonSystem rabi(double omega0, double omega1, double g, int n_max);
  /// ω_n = ω_c·n/N, g_n = g/√N.
  static SpinBosonSystem ladder(int N, double omega0, double omega_c, double g, int n_max);

  void validate() const;
  std::size_t boson_dim() const;
  std::size_t dim() const { return 2 * boson_dim(); }
};

using SparseRealMatrix = Eigen::SparseMatrix<double>;

SparseRealMatrix build_hamiltonian_sparse(const SpinBosonSystem& sys);
ComplexMatrix build_hamiltonian(const SpinBosonSystem& sys);
/// Diagonal of Π = σx ⊗ (−1)^{Σn} is not available (σx is off-diagonal);
/// this returns Π as a sparse signed permutation.
SparseRealMatrix parity_operator(const SpinBosonSystem& sys);
double parity_expectation(const SpinBosonSystem& sys, const ComplexVector& psi);

/// (|↓⟩ ± |↑⟩)/√2 ⊗ |c⟩ for N = 1, or ⊗ |c⟩ on mode 1 with the other modes
/// in vacuum. `c` must be normalized (1e-10) and fit into n_max.
ComplexVector initial_state(const SpinBosonSystem& sys, int sign, const ComplexVector& c);
/// Re-embeds a state into a system with larger n_max.
ComplexVector embed_state(const SpinBosonSystem& from, const SpinBosonSystem& to, const ComplexVector& psi);

/// Occupation of the top Fock level of each mode.
std::vector<double> top_level_occupation(const SpinBosonSystem& sys, const ComplexVector& psi);

ComplexMatrix reduced_spin(const SpinBosonSystem& sys, const ComplexVector& psi);

struct SpinDiagnostics {
  std::array<double, 3> a{};  // ½⟨σ_k⟩
  double purity = 1.0;
  double entropy = 0.0;
};
SpinDiagnostics spin_diagnostics(const SpinBosonSystem& sys, const ComplexVector& psi, double c = 1.0);

/// Exact propagator from a full eigendecomposition (dim ≤ 4096).
class DensePropagator {
 public:
  explicit DensePropagator(const ComplexMatrix& H);
  ComplexVector evolve(const ComplexVector& psi0, double t) const;
  const Eigen::VectorXd& energies() const { return E_; }

 private:
  Eigen::VectorXd E_;
  ComplexMatrix V_;
};

/// Krylov (Lanczos) exponentiation with step-halving error control.
class KrylovPropagator {
 public:
  KrylovPropagator(SparseRealMatrix H, int krylov_dim = 30, double tol = 1e-10);
  /// Advances psi by t, subdividing until one step and two half steps agree
  /// to `tol` in norm distance.
  void advance(ComplexVector& psi, double t) const;
  ComplexVector step(const ComplexVector& psi, double t) const;

 private:
  SparseRealMatrix H_;
  int m_;
  double tol_;
};

struct SpinBosonRun {
  std::vector<double> t, ax, ay, az, purity, entropy, parity, energy, norm;
  SpinBosonSystem system;  // final n_max after escalation
  int escalations = 0;
  ComplexVector final_state;
};

struct EvolveOptions {
  bool force_krylov = false;
  bool auto_escalate = true;
  double guard = 1e-6;
  int max_n_max = 200;
  double entropy_c = 1.0;
};

/// Checkpoints at t = 0, dt, …, T. If a top Fock level exceeds the guard,
/// n_max grows by half and the run restarts (counted in `escalations`);
/// without auto_escalate a TruncationError is thrown.
SpinBosonRun evolve(const SpinBosonSystem& sys, const ComplexVector& psi0, double dt, double T,
                    const EvolveOptions& opt = {});

/// Initial-time derivatives for N = 1 and the cat ⊗ |c⟩ state.
struct AppendixC {
  double S = 0.0;   // Σ √(α+1) Re(c_{α+1} c*_α)
  double T = 0.0;   // Σ √(α+1) Im(c_{α+1} c*_α)
  double X2 = 0.0;  // ⟨(a + a†)²⟩
  ComplexMatrix rho_dot;
  ComplexMatrix rho_ddot;
  double az_dot = 0.0;
  double az_ddot = 0.0;
  double purity_dot = 0.0;
  double purity_ddot = 0.0;
};
AppendixC appendix_c_oracles(const SpinBosonSystem& sys, const ComplexVector& c, int sign);

/// Richardson-extrapolated central differences of a_z and purity at t = 0,
/// using exact evolution forward and backward in time.
struct FiniteDifferenceC {
  double az_dot = 0.0, az_ddot = 0.0, purity_dot = 0.0, purity_ddot = 0.0;
};
FiniteDifferenceC appendix_c_finite_difference(const SpinBosonSystem& sys, const ComplexVector& c, int sign,
                                               double h = 1e-2);

struct Dwell {
  double t_start = 0.0;
  double t_end = 0.0;
  int polarity = 0;
  bool closed = false;  // ended by a flip rather than by the end of the series
};

struct SwitchingStats {
  std::vector<Dwell> dwells;
  int flips = 0;
  double mean_closed_dwell = 0.0;
};

/// Hysteresis sign tracking: the polarity changes only when the series goes
/// beyond ±threshold on the opposite side. threshold must lie in (0, ½).
SwitchingStats switching_statistics(const std::vector<double>& t, const std::vector<double>& a, double threshold);

/// |ρ↑↓(t)| for ω0 = 0 and a vacuum bath:
/// ½ Π_n exp(−4 g_n² (1 − cos ω_n t)/ω_n²) times the initial 2|ρ↑↓(0)|.
double dephasing_coherence(const SpinBosonSystem& sys, double t);

}  // namespace chaosflow
