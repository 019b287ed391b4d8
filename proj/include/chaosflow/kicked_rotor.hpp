#pragma once

// Closed quantum kicked rotor: split-step Floquet propagation of pure
// states in the angular-momentum basis l ∈ [−L, L].

#include <complex>
#include <stdexcept>
#include <vector>

#include "chaosflow/fft.hpp"
#include "chaosflow/quantum_core.hpp"

namespace chaosflow {

/// ħ from 2πr/G, G = (√5 − 1)/2 the inverse golden ratio.
double hbar_from_golden_fraction(double r);
inline constexpr double kInverseGolden = 0.6180339887498948482;

struct LeakageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct QkrParams {
  double K = 10.0;
  double hbar = 1.0;
  bool literal_phase = false;  // e^{−iħl²} instead of e^{−iħl²/2}
  double k() const { return K / hbar; }
};

/// Free-rotation phases e^{−iħl²/2} (or the literal variant) for l = −L..L.
std::vector<cplx> rotation_phases(int L, double hbar, bool literal);

/// Smallest FFT length ≥ 2L+1+2·n_cut that factors into 2, 3 and 5.
std::size_t kick_grid_size(int L, int n_cut);
/// n_cut with |J_n(k)| negligible beyond it: ceil(k) + 40.
int kick_cutoff(double k);

/// Multiplies by e^{−ik cos θ} in θ space for coefficient vectors indexed
/// l + L; reusable across steps.
class KickOperator {
 public:
  KickOperator(int L, double k);
  int L() const { return L_; }
  /// Applies the kick in place. Returns the mass that left [−L, L].
  double apply(cplx* amp);

 private:
  int L_;
  std::size_t M_;
  FftPlan plan_;
  std::vector<cplx> factor_;
};

struct RotorWavefunction {
  int L = 0;
  std::vector<cplx> psi;  // index l + L

  static RotorWavefunction basis(int L, int l0);
  double norm2() const;
  double energy(double hbar) const;  // ⟨p²/2⟩ with p = ħl
  std::vector<double> probabilities() const;
  double edge_mass() const;  // |ψ_{−L}|² + |ψ_L|²
  RotorWavefunction resized(int L_new) const;
};

class QkrPropagator {
 public:
  QkrPropagator(int L, const QkrParams& p, double leak_tol = 1e-8);
  /// Û_kick Û_rot. Throws LeakageError when boundary or outflow mass exceeds
  /// the tolerance.
  void step(RotorWavefunction& psi);
  int L() const { return L_; }

 private:
  int L_;
  double leak_tol_;
  std::vector<cplx> rot_;
  KickOperator kick_;
};

/// Single step on a copy, for tests.
RotorWavefunction floquet_step(const RotorWavefunction& psi, const QkrParams& p);
/// Dense Floquet matrix on [−L, L] (small L only).
ComplexMatrix floquet_matrix(int L, const QkrParams& p);

struct QkrRun {
  std::vector<double> energy;  // n = 0..n_steps
  std::vector<double> P;       // final |ψ_l|², index l + L
  int L = 0;
  int enlargements = 0;
};

/// Evolves from ψ0 (re-embedded as needed). On leakage, doubles L and
/// restarts, up to `max_L`.
QkrRun evolve(const RotorWavefunction& psi0, const QkrParams& p, std::size_t n_steps, int max_L = 1 << 14);
/// max(8·L_est, 512) with L_est = k²/4.
int default_L(const QkrParams& p);

struct LocalizationFit {
  double length = 0.0;
  double r2 = 0.0;
  double center = 0.0;
  std::size_t points = 0;
  bool good = false;  // r2 ≥ 0.8
};

/// Log-linear fit ln P ≈ a − |l − l_c|/length over the tails. Points below
/// 1e-25·max are treated as floor; of the remaining distance range the
/// innermost 20% and the outermost 10% are excluded.
LocalizationFit localization_length(const std::vector<double>& P, int L);

struct CrossoverTimes {
  double n_info = 0.0;         // 4K²/(πe)
  double n_uncertainty = 0.0;  // K²/(2π²ħ²)
};
CrossoverTimes crossover_estimates(double K, double hbar);

}  // namespace chaosflow
