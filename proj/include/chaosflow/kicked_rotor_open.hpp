#pragma once

// Density-matrix evolution of the measured and/or damped quantum kicked
// rotor, per-period maps in the angular-momentum basis l ∈ [−L, L].

#include <vector>

#include "chaosflow/fft.hpp"
#include "chaosflow/kicked_rotor.hpp"
#include "chaosflow/maps_classical.hpp"
#include "chaosflow/quantum_core.hpp"

namespace chaosflow {

enum class MeasureMode { mean_l, full_Pl };

struct BesselKickKernel {
  double k = 0.0;
  int n_cut = 0;
  std::vector<cplx> b;  // b_n = iⁿ J_n(k), index n + n_cut

  cplx operator()(int n) const { return (n < -n_cut || n > n_cut) ? cplx{} : b[n + n_cut]; }
  double completeness() const;  // Σ |b_n|²
};

/// Throws std::invalid_argument if n_cut < k + 40.
BesselKickKernel bessel_coeffs(double k, int n_cut);

struct OpenRotorParams {
  double K = 5.0;
  double hbar = 1.0;
  double gamma = 0.0;
  MeasureMode mode = MeasureMode::full_Pl;
  double lambda = 0.0;  // friction per period
  bool literal_phase = false;
  double k() const { return K / hbar; }
};

struct RotorDensity {
  int L = 0;
  ComplexMatrix rho;  // index l + L

  static RotorDensity basis(int L, int l0);
  static RotorDensity from_pure(const RotorWavefunction& psi);
  double trace() const;
  double energy(double hbar) const;
  double mean_l() const;
  std::vector<double> diagonal() const;
  double edge_mass() const;
  RotorDensity resized(int L_new) const;
};

/// Element-wise rotation phase and measurement decay.
void decoherence_rotation_step(RotorDensity& r, const OpenRotorParams& p);

/// ρ → B ρ B† for the kick e^{−ik cos θ}, B_{l l'} = b*_{l−l'}(k), via 2D FFT;
/// the result is mirrored to be exactly hermitian. Returns the mass pushed
/// outside [−L, L].
class DensityKick {
 public:
  DensityKick(int L, double k);
  double apply(RotorDensity& r);

 private:
  int L_;
  std::size_t M_;
  FftPlan plan_;
  std::vector<cplx> f_;
};
double kick_step(RotorDensity& r, double k);
/// Reference O(L⁴) path straight from the Bessel kernel (small L only).
RotorDensity kick_step_direct(const RotorDensity& r, const BesselKickKernel& kernel);

/// Friction between kicks: n_sub explicit Euler substeps of
///   dρ/dt = λ Σ_± (L± ρ L±† − ½{L±†L±, ρ}),
/// L₊ = Σ_{l≥1} √l |l−1⟩⟨l|, L₋ = Σ_{l≤−1} √|l| |l+1⟩⟨l|,
/// which gives d⟨l⟩/dt = −λ⟨l⟩. Halves the step and redoes the period if a
/// diagonal entry drops below −1e-6. Returns the number of substeps used.
int dissipative_substep(RotorDensity& r, double lambda, int n_sub);
int default_substeps(double lambda, int L);

struct OpenRunOptions {
  std::size_t n_steps = 512;
  int entropy_every = 0;  // 0 disables the von Neumann entropy column
  bool auto_enlarge = true;
  int max_L = 4096;
  double leak_tol = 1e-6;
  bool stop_when_stationary = false;
  double stationary_tol = 1e-3;  // relative change of E over 10 steps
};

struct OpenRun {
  std::vector<double> energy;   // n = 0..steps
  std::vector<double> entropy;  // NaN where not computed
  RotorDensity final_state;
  int L = 0;
  int enlargements = 0;
  int substeps = 0;
  std::size_t steps_done = 0;
  bool stationary = false;
};

/// One period: friction (if λ > 0), then rotation/decoherence, then kick.
/// With no friction this is the measured map; with γ = 0, λ = 0 it is unitary.
OpenRun evolve_open(const RotorDensity& rho0, const OpenRotorParams& p, const OpenRunOptions& opt);

struct NoisyMapComparison {
  double tv_distance = 0.0;
  double energy_rel_diff = 0.0;
  double E_quantum = 0.0;
  double E_classical = 0.0;
};

/// TV distance between the quantum diagonal P(l) and classical momenta binned
/// at Δp = ħ (bin l = round(p/ħ)); classical mass outside [−L, L] counts as
/// disagreement.
NoisyMapComparison compare_with_noisy_map(const std::vector<double>& P_quantum, int L, double hbar,
                                          const std::vector<double>& p_classical);

/// The classical counterpart of a measurement mode: reset with ν = 1 − e^{−γ}
/// (full_Pl) or Gaussian angle noise of variance 2γ (mean_l), which reproduces
/// the coherence decay e^{−γ(l−m)²}.
NoiseSpec matching_noise(MeasureMode mode, double gamma);

struct BandReport {
  double fraction = 0.0;  // Wigner mass inside the band
  double positive_mass = 0.0;
  std::size_t attractor_points = 0;
  double covered_area_fraction = 0.0;
};

/// Fraction of Wigner weight W(p, θ) lying within distance `width` of the
/// classical attractor sample in the (θ, p) plane. Attractor points are
/// snapped to the Wigner θ columns.
BandReport attractor_band_fraction(const WignerCylinder& W, const std::vector<RotorState>& attractor,
                                   double width);

/// Classical Zaslavsky attractor sample: n_traj uniform starts, `transient`
/// steps discarded, then `recorded` steps kept.
std::vector<RotorState> zaslavsky_attractor(double K, double lambda, std::size_t n_traj, int transient,
                                            int recorded, std::uint64_t seed);

}  // namespace chaosflow
