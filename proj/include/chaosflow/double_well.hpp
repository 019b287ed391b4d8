#pragma once

// Classical quartic double well V(x) = −a x²/2 + b x⁴/4 coupled linearly
// (g x_S Σ x_n) to a finite bath of harmonic oscillators, with optional
// Ohmic friction λ on the object.

#include <cstdint>
#include <vector>

namespace chaosflow {

struct BathMode {
  double m = 1.0;
  double omega = 1.0;
};

struct DoubleWellSystem {
  double a = 0.25;
  double b = 0.01;
  double m = 1.0;
  std::vector<BathMode> bath;
  double g = 0.0;
  double lambda = 0.0;

  /// N modes, unit masses, frequencies evenly spaced on [omega_lo, omega_hi].
  static DoubleWellSystem with_bath(double a, double b, int N, double omega_lo, double omega_hi, double g,
                                    double lambda);

  void validate() const;
  double x0() const;                  // √(a/b)
  double omega_well() const;          // √(2a/m)
  double barrier_height() const;      // a²/(4b)
  double potential(double x) const;
};

struct FullState {
  double x = 0.0;
  double p = 0.0;
  std::vector<double> xb;  // bath positions
  std::vector<double> pb;  // bath momenta

  FullState mirrored() const;
};

double total_energy(const DoubleWellSystem& sys, const FullState& s);

/// One fourth-order symplectic step (McLachlan SB3A, drift–kick stages).
/// With λ > 0 the object momentum is damped by e^{−λ dt/2m} before and
/// after the step.
void sb3a_step(const DoubleWellSystem& sys, FullState& s, double dt);

struct Trajectory {
  std::vector<double> t;
  std::vector<FullState> states;
  double max_rel_energy_drift = 0.0;
  double dt_used = 0.0;
  int halvings = 0;
};

/// Conservative integration (λ ignored) with checkpoints every `every`
/// steps. If the relative energy drift exceeds `drift_tol`, dt is halved and
/// the run repeated.
Trajectory symplectic_integrate(const DoubleWellSystem& sys, const FullState& s0, double dt, double T,
                                int every = 1, double drift_tol = 1e-6);

enum class WellLabel : int { left = -1, undecided = 0, right = 1 };

struct DampedResult {
  WellLabel label = WellLabel::undecided;
  double t_settle = 0.0;
  FullState final_state;
};

/// Integrates with friction (and bath, if present) until the object rests
/// near a minimum: |x ∓ x0| < 0.1 x0 and |ẋ| < 0.1 x0 ω_well.
DampedResult damped_trajectory(const DoubleWellSystem& sys, const FullState& s0, double dt, double T);

struct BasinMap {
  int nx = 0, np = 0;
  double X = 0.0, P = 0.0;
  std::vector<int> label;  // row-major [ip * nx + ix]

  double x(int i) const;
  double p(int j) const;
  int at(int i, int j) const { return label[static_cast<std::size_t>(j) * nx + i]; }
};

/// Symmetric grid x_i = X(2i − (nx−1))/(nx−1), same for p, so (x, p) and
/// (−x, −p) are both grid points.
BasinMap basin_map(const DoubleWellSystem& sys, int nx, int np, double X, double P, double dt, double T);

struct BathExperiment {
  std::size_t plus = 0, minus = 0, undecided = 0;
  std::vector<int> labels;
  double plus_fraction() const;  // among decided runs
};

struct BathSampling {
  double temperature = 0.1;
  bool mirror = false;  // negate every draw (parity partner of the ensemble)
};

/// Object at exactly (0, 0); bath coordinates drawn as zero-mean Gaussians
/// with ⟨x²⟩ = T/(mω²), ⟨p²⟩ = mT, one stream per draw.
FullState sample_bath_state(const DoubleWellSystem& sys, const BathSampling& s, std::uint64_t seed,
                            std::uint64_t index);
BathExperiment bath_outcome_experiment(const DoubleWellSystem& sys, std::size_t n_draws, std::uint64_t seed,
                                       const BathSampling& s, double dt, double T);

}  // namespace chaosflow
