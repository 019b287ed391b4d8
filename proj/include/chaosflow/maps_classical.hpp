#pragma once

// Classical chaotic maps: Bernoulli shift, baker map family on the unit
// square, and the kicked-rotor (standard / Zaslavsky / noisy) maps on the
// cylinder. All functions are pure; noise draws come from an explicit stream.

#include <cstdint>
#include <numbers>

#include "chaosflow/rng.hpp"

namespace chaosflow {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Point of the unit square, both coordinates in [0,1).
struct PhasePoint {
  double x = 0.0;
  double p = 0.0;
};

/// Rotor on the cylinder: angle in [0,2π), unbounded angular momentum.
struct RotorState {
  double theta = 0.0;
  double p = 0.0;
};

/// Angle noise for the measured (stochastic) standard map.
///
/// `gaussian` adds a zero-mean normal kick of the given variance to the angle
/// (measurement of the mean momentum, variance ħ²γ). `reset` replaces the
/// angle by a uniform draw on [0,2π) with probability `reset_prob`
/// (measurement of the full distribution, ν = 1 − e^{−γ}); with probability
/// 1 − ν the angle evolves deterministically.
struct NoiseSpec {
  enum class Kind { none, gaussian, reset };

  Kind kind = Kind::none;
  double variance = 0.0;
  double reset_prob = 0.0;

  static NoiseSpec none() { return {}; }
  static NoiseSpec gaussian(double variance);
  static NoiseSpec reset(double nu);
  /// ν = 1 − e^{−γ}
  static double nu_from_gamma(double gamma);
  static double gamma_from_nu(double nu);

  void validate() const;
};

/// Reduce an angle to [0,2π).
double wrap_angle(double theta);

double bernoulli_step(double x);
PhasePoint baker_step(PhasePoint pt);
PhasePoint baker_inverse(PhasePoint pt);
/// Contract p by `a` then apply the baker map; 0 < a ≤ 1.
PhasePoint dissipative_baker_step(PhasePoint pt, double a);

/// θ' = θ + p (mod 2π), p' = p + K sin θ'.
RotorState standard_map_step(RotorState s, double K);
/// θ' = θ + e^{−λ} p (mod 2π), p' = e^{−λ} p + K sin θ'.
RotorState zaslavsky_step(RotorState s, double K, double lambda);
/// Zaslavsky step with an angle kick ξ drawn according to `noise`.
RotorState noisy_standard_step(RotorState s, double K, const NoiseSpec& noise,
                               double lambda, Rng& rng);

}  // namespace chaosflow
