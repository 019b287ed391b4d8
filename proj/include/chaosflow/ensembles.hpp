#pragma once

// Monte Carlo ensembles over the classical maps and their statistical
// diagnostics: moments, histogram entropy, diffusion fits, a 1D
// Fokker-Planck integrator and box-counting dimension.

#include <cstdint>
#include <span>
#include <vector>

#include "chaosflow/maps_classical.hpp"

namespace chaosflow {

struct Histogram1D {
  double lo = 0.0;
  double width = 1.0;
  std::vector<std::int64_t> counts;
  std::int64_t total = 0;

  /// Bins aligned to multiples of `width` covering the sample range.
  static Histogram1D from_samples(std::span<const double> samples, double width);
  double bin_center(std::size_t i) const { return lo + (static_cast<double>(i) + 0.5) * width; }
};

/// I = −c Σ_j w q_j ln(d_p q_j), q_j = counts_j / (total·w). Zero for all
/// the mass in one bin of width d_p, c ln M for M equal bins of width d_p.
double shannon_entropy(const Histogram1D& h, double c, double d_p);

/// Coarse entropy −c Σ P_cell ln P_cell of unit-square points on an n×n grid.
double coarse_entropy_2d(std::span<const PhasePoint> pts, int n, double c = 1.0);
/// Same for arbitrary rectangles [x0,x1)×[y0,y1); points outside are dropped.
double coarse_entropy_2d(std::span<const double> xs, std::span<const double> ys, double x0,
                         double x1, double y0, double y1, int n, double c = 1.0);
/// Number of occupied cells of an n×n grid over the unit square.
std::size_t occupied_cells(std::span<const PhasePoint> pts, int n);

struct DiffusionFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  std::size_t n0 = 0;
  std::size_t n1 = 0;
  double residual = 0.0;  // rms deviation from the line
};

/// Least squares v(n) ≈ slope·n + intercept over n ∈ [n0, n1].
DiffusionFit fit_diffusion(std::span<const double> series, std::size_t n0, std::size_t n1);
DiffusionFit fit_diffusion(std::span<const double> series);

enum class MapId { standard, zaslavsky, noisy };

struct EnsembleParams {
  double K = 10.0;
  double lambda = 0.0;
  NoiseSpec noise{};
};

struct InitSpec {
  enum class Kind { fixed_p_uniform_theta, point, gaussian };
  Kind kind = Kind::fixed_p_uniform_theta;
  double p0 = 0.0;
  double theta0 = 0.0;
  double sigma_p = 0.0;
  double sigma_theta = 0.0;
};

struct EnsembleOptions {
  std::size_t n_steps = 100;
  std::size_t n_traj = 100000;
  std::uint64_t seed = 1;
  double entropy_dp = 0.0;  // > 0 records the histogram entropy per step
  double entropy_c = 1.0;
  unsigned threads = 1;
};

struct EnsembleResult {
  std::vector<double> mean_p;  // index n = 0..n_steps
  std::vector<double> var_p;
  std::vector<double> entropy;  // empty unless entropy_dp > 0
  std::vector<RotorState> final_cloud;
};

/// Trajectory i draws from stream derive_seed(seed, i); per-step moments are
/// reduced chunk by chunk in fixed order, so results do not depend on the
/// thread count.
EnsembleResult evolve_ensemble(MapId map, const EnsembleParams& params, const InitSpec& init,
                               const EnsembleOptions& opt);

struct FPGrid {
  double p_min = 0.0;
  double dp = 1.0;
  std::vector<double> rho;  // density, Σ rho·dp = 1

  double p(std::size_t i) const { return p_min + static_cast<double>(i) * dp; }
  double mass() const;
  double mean() const;
  double variance() const;
};

struct FPOptions {
  bool literal = false;  // printed drift/diffusion structure instead of the damped default
};

/// Explicit conservative finite volumes for
///   ∂t ρ = λ ∂p(pρ) + D ∂²p ρ             (default; D is the PDE coefficient)
///   ∂t ρ = (1−λ)∂p ρ + ∂p[(D + ((1−λ)p)²) ∂p ρ]   (literal)
/// with zero-flux walls. A delta start spreads with variance 2·D·t.
/// Throws std::domain_error if dt violates the explicit stability bound.
FPGrid fokker_planck_evolve(const FPGrid& rho0, double D, double lambda, double dt, double T,
                            FPOptions opt = {});

struct BoxCountResult {
  double dimension = 0.0;
  double residual = 0.0;
  std::vector<double> scales;
  std::vector<std::size_t> counts;
};

/// Slope of ln N(ε) against ln(1/ε) for unit-square points.
BoxCountResult box_counting_dimension(std::span<const PhasePoint> pts, std::span<const double> scales);

/// Attractor sample of the dissipative baker: uniform start, `transient`
/// discarded iterations, then every point of `recorded` further iterations.
std::vector<PhasePoint> dissipative_baker_cloud(std::size_t n_points, double a, int transient,
                                                int recorded, std::uint64_t seed);

}  // namespace chaosflow
