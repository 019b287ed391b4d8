#include "chaosflow/maps_classical.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace chaosflow {

namespace {

void require_unit_interval(double v, const char* what) {
  if (!(v >= 0.0 && v < 1.0)) {
    throw std::domain_error(std::string(what) + " = " + std::to_string(v) +
                            " outside [0,1)");
  }
}

void require_unit_square(PhasePoint pt) {
  require_unit_interval(pt.x, "x");
  require_unit_interval(pt.p, "p");
}

}  // namespace

NoiseSpec NoiseSpec::gaussian(double variance) {
  NoiseSpec n;
  n.kind = Kind::gaussian;
  n.variance = variance;
  n.validate();
  return n;
}

NoiseSpec NoiseSpec::reset(double nu) {
  NoiseSpec n;
  n.kind = Kind::reset;
  n.reset_prob = nu;
  n.validate();
  return n;
}

double NoiseSpec::nu_from_gamma(double gamma) { return -std::expm1(-gamma); }

double NoiseSpec::gamma_from_nu(double nu) {
  if (!(nu >= 0.0 && nu < 1.0)) {
    throw std::domain_error("nu must lie in [0,1) to map onto a finite gamma");
  }
  return -std::log1p(-nu);
}

void NoiseSpec::validate() const {
  if (!(variance >= 0.0)) throw std::domain_error("noise variance must be >= 0");
  if (!(reset_prob >= 0.0 && reset_prob <= 1.0)) {
    throw std::domain_error("reset probability must lie in [0,1]");
  }
}

double wrap_angle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  // fmod of a tiny negative number plus 2π can round up to exactly 2π.
  if (t >= kTwoPi) t = 0.0;
  return t;
}

double bernoulli_step(double x) {
  require_unit_interval(x, "x");
  const double y = 2.0 * x;
  return y >= 1.0 ? y - 1.0 : y;
}

PhasePoint baker_step(PhasePoint pt) {
  require_unit_square(pt);
  const double y = 2.0 * pt.x;
  const double branch = y >= 1.0 ? 1.0 : 0.0;
  return {y - branch, 0.5 * (pt.p + branch)};
}

PhasePoint baker_inverse(PhasePoint pt) {
  require_unit_square(pt);
  const double y = 2.0 * pt.p;
  const double branch = y >= 1.0 ? 1.0 : 0.0;
  return {0.5 * (pt.x + branch), y - branch};
}

PhasePoint dissipative_baker_step(PhasePoint pt, double a) {
  if (!(a > 0.0 && a <= 1.0)) {
    throw std::domain_error("contraction factor a must lie in (0,1]");
  }
  require_unit_square(pt);
  return baker_step({pt.x, a * pt.p});
}

RotorState standard_map_step(RotorState s, double K) {
  const double theta = wrap_angle(s.theta + s.p);
  return {theta, s.p + K * std::sin(theta)};
}

RotorState zaslavsky_step(RotorState s, double K, double lambda) {
  if (!(lambda >= 0.0)) throw std::domain_error("lambda must be >= 0");
  const double damped = std::exp(-lambda) * s.p;
  const double theta = wrap_angle(s.theta + damped);
  return {theta, damped + K * std::sin(theta)};
}

RotorState noisy_standard_step(RotorState s, double K, const NoiseSpec& noise,
                               double lambda, Rng& rng) {
  if (!(lambda >= 0.0)) throw std::domain_error("lambda must be >= 0");
  const double damped = std::exp(-lambda) * s.p;
  double theta = s.theta + damped;
  switch (noise.kind) {
    case NoiseSpec::Kind::none:
      break;
    case NoiseSpec::Kind::gaussian:
      if (noise.variance > 0.0) theta += std::sqrt(noise.variance) * standard_normal(rng);
      break;
    case NoiseSpec::Kind::reset:
      // One uniform decides, a second one supplies the new angle; both are
      // always consumed so streams stay aligned across ν.
      {
        const double u = uniform01(rng);
        const double fresh = kTwoPi * uniform01(rng);
        if (u < noise.reset_prob) theta = fresh;
      }
      break;
  }
  theta = wrap_angle(theta);
  return {theta, damped + K * std::sin(theta)};
}

}  // namespace chaosflow
