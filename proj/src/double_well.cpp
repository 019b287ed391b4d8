#include "chaosflow/double_well.hpp"

#include <cmath>
#include <stdexcept>

#include "chaosflow/rng.hpp"

namespace chaosflow {

namespace {

constexpr double kA0 = 0.40518861839525227722;
constexpr double kA1 = -0.28714404081652408900;
constexpr double kA2 = 0.5 - (kA0 + kA1);
constexpr double kB0 = -3.0 / 73.0;
constexpr double kB1 = 17.0 / 59.0;
constexpr double kB2 = 1.0 - 2.0 * (kB0 + kB1);
constexpr double kDrift[6] = {kA0, kA1, kA2, kA2, kA1, kA0};
constexpr double kKick[6] = {kB0, kB1, kB2, kB1, kB0, 0.0};

}  // namespace

DoubleWellSystem DoubleWellSystem::with_bath(double a, double b, int N, double omega_lo, double omega_hi,
                                             double g, double lambda) {
  DoubleWellSystem s;
  s.a = a;
  s.b = b;
  s.g = g;
  s.lambda = lambda;
  for (int n = 0; n < N; ++n) {
    const double w = N == 1 ? omega_lo : omega_lo + (omega_hi - omega_lo) * n / (N - 1);
    s.bath.push_back({1.0, w});
  }
  s.validate();
  return s;
}

void DoubleWellSystem::validate() const {
  if (!(a > 0.0 && b > 0.0 && m > 0.0)) throw std::domain_error("a, b and m must be positive");
  if (!(lambda >= 0.0)) throw std::domain_error("lambda must be >= 0");
  for (const auto& mode : bath) {
    if (!(mode.m > 0.0 && mode.omega > 0.0)) throw std::domain_error("bath masses and frequencies must be positive");
  }
}

double DoubleWellSystem::x0() const { return std::sqrt(a / b); }
double DoubleWellSystem::omega_well() const { return std::sqrt(2.0 * a / m); }
double DoubleWellSystem::barrier_height() const { return a * a / (4.0 * b); }
double DoubleWellSystem::potential(double x) const { return -0.5 * a * x * x + 0.25 * b * x * x * x * x; }

FullState FullState::mirrored() const {
  FullState s{-x, -p, xb, pb};
  for (auto& v : s.xb) v = -v;
  for (auto& v : s.pb) v = -v;
  return s;
}

double total_energy(const DoubleWellSystem& sys, const FullState& s) {
  double e = 0.5 * s.p * s.p / sys.m + sys.potential(s.x);
  double sum_x = 0.0;
  for (std::size_t n = 0; n < sys.bath.size(); ++n) {
    const auto& md = sys.bath[n];
    e += 0.5 * s.pb[n] * s.pb[n] / md.m + 0.5 * md.m * md.omega * md.omega * s.xb[n] * s.xb[n];
    sum_x += s.xb[n];
  }
  return e + sys.g * s.x * sum_x;
}

void sb3a_step(const DoubleWellSystem& sys, FullState& s, double dt) {
  const std::size_t N = sys.bath.size();
  const double damp = sys.lambda > 0.0 ? std::exp(-0.5 * sys.lambda * dt / sys.m) : 1.0;
  s.p *= damp;
  for (int st = 0; st < 6; ++st) {
    const double ha = kDrift[st] * dt;
    s.x += ha * s.p / sys.m;
    for (std::size_t n = 0; n < N; ++n) s.xb[n] += ha * s.pb[n] / sys.bath[n].m;
    if (kKick[st] == 0.0) continue;
    const double hb = kKick[st] * dt;
    double sum_x = 0.0;
    for (std::size_t n = 0; n < N; ++n) sum_x += s.xb[n];
    s.p += hb * (sys.a * s.x - sys.b * s.x * s.x * s.x - sys.g * sum_x);
    for (std::size_t n = 0; n < N; ++n) {
      const auto& md = sys.bath[n];
      s.pb[n] += hb * (-md.m * md.omega * md.omega * s.xb[n] - sys.g * s.x);
    }
  }
  s.p *= damp;
}

Trajectory symplectic_integrate(const DoubleWellSystem& sys0, const FullState& s0, double dt, double T, int every,
                                double drift_tol) {
  sys0.validate();
  if (!(dt > 0.0) || !(T >= 0.0) || every < 1) throw std::invalid_argument("bad integration parameters");
  if (s0.xb.size() != sys0.bath.size() || s0.pb.size() != sys0.bath.size()) {
    throw std::invalid_argument("bath state size does not match system");
  }
  DoubleWellSystem sys = sys0;
  sys.lambda = 0.0;
  const double E0 = total_energy(sys, s0);
  const double scale = std::max(std::abs(E0), 1e-300);
  for (int halvings = 0; halvings < 20; ++halvings, dt *= 0.5) {
    Trajectory tr;
    tr.dt_used = dt;
    tr.halvings = halvings;
    FullState s = s0;
    tr.t.push_back(0.0);
    tr.states.push_back(s);
    const auto steps = static_cast<std::size_t>(std::llround(T / dt));
    bool ok = true;
    for (std::size_t k = 1; k <= steps; ++k) {
      sb3a_step(sys, s, dt);
      const double drift = std::abs(total_energy(sys, s) - E0) / scale;
      tr.max_rel_energy_drift = std::max(tr.max_rel_energy_drift, drift);
      if (drift > drift_tol && E0 != 0.0) {
        ok = false;
        break;
      }
      if (k % static_cast<std::size_t>(every) == 0 || k == steps) {
        tr.t.push_back(static_cast<double>(k) * dt);
        tr.states.push_back(s);
      }
    }
    if (ok) return tr;
  }
  throw std::runtime_error("energy drift tolerance unreachable by step halving");
}

DampedResult damped_trajectory(const DoubleWellSystem& sys, const FullState& s0, double dt, double T) {
  sys.validate();
  if (!(dt > 0.0) || !(T >= 0.0)) throw std::invalid_argument("bad integration parameters");
  const double x0 = sys.x0(), vtol = 0.1 * x0 * sys.omega_well();
  DampedResult r;
  FullState s = s0;
  if (s.xb.size() != sys.bath.size()) {
    s.xb.assign(sys.bath.size(), 0.0);
    s.pb.assign(sys.bath.size(), 0.0);
  }
  const auto steps = static_cast<std::size_t>(std::llround(T / dt));
  for (std::size_t k = 0; k <= steps; ++k) {
    const double v = s.p / sys.m;
    if (std::abs(v) < vtol) {
      if (std::abs(s.x - x0) < 0.1 * x0) {
        r.label = WellLabel::right;
      } else if (std::abs(s.x + x0) < 0.1 * x0) {
        r.label = WellLabel::left;
      }
      if (r.label != WellLabel::undecided) {
        r.t_settle = static_cast<double>(k) * dt;
        break;
      }
    }
    if (k < steps) sb3a_step(sys, s, dt);
  }
  r.final_state = s;
  return r;
}

double BasinMap::x(int i) const { return X * static_cast<double>(2 * i - (nx - 1)) / static_cast<double>(nx - 1); }
double BasinMap::p(int j) const { return P * static_cast<double>(2 * j - (np - 1)) / static_cast<double>(np - 1); }

BasinMap basin_map(const DoubleWellSystem& sys, int nx, int np, double X, double P, double dt, double T) {
  if (nx < 2 || np < 2) throw std::invalid_argument("basin grid needs at least 2 points per axis");
  if (!(sys.lambda > 0.0)) throw std::domain_error("basin map needs friction lambda > 0");
  BasinMap bm{nx, np, X, P, std::vector<int>(static_cast<std::size_t>(nx) * np)};
  DoubleWellSystem bare = sys;
  bare.bath.clear();
  for (int j = 0; j < np; ++j) {
    for (int i = 0; i < nx; ++i) {
      FullState s{bm.x(i), bm.p(j), {}, {}};
      bm.label[static_cast<std::size_t>(j) * nx + i] = static_cast<int>(damped_trajectory(bare, s, dt, T).label);
    }
  }
  return bm;
}

double BathExperiment::plus_fraction() const {
  const std::size_t dec = plus + minus;
  return dec > 0 ? static_cast<double>(plus) / static_cast<double>(dec) : 0.0;
}

FullState sample_bath_state(const DoubleWellSystem& sys, const BathSampling& bs, std::uint64_t seed,
                            std::uint64_t index) {
  Rng rng = make_stream(seed, index);
  FullState s{0.0, 0.0, std::vector<double>(sys.bath.size()), std::vector<double>(sys.bath.size())};
  for (std::size_t n = 0; n < sys.bath.size(); ++n) {
    const auto& md = sys.bath[n];
    s.xb[n] = std::sqrt(bs.temperature / (md.m * md.omega * md.omega)) * standard_normal(rng);
    s.pb[n] = std::sqrt(bs.temperature * md.m) * standard_normal(rng);
  }
  return bs.mirror ? s.mirrored() : s;
}

BathExperiment bath_outcome_experiment(const DoubleWellSystem& sys, std::size_t n_draws, std::uint64_t seed,
                                       const BathSampling& bs, double dt, double T) {
  if (!(bs.temperature >= 0.0)) throw std::domain_error("bath temperature must be >= 0");
  BathExperiment ex;
  ex.labels.reserve(n_draws);
  for (std::size_t i = 0; i < n_draws; ++i) {
    const auto r = damped_trajectory(sys, sample_bath_state(sys, bs, seed, i), dt, T);
    const int l = static_cast<int>(r.label);
    ex.labels.push_back(l);
    if (l > 0) {
      ++ex.plus;
    } else if (l < 0) {
      ++ex.minus;
    } else {
      ++ex.undecided;
    }
  }
  return ex;
}

}  // namespace chaosflow
