#include "chaosflow/kicked_rotor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace chaosflow {

namespace {
constexpr double kTau = 2.0 * std::numbers::pi;

bool smooth_235(std::size_t n) {
  for (std::size_t f : {2u, 3u, 5u}) {
    while (n % f == 0) n /= f;
  }
  return n == 1;
}
}  // namespace

double hbar_from_golden_fraction(double r) { return kTau * r / kInverseGolden; }

std::vector<cplx> rotation_phases(int L, double hbar, bool literal) {
  std::vector<cplx> ph(2 * static_cast<std::size_t>(L) + 1);
  const double f = literal ? hbar : 0.5 * hbar;
  for (int l = -L; l <= L; ++l) {
    const double ang = std::fmod(f * static_cast<double>(l) * l, kTau);
    ph[l + L] = std::polar(1.0, -ang);
  }
  return ph;
}

int kick_cutoff(double k) { return static_cast<int>(std::ceil(std::abs(k))) + 40; }

std::size_t kick_grid_size(int L, int n_cut) {
  std::size_t M = 2 * static_cast<std::size_t>(L) + 1 + 2 * static_cast<std::size_t>(n_cut);
  while (!smooth_235(M)) ++M;
  return M;
}

KickOperator::KickOperator(int L, double k)
    : L_(L), M_(kick_grid_size(L, kick_cutoff(k))), plan_(M_), factor_(M_) {
  if (L < 1) throw std::invalid_argument("L must be >= 1");
  // The forward/backward pair is unnormalized; fold 1/M into the factor.
  for (std::size_t j = 0; j < M_; ++j) {
    const double th = kTau * static_cast<double>(j) / static_cast<double>(M_);
    factor_[j] = std::polar(1.0 / static_cast<double>(M_), -k * std::cos(th));
  }
}

double KickOperator::apply(cplx* amp) {
  cplx* buf = plan_.data();
  const auto M = static_cast<long>(M_);
  std::fill(buf, buf + M_, cplx{});
  for (int l = -L_; l <= L_; ++l) buf[(l + M) % M] = amp[l + L_];
  plan_.backward();
  for (std::size_t j = 0; j < M_; ++j) buf[j] *= factor_[j];
  plan_.forward();
  for (int l = -L_; l <= L_; ++l) amp[l + L_] = buf[(l + M) % M];
  double out = 0.0;
  for (long i = L_ + 1; i < M - L_; ++i) out += std::norm(buf[i]);
  return out;
}

RotorWavefunction RotorWavefunction::basis(int L, int l0) {
  if (l0 < -L || l0 > L) throw std::invalid_argument("initial l outside basis");
  RotorWavefunction w;
  w.L = L;
  w.psi.assign(2 * static_cast<std::size_t>(L) + 1, cplx{});
  w.psi[l0 + L] = 1.0;
  return w;
}

double RotorWavefunction::norm2() const {
  CompensatedSum s;
  for (const auto& a : psi) s += std::norm(a);
  return s.value();
}

double RotorWavefunction::energy(double hbar) const {
  CompensatedSum s;
  for (int l = -L; l <= L; ++l) s += static_cast<double>(l) * l * std::norm(psi[l + L]);
  return 0.5 * hbar * hbar * s.value();
}

std::vector<double> RotorWavefunction::probabilities() const {
  std::vector<double> P(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) P[i] = std::norm(psi[i]);
  return P;
}

double RotorWavefunction::edge_mass() const { return std::norm(psi.front()) + std::norm(psi.back()); }

RotorWavefunction RotorWavefunction::resized(int L_new) const {
  RotorWavefunction w;
  w.L = L_new;
  w.psi.assign(2 * static_cast<std::size_t>(L_new) + 1, cplx{});
  for (int l = -std::min(L, L_new); l <= std::min(L, L_new); ++l) w.psi[l + L_new] = psi[l + L];
  return w;
}

QkrPropagator::QkrPropagator(int L, const QkrParams& p, double leak_tol)
    : L_(L), leak_tol_(leak_tol), rot_(rotation_phases(L, p.hbar, p.literal_phase)), kick_(L, p.k()) {
  if (!(p.hbar > 0.0)) throw std::domain_error("hbar must be positive");
}

void QkrPropagator::step(RotorWavefunction& psi) {
  if (psi.L != L_) throw std::invalid_argument("wavefunction basis does not match propagator");
  for (std::size_t i = 0; i < rot_.size(); ++i) psi.psi[i] *= rot_[i];
  const double out = kick_.apply(psi.psi.data());
  const double edge = psi.edge_mass();
  if (out > leak_tol_ || edge > leak_tol_) {
    throw LeakageError("rotor basis L=" + std::to_string(L_) + " leaks: edge " + std::to_string(edge) +
                       ", outflow " + std::to_string(out));
  }
}

RotorWavefunction floquet_step(const RotorWavefunction& psi, const QkrParams& p) {
  QkrPropagator prop(psi.L, p, 1.0);
  RotorWavefunction out = psi;
  prop.step(out);
  return out;
}

ComplexMatrix floquet_matrix(int L, const QkrParams& p) {
  const int d = 2 * L + 1;
  ComplexMatrix U(d, d);
  QkrPropagator prop(L, p, 1.0);
  for (int c = 0; c < d; ++c) {
    auto w = RotorWavefunction::basis(L, c - L);
    prop.step(w);
    for (int r = 0; r < d; ++r) U(r, c) = w.psi[r];
  }
  return U;
}

int default_L(const QkrParams& p) {
  const double k = p.k();
  const double est = 0.25 * k * k;
  return std::max(512, static_cast<int>(std::ceil(8.0 * est)));
}

QkrRun evolve(const RotorWavefunction& psi0, const QkrParams& p, std::size_t n_steps, int max_L) {
  if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
  QkrRun run;
  int L = psi0.L;
  for (;;) {
    try {
      QkrPropagator prop(L, p);
      RotorWavefunction psi = psi0.resized(L);
      run.energy.assign(1, psi.energy(p.hbar));
      run.energy.reserve(n_steps + 1);
      for (std::size_t n = 0; n < n_steps; ++n) {
        prop.step(psi);
        run.energy.push_back(psi.energy(p.hbar));
      }
      run.P = psi.probabilities();
      run.L = L;
      return run;
    } catch (const LeakageError&) {
      if (2 * L > max_L) throw;
      L *= 2;
      ++run.enlargements;
    }
  }
}

LocalizationFit localization_length(const std::vector<double>& P, int L) {
  if (P.size() != 2 * static_cast<std::size_t>(L) + 1) throw std::invalid_argument("P length must be 2L+1");
  const double pmax = *std::max_element(P.begin(), P.end());
  if (!(pmax > 0.0)) throw std::invalid_argument("P is identically zero");
  // Center: probability-weighted mean.
  double lc = 0.0, tot = 0.0;
  for (int l = -L; l <= L; ++l) {
    lc += l * P[l + L];
    tot += P[l + L];
  }
  lc /= tot;
  const double floor = 1e-25 * pmax;
  double dmax = 0.0;
  for (int l = -L; l <= L; ++l) {
    if (P[l + L] > floor) dmax = std::max(dmax, std::abs(l - lc));
  }
  const double d0 = 0.2 * dmax, d1 = 0.9 * dmax;
  std::vector<double> xs, ys;
  for (int l = -L; l <= L; ++l) {
    const double d = std::abs(l - lc);
    if (P[l + L] > floor && d >= d0 && d <= d1) {
      xs.push_back(d);
      ys.push_back(std::log(P[l + L]));
    }
  }
  LocalizationFit f;
  f.center = lc;
  f.points = xs.size();
  if (xs.size() < 3) return f;
  const double m = static_cast<double>(xs.size());
  double xm = 0, ym = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xm += xs[i];
    ym += ys[i];
  }
  xm /= m;
  ym /= m;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - xm) * (xs[i] - xm);
    sxy += (xs[i] - xm) * (ys[i] - ym);
    syy += (ys[i] - ym) * (ys[i] - ym);
  }
  if (sxx <= 0.0 || syy <= 0.0) return f;
  const double slope = sxy / sxx;
  f.length = slope < 0.0 ? -1.0 / slope : 0.0;
  f.r2 = sxy * sxy / (sxx * syy);
  f.good = slope < 0.0 && f.r2 >= 0.8;
  return f;
}

CrossoverTimes crossover_estimates(double K, double hbar) {
  if (!(K > 0.0) || !(hbar > 0.0)) throw std::domain_error("K and hbar must be positive");
  const double pi = std::numbers::pi;
  return {4.0 * K * K / (pi * std::numbers::e), K * K / (2.0 * pi * pi * hbar * hbar)};
}

}  // namespace chaosflow
