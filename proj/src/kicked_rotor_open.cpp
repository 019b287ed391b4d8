#include "chaosflow/kicked_rotor_open.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace chaosflow {

namespace {
constexpr double kTau = 2.0 * std::numbers::pi;
}

double BesselKickKernel::completeness() const {
  CompensatedSum s;
  for (const auto& v : b) s += std::norm(v);
  return s.value();
}

BesselKickKernel bessel_coeffs(double k, int n_cut) {
  if (n_cut < std::abs(k) + 40.0) {
    throw std::invalid_argument("Bessel cutoff n_cut=" + std::to_string(n_cut) + " below k+40");
  }
  BesselKickKernel ker;
  ker.k = k;
  ker.n_cut = n_cut;
  ker.b.resize(2 * static_cast<std::size_t>(n_cut) + 1);
  const cplx i_pow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (int n = 0; n <= n_cut; ++n) {
    const double jn = std::cyl_bessel_j(static_cast<double>(n), std::abs(k));
    // J_n(−x) = (−1)ⁿ J_n(x)
    const double jk = (k < 0.0 && n % 2 == 1) ? -jn : jn;
    ker.b[n + n_cut] = i_pow[n % 4] * jk;
    // J_{−n} = (−1)ⁿ J_n, i^{−n} = conj(iⁿ)
    const double jneg = n % 2 == 1 ? -jk : jk;
    ker.b[-n + n_cut] = std::conj(i_pow[n % 4]) * jneg;
  }
  return ker;
}

RotorDensity RotorDensity::basis(int L, int l0) {
  if (l0 < -L || l0 > L) throw std::invalid_argument("initial l outside basis");
  RotorDensity r;
  r.L = L;
  r.rho = ComplexMatrix::Zero(2 * L + 1, 2 * L + 1);
  r.rho(l0 + L, l0 + L) = 1.0;
  return r;
}

RotorDensity RotorDensity::from_pure(const RotorWavefunction& psi) {
  RotorDensity r;
  r.L = psi.L;
  const Eigen::Map<const ComplexVector> v(psi.psi.data(), static_cast<Eigen::Index>(psi.psi.size()));
  r.rho = v * v.adjoint();
  return r;
}

double RotorDensity::trace() const { return rho.trace().real(); }

double RotorDensity::energy(double hbar) const {
  CompensatedSum s;
  for (int l = -L; l <= L; ++l) s += static_cast<double>(l) * l * rho(l + L, l + L).real();
  return 0.5 * hbar * hbar * s.value();
}

double RotorDensity::mean_l() const {
  CompensatedSum s;
  for (int l = -L; l <= L; ++l) s += l * rho(l + L, l + L).real();
  return s.value();
}

std::vector<double> RotorDensity::diagonal() const {
  std::vector<double> d(2 * static_cast<std::size_t>(L) + 1);
  for (int i = 0; i <= 2 * L; ++i) d[i] = rho(i, i).real();
  return d;
}

double RotorDensity::edge_mass() const { return std::abs(rho(0, 0)) + std::abs(rho(2 * L, 2 * L)); }

RotorDensity RotorDensity::resized(int L_new) const {
  RotorDensity r;
  r.L = L_new;
  r.rho = ComplexMatrix::Zero(2 * L_new + 1, 2 * L_new + 1);
  const int c = std::min(L, L_new);
  r.rho.block(L_new - c, L_new - c, 2 * c + 1, 2 * c + 1) = rho.block(L - c, L - c, 2 * c + 1, 2 * c + 1);
  return r;
}

void decoherence_rotation_step(RotorDensity& r, const OpenRotorParams& p) {
  if (!(p.gamma >= 0.0)) throw std::domain_error("gamma must be >= 0");
  const int L = r.L;
  const auto ph = rotation_phases(L, p.hbar, p.literal_phase);
  const double off = std::exp(-p.gamma);
  std::vector<double> band;
  if (p.mode == MeasureMode::mean_l) {
    band.resize(4 * static_cast<std::size_t>(L) + 1);
    for (int d = -2 * L; d <= 2 * L; ++d) band[d + 2 * L] = std::exp(-p.gamma * static_cast<double>(d) * d);
  }
  for (int m = 0; m <= 2 * L; ++m) {
    const cplx pm = std::conj(ph[m]);
    for (int l = 0; l <= 2 * L; ++l) {
      double decay = 1.0;
      if (p.mode == MeasureMode::mean_l) {
        decay = band[l - m + 2 * L];
      } else if (l != m) {
        decay = off;
      }
      r.rho(l, m) *= ph[l] * pm * decay;
    }
  }
}

DensityKick::DensityKick(int L, double k)
    : L_(L), M_(kick_grid_size(L, kick_cutoff(k))), plan_(M_, M_), f_(M_) {
  for (std::size_t j = 0; j < M_; ++j) {
    const double th = kTau * static_cast<double>(j) / static_cast<double>(M_);
    f_[j] = std::polar(1.0 / static_cast<double>(M_), -k * std::cos(th));
  }
}

double DensityKick::apply(RotorDensity& r) {
  if (r.L != L_) throw std::invalid_argument("density basis does not match kick operator");
  const auto M = static_cast<long>(M_);
  cplx* buf = plan_.data();
  std::fill(buf, buf + M_ * M_, cplx{});
  // Row a = l mod M, column b = −m mod M: a single backward 2D transform then
  // yields ρ(θ, θ') = Σ ρ_lm e^{ilθ − imθ'}.
  for (int l = -L_; l <= L_; ++l) {
    const long a = (l + M) % M;
    for (int m = -L_; m <= L_; ++m) buf[a * M + (M - m) % M] = r.rho(l + L_, m + L_);
  }
  plan_.backward();
  for (long a = 0; a < M; ++a) {
    const cplx fa = f_[a];
    for (long b = 0; b < M; ++b) buf[a * M + b] *= fa * std::conj(f_[b]);
  }
  plan_.forward();
  for (int m = -L_; m <= L_; ++m) {
    const long b = (M - m) % M;
    for (int l = m; l <= L_; ++l) {
      const cplx v = buf[((l + M) % M) * M + b];
      r.rho(l + L_, m + L_) = v;
      r.rho(m + L_, l + L_) = std::conj(v);
    }
    r.rho(m + L_, m + L_) = r.rho(m + L_, m + L_).real();
  }
  double out = 0.0;
  for (long a = L_ + 1; a < M - L_; ++a) out += buf[a * M + (M - a) % M].real();
  return out;
}

double kick_step(RotorDensity& r, double k) {
  DensityKick kick(r.L, k);
  return kick.apply(r);
}

RotorDensity kick_step_direct(const RotorDensity& r, const BesselKickKernel& kernel) {
  const int L = r.L, d = 2 * L + 1;
  ComplexMatrix B(d, d);
  for (int l = -L; l <= L; ++l)
    for (int lp = -L; lp <= L; ++lp) B(l + L, lp + L) = std::conj(kernel(l - lp));
  RotorDensity out;
  out.L = L;
  out.rho = B * r.rho * B.adjoint();
  return out;
}

int default_substeps(double lambda, int L) {
  return std::max(1, static_cast<int>(std::ceil(4.0 * lambda * L)));
}

namespace {

void friction_euler(const ComplexMatrix& in, ComplexMatrix& out, int L, double h) {
  for (int m = -L; m <= L; ++m) {
    const int cm = m + L;
    for (int l = -L; l <= L; ++l) {
      const int cl = l + L;
      cplx rate = -0.5 * (std::abs(l) + std::abs(m)) * in(cl, cm);
      if (l >= 0 && m >= 0 && l < L && m < L) {
        rate += std::sqrt((l + 1.0) * (m + 1.0)) * in(cl + 1, cm + 1);
      }
      if (l <= 0 && m <= 0 && l > -L && m > -L) {
        rate += std::sqrt((1.0 - l) * (1.0 - m)) * in(cl - 1, cm - 1);
      }
      out(cl, cm) = in(cl, cm) + h * rate;
    }
  }
}

}  // namespace

int dissipative_substep(RotorDensity& r, double lambda, int n_sub) {
  if (!(lambda >= 0.0)) throw std::domain_error("lambda must be >= 0");
  if (lambda == 0.0) return 0;
  if (n_sub < 1) throw std::invalid_argument("n_sub must be >= 1");
  const ComplexMatrix start = r.rho;
  for (;;) {
    ComplexMatrix a = start, b(a.rows(), a.cols());
    const double h = lambda / n_sub;
    for (int s = 0; s < n_sub; ++s) {
      friction_euler(a, b, r.L, h);
      a.swap(b);
    }
    double worst = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) worst = std::min(worst, a(i, i).real());
    if (worst >= -1e-6) {
      r.rho = std::move(a);
      return n_sub;
    }
    if (n_sub > (1 << 20)) throw std::runtime_error("friction substeps cannot restore positivity");
    n_sub *= 2;
  }
}

OpenRun evolve_open(const RotorDensity& rho0, const OpenRotorParams& p, const OpenRunOptions& opt) {
  if (!(p.hbar > 0.0)) throw std::domain_error("hbar must be positive");
  OpenRun run;
  RotorDensity cur = rho0;
  int L = cur.L;
  DensityKick kick(L, p.k());
  int n_sub = default_substeps(p.lambda, L);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  run.energy.push_back(cur.energy(p.hbar));
  run.entropy.push_back(opt.entropy_every > 0 ? von_neumann_entropy(cur.rho) : nan);

  for (std::size_t n = 0; n < opt.n_steps;) {
    RotorDensity next = cur;
    int used = 0;
    if (p.lambda > 0.0) used = dissipative_substep(next, p.lambda, n_sub);
    decoherence_rotation_step(next, p);
    const double out = kick.apply(next);
    if (out > opt.leak_tol || next.edge_mass() > opt.leak_tol) {
      if (!opt.auto_enlarge || 2 * L > opt.max_L) {
        throw LeakageError("density basis L=" + std::to_string(L) + " leaks at step " + std::to_string(n + 1));
      }
      L *= 2;
      cur = cur.resized(L);
      kick = DensityKick(L, p.k());
      n_sub = default_substeps(p.lambda, L);
      ++run.enlargements;
      continue;
    }
    n_sub = std::max(n_sub, used);
    run.substeps = used;
    cur = std::move(next);
    ++n;
    run.energy.push_back(cur.energy(p.hbar));
    const bool want_s = opt.entropy_every > 0 && n % static_cast<std::size_t>(opt.entropy_every) == 0;
    run.entropy.push_back(want_s ? von_neumann_entropy(cur.rho) : nan);
    if (n >= 10 && n % 10 == 0) {
      const double e1 = run.energy[n], e0 = run.energy[n - 10];
      const double rel = std::abs(e1 - e0) / std::max(std::abs(e1), 1e-300);
      if (rel < opt.stationary_tol) {
        run.stationary = true;
        if (opt.stop_when_stationary) break;
      } else {
        run.stationary = false;
      }
    }
  }
  run.steps_done = run.energy.size() - 1;
  run.L = L;
  run.final_state = std::move(cur);
  return run;
}

NoisyMapComparison compare_with_noisy_map(const std::vector<double>& P_quantum, int L, double hbar,
                                          const std::vector<double>& p_classical) {
  if (P_quantum.size() != 2 * static_cast<std::size_t>(L) + 1) {
    throw std::invalid_argument("quantum distribution length must be 2L+1");
  }
  if (p_classical.empty()) throw std::invalid_argument("classical sample is empty");
  if (!(hbar > 0.0)) throw std::domain_error("hbar must be positive");
  std::vector<double> Pc(P_quantum.size(), 0.0);
  double outside = 0.0;
  const double w = 1.0 / static_cast<double>(p_classical.size());
  CompensatedSum ec;
  for (double p : p_classical) {
    ec += 0.5 * p * p;
    const double l = std::round(p / hbar);
    if (l < -L || l > L) {
      outside += w;
    } else {
      Pc[static_cast<std::size_t>(l + L)] += w;
    }
  }
  CompensatedSum tv, eq;
  for (int l = -L; l <= L; ++l) {
    tv += std::abs(P_quantum[l + L] - Pc[l + L]);
    eq += 0.5 * hbar * hbar * static_cast<double>(l) * l * P_quantum[l + L];
  }
  NoisyMapComparison c;
  c.tv_distance = 0.5 * (tv.value() + outside);
  c.E_quantum = eq.value();
  c.E_classical = ec.value() * w;
  c.energy_rel_diff = std::abs(c.E_quantum - c.E_classical) / std::max(std::abs(c.E_classical), 1e-300);
  return c;
}

NoiseSpec matching_noise(MeasureMode mode, double gamma) {
  if (mode == MeasureMode::full_Pl) return NoiseSpec::reset(NoiseSpec::nu_from_gamma(gamma));
  return NoiseSpec::gaussian(2.0 * gamma);
}

BandReport attractor_band_fraction(const WignerCylinder& W, const std::vector<RotorState>& attractor,
                                   double width) {
  if (attractor.empty()) throw std::invalid_argument("empty attractor sample");
  if (!(width > 0.0)) throw std::invalid_argument("band width must be positive");
  const int nt = W.n_theta;
  const double dth = W.dtheta();
  std::vector<std::vector<double>> cols(nt);
  for (const auto& s : attractor) {
    // Column k covers [θ_k − Δθ/2, θ_k + Δθ/2).
    const long k = static_cast<long>(std::floor(wrap_angle(s.theta) / dth + 0.5)) % nt;
    cols[k].push_back(s.p);
  }
  for (auto& c : cols) std::sort(c.begin(), c.end());

  // A cell is in the band if an attractor point lies within `width` of it in
  // the (θ, p) plane, θ measured around the circle and points snapped to columns.
  const int reach = std::min(nt / 2, static_cast<int>(std::floor(width / dth)));
  std::vector<double> half(reach + 1);
  for (int d = 0; d <= reach; ++d) half[d] = std::sqrt(std::max(0.0, width * width - d * dth * d * dth));

  BandReport rep;
  rep.attractor_points = attractor.size();
  CompensatedSum inside, total, pos;
  std::size_t cells_in = 0;
  for (int k = 0; k < nt; ++k) {
    for (int n = -2 * W.L; n <= 2 * W.L; ++n) {
      const double p = W.p(n), w = W.at(n, k) * dth;
      total += w;
      if (w > 0.0) pos += w;
      bool hit = false;
      for (int d = -reach; d <= reach && !hit; ++d) {
        const auto& c = cols[((k + d) % nt + nt) % nt];
        const double r = half[std::abs(d)];
        const auto it = std::lower_bound(c.begin(), c.end(), p - r);
        hit = it != c.end() && *it <= p + r;
      }
      if (hit) {
        inside += w;
        ++cells_in;
      }
    }
  }
  rep.fraction = inside.value() / total.value();
  rep.positive_mass = pos.value();
  rep.covered_area_fraction = static_cast<double>(cells_in) / (static_cast<double>(nt) * W.rows());
  return rep;
}

std::vector<RotorState> zaslavsky_attractor(double K, double lambda, std::size_t n_traj, int transient,
                                            int recorded, std::uint64_t seed) {
  std::vector<RotorState> out;
  out.reserve(n_traj * static_cast<std::size_t>(recorded));
  for (std::size_t i = 0; i < n_traj; ++i) {
    Rng rng = make_stream(seed, i);
    RotorState s{kTau * uniform01(rng), (2.0 * uniform01(rng) - 1.0) * K / (1.0 - std::exp(-lambda))};
    for (int t = 0; t < transient; ++t) s = zaslavsky_step(s, K, lambda);
    for (int t = 0; t < recorded; ++t) {
      s = zaslavsky_step(s, K, lambda);
      out.push_back(s);
    }
  }
  return out;
}

}  // namespace chaosflow
