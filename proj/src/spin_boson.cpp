#include "chaosflow/spin_boson.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

namespace chaosflow {

SpinBosonSystem SpinBosonSystem::rabi(double omega0, double omega1, double g, int n_max) {
  SpinBosonSystem s;
  s.N = 1;
  s.omega0 = omega0;
  s.omega = {omega1};
  s.g = {g};
  s.n_max = n_max;
  s.validate();
  return s;
}

SpinBosonSystem SpinBosonSystem::ladder(int N, double omega0, double omega_c, double g, int n_max) {
  if (N < 1) throw std::invalid_argument("mode count must be >= 1");
  SpinBosonSystem s;
  s.N = N;
  s.omega0 = omega0;
  s.n_max = n_max;
  for (int n = 1; n <= N; ++n) {
    s.omega.push_back(omega_c * n / N);
    s.g.push_back(g / std::sqrt(static_cast<double>(N)));
  }
  s.validate();
  return s;
}

void SpinBosonSystem::validate() const {
  if (N < 1) throw std::invalid_argument("mode count must be >= 1");
  if (static_cast<int>(omega.size()) != N || static_cast<int>(g.size()) != N) {
    throw std::invalid_argument("need one frequency and one coupling per mode");
  }
  for (double w : omega) {
    if (!(w > 0.0)) throw std::domain_error("mode frequencies must be positive");
  }
  if (!(omega0 >= 0.0)) throw std::domain_error("omega0 must be >= 0");
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  double d = 2.0;
  for (int j = 0; j < N; ++j) d *= (n_max + 1);
  if (d > static_cast<double>(max_dim)) {
    throw std::length_error("spin-boson dimension " + std::to_string(d) + " exceeds the memory budget");
  }
}

std::size_t SpinBosonSystem::boson_dim() const {
  std::size_t b = 1;
  for (int j = 0; j < N; ++j) b *= static_cast<std::size_t>(n_max + 1);
  return b;
}

namespace {

// Occupation of mode j in boson index b.
int occupation(std::size_t b, int j, int n_max) {
  for (int i = 0; i < j; ++i) b /= static_cast<std::size_t>(n_max + 1);
  return static_cast<int>(b % static_cast<std::size_t>(n_max + 1));
}

std::size_t stride(int j, int n_max) {
  std::size_t s = 1;
  for (int i = 0; i < j; ++i) s *= static_cast<std::size_t>(n_max + 1);
  return s;
}

}  // namespace

SparseRealMatrix build_hamiltonian_sparse(const SpinBosonSystem& sys) {
  sys.validate();
  const std::size_t B = sys.boson_dim(), D = 2 * B;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(D * (2 + 2 * sys.N));
  for (std::size_t b = 0; b < B; ++b) {
    double e0 = 0.0;
    for (int j = 0; j < sys.N; ++j) e0 += sys.omega[j] * (occupation(b, j, sys.n_max) + 0.5);
    for (int s = 0; s < 2; ++s) {
      const auto i = static_cast<Eigen::Index>(s * B + b);
      trip.emplace_back(i, i, e0);
      // (ω0/2) σx couples ↑ and ↓ with the same boson configuration.
      trip.emplace_back(i, static_cast<Eigen::Index>((1 - s) * B + b), 0.5 * sys.omega0);
      const double sz = s == 0 ? 1.0 : -1.0;
      for (int j = 0; j < sys.N; ++j) {
        const int n = occupation(b, j, sys.n_max);
        if (n < sys.n_max) {
          // ⟨n+1| a† |n⟩ = √(n+1), plus its transpose.
          const auto k = static_cast<Eigen::Index>(s * B + b + stride(j, sys.n_max));
          const double v = sz * sys.g[j] * std::sqrt(n + 1.0);
          trip.emplace_back(k, i, v);
          trip.emplace_back(i, k, v);
        }
      }
    }
  }
  SparseRealMatrix H(static_cast<Eigen::Index>(D), static_cast<Eigen::Index>(D));
  H.setFromTriplets(trip.begin(), trip.end());
  return H;
}

ComplexMatrix build_hamiltonian(const SpinBosonSystem& sys) {
  return ComplexMatrix(build_hamiltonian_sparse(sys).cast<cplx>());
}

SparseRealMatrix parity_operator(const SpinBosonSystem& sys) {
  const std::size_t B = sys.boson_dim();
  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t b = 0; b < B; ++b) {
    int tot = 0;
    for (int j = 0; j < sys.N; ++j) tot += occupation(b, j, sys.n_max);
    const double sign = tot % 2 == 0 ? 1.0 : -1.0;
    trip.emplace_back(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(B + b), sign);
    trip.emplace_back(static_cast<Eigen::Index>(B + b), static_cast<Eigen::Index>(b), sign);
  }
  SparseRealMatrix P(static_cast<Eigen::Index>(2 * B), static_cast<Eigen::Index>(2 * B));
  P.setFromTriplets(trip.begin(), trip.end());
  return P;
}

double parity_expectation(const SpinBosonSystem& sys, const ComplexVector& psi) {
  const ComplexVector v = parity_operator(sys).cast<cplx>() * psi;
  return psi.dot(v).real();
}

ComplexVector initial_state(const SpinBosonSystem& sys, int sign, const ComplexVector& c) {
  sys.validate();
  if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +1 or -1");
  if (std::abs(c.squaredNorm() - 1.0) > 1e-10) throw std::invalid_argument("boson coefficients not normalized");
  if (c.size() > sys.n_max + 1) throw std::invalid_argument("boson coefficients exceed n_max");
  const std::size_t B = sys.boson_dim();
  ComplexVector psi = ComplexVector::Zero(static_cast<Eigen::Index>(2 * B));
  const double r = 1.0 / std::sqrt(2.0);
  for (Eigen::Index a = 0; a < c.size(); ++a) {
    psi(a) = sign * r * c(a);                              // ↑
    psi(static_cast<Eigen::Index>(B) + a) = r * c(a);      // ↓
  }
  return psi;
}

ComplexVector embed_state(const SpinBosonSystem& from, const SpinBosonSystem& to, const ComplexVector& psi) {
  if (from.N != to.N || to.n_max < from.n_max) throw std::invalid_argument("cannot embed into a smaller basis");
  const std::size_t Bf = from.boson_dim(), Bt = to.boson_dim();
  ComplexVector out = ComplexVector::Zero(static_cast<Eigen::Index>(2 * Bt));
  for (std::size_t b = 0; b < Bf; ++b) {
    std::size_t bt = 0;
    for (int j = 0; j < from.N; ++j) bt += occupation(b, j, from.n_max) * stride(j, to.n_max);
    for (int s = 0; s < 2; ++s) out(static_cast<Eigen::Index>(s * Bt + bt)) = psi(static_cast<Eigen::Index>(s * Bf + b));
  }
  return out;
}

std::vector<double> top_level_occupation(const SpinBosonSystem& sys, const ComplexVector& psi) {
  const std::size_t B = sys.boson_dim();
  std::vector<double> top(sys.N, 0.0);
  for (std::size_t b = 0; b < B; ++b) {
    const double w = std::norm(psi(static_cast<Eigen::Index>(b))) + std::norm(psi(static_cast<Eigen::Index>(B + b)));
    for (int j = 0; j < sys.N; ++j) {
      if (occupation(b, j, sys.n_max) == sys.n_max) top[j] += w;
    }
  }
  return top;
}

ComplexMatrix reduced_spin(const SpinBosonSystem& sys, const ComplexVector& psi) {
  const auto B = static_cast<Eigen::Index>(sys.boson_dim());
  const auto up = psi.head(B), dn = psi.tail(B);
  ComplexMatrix r(2, 2);
  r(0, 0) = up.squaredNorm();
  r(1, 1) = dn.squaredNorm();
  r(0, 1) = dn.dot(up);  // Σ ψ↑ ψ↓*
  r(1, 0) = std::conj(r(0, 1));
  return r;
}

SpinDiagnostics spin_diagnostics(const SpinBosonSystem& sys, const ComplexVector& psi, double c) {
  const ComplexMatrix r = reduced_spin(sys, psi);
  SpinDiagnostics d;
  d.a = bloch_vector(r);
  d.purity = purity(r);
  d.entropy = von_neumann_entropy(r, c);
  return d;
}

DensePropagator::DensePropagator(const ComplexMatrix& H) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(H);
  if (es.info() != Eigen::Success) throw std::runtime_error("Hamiltonian diagonalization failed");
  E_ = es.eigenvalues();
  V_ = es.eigenvectors();
}

ComplexVector DensePropagator::evolve(const ComplexVector& psi0, double t) const {
  ComplexVector c = V_.adjoint() * psi0;
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) *= std::polar(1.0, -E_(i) * t);
  return V_ * c;
}

KrylovPropagator::KrylovPropagator(SparseRealMatrix H, int krylov_dim, double tol)
    : H_(std::move(H)), m_(krylov_dim), tol_(tol) {
  if (m_ < 2) throw std::invalid_argument("Krylov dimension must be >= 2");
}

ComplexVector KrylovPropagator::step(const ComplexVector& psi, double t) const {
  const double nrm = psi.norm();
  if (nrm == 0.0) return psi;
  const Eigen::Index n = psi.size();
  const int m = static_cast<int>(std::min<Eigen::Index>(m_, n));
  ComplexMatrix Q(n, m);
  Eigen::VectorXd alpha(m), beta(m);
  Q.col(0) = psi / nrm;
  int used = m;
  for (int j = 0; j < m; ++j) {
    ComplexVector w = H_.cast<cplx>() * Q.col(j);
    alpha(j) = Q.col(j).dot(w).real();
    w -= alpha(j) * Q.col(j);
    if (j > 0) w -= beta(j - 1) * Q.col(j - 1);
    // Full reorthogonalization; m is small.
    for (int k = 0; k <= j; ++k) w -= Q.col(k).dot(w) * Q.col(k);
    beta(j) = w.norm();
    if (j + 1 == m) break;
    if (beta(j) < 1e-13) {
      used = j + 1;
      break;
    }
    Q.col(j + 1) = w / beta(j);
  }
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(used, used);
  for (int j = 0; j < used; ++j) {
    T(j, j) = alpha(j);
    if (j + 1 < used) T(j, j + 1) = T(j + 1, j) = beta(j);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
  ComplexVector y(used);
  for (int i = 0; i < used; ++i) y(i) = std::polar(1.0, -es.eigenvalues()(i) * t) * es.eigenvectors()(0, i);
  const ComplexVector coeff = es.eigenvectors().cast<cplx>() * y;
  return nrm * (Q.leftCols(used) * coeff);
}

void KrylovPropagator::advance(ComplexVector& psi, double t) const {
  double remaining = t, h = t;
  int halvings = 0;
  while (std::abs(remaining) > 1e-15 * std::abs(t)) {
    if (std::abs(h) > std::abs(remaining)) h = remaining;
    const ComplexVector one = step(psi, h);
    const ComplexVector two = step(step(psi, 0.5 * h), 0.5 * h);
    if ((one - two).norm() <= tol_) {
      psi = two;
      remaining -= h;
      h *= 1.5;
    } else {
      h *= 0.5;
      if (++halvings > 60) throw std::runtime_error("Krylov step size underflow");
    }
  }
}

SpinBosonRun evolve(const SpinBosonSystem& sys0, const ComplexVector& psi0_in, double dt, double T,
                    const EvolveOptions& opt) {
  if (!(dt > 0.0) || !(T >= 0.0)) throw std::domain_error("need dt > 0 and T >= 0");
  SpinBosonSystem sys = sys0;
  ComplexVector psi0 = psi0_in;
  int escalations = 0;
  const auto n_out = static_cast<std::size_t>(std::llround(T / dt));
  for (;;) {
    sys.validate();
    SpinBosonRun run;
    const SparseRealMatrix Hs = build_hamiltonian_sparse(sys);
    const SparseRealMatrix Pi = parity_operator(sys);
    const bool dense = !opt.force_krylov && sys.dim() <= 4096;
    std::unique_ptr<DensePropagator> dp;
    std::unique_ptr<KrylovPropagator> kp;
    if (dense) {
      dp = std::make_unique<DensePropagator>(ComplexMatrix(Hs.cast<cplx>()));
    } else {
      kp = std::make_unique<KrylovPropagator>(Hs);
    }
    ComplexVector psi = psi0;
    bool tripped = false;
    for (std::size_t k = 0; k <= n_out; ++k) {
      const double t = static_cast<double>(k) * dt;
      if (k > 0) {
        if (dense) {
          psi = dp->evolve(psi0, t);
        } else {
          kp->advance(psi, dt);
        }
      }
      const auto top = top_level_occupation(sys, psi);
      if (*std::max_element(top.begin(), top.end()) > opt.guard) {
        tripped = true;
        break;
      }
      const auto d = spin_diagnostics(sys, psi, opt.entropy_c);
      run.t.push_back(t);
      run.ax.push_back(d.a[0]);
      run.ay.push_back(d.a[1]);
      run.az.push_back(d.a[2]);
      run.purity.push_back(d.purity);
      run.entropy.push_back(d.entropy);
      run.parity.push_back(psi.dot(Pi.cast<cplx>() * psi).real());
      run.energy.push_back(psi.dot(Hs.cast<cplx>() * psi).real());
      run.norm.push_back(psi.norm());
    }
    if (!tripped) {
      run.system = sys;
      run.escalations = escalations;
      run.final_state = psi;
      return run;
    }
    if (!opt.auto_escalate) throw TruncationError("top Fock level occupation exceeds guard");
    SpinBosonSystem bigger = sys;
    bigger.n_max = sys.n_max + std::max(1, sys.n_max / 2);
    if (bigger.n_max > opt.max_n_max) throw TruncationError("n_max escalation limit reached");
    psi0 = embed_state(sys, bigger, psi0);
    sys = bigger;
    ++escalations;
  }
}

AppendixC appendix_c_oracles(const SpinBosonSystem& sys, const ComplexVector& c, int sign) {
  if (sys.N != 1) throw std::invalid_argument("Appendix C oracles need N = 1");
  if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +1 or -1");
  const double g = sys.g[0], w0 = sys.omega0, w1 = sys.omega[0];
  AppendixC r;
  const Eigen::Index n = c.size();
  for (Eigen::Index a = 0; a + 1 < n; ++a) {
    const cplx z = c(a + 1) * std::conj(c(a));
    r.S += std::sqrt(a + 1.0) * z.real();
    r.T += std::sqrt(a + 1.0) * z.imag();
  }
  for (Eigen::Index a = 0; a < n; ++a) r.X2 += (2.0 * a + 1.0) * std::norm(c(a));
  for (Eigen::Index a = 0; a + 2 < n; ++a) {
    r.X2 += 2.0 * std::sqrt((a + 1.0) * (a + 2.0)) * (c(a + 2) * std::conj(c(a))).real();
  }
  const double s = sign;
  r.rho_dot = s * 2.0 * g * r.S * pauli_y();
  r.rho_ddot = s * 2.0 * g * (w0 * r.S * pauli_z() + w1 * r.T * pauli_y()) - s * 2.0 * g * g * r.X2 * pauli_x();
  r.az_dot = 0.0;
  r.az_ddot = s * 2.0 * g * w0 * r.S;
  r.purity_dot = 0.0;
  r.purity_ddot = 4.0 * g * g * (4.0 * r.S * r.S - r.X2);
  return r;
}

FiniteDifferenceC appendix_c_finite_difference(const SpinBosonSystem& sys, const ComplexVector& c, int sign,
                                               double h) {
  const ComplexVector psi0 = initial_state(sys, sign, c);
  const DensePropagator prop(build_hamiltonian(sys));
  auto eval = [&](double t) {
    const auto d = spin_diagnostics(sys, prop.evolve(psi0, t));
    return std::pair{d.a[2], d.purity};
  };
  const auto f0 = eval(0.0);
  auto diffs = [&](double hh) {
    const auto fp = eval(hh), fm = eval(-hh);
    return std::array<double, 4>{(fp.first - fm.first) / (2 * hh),
                                 (fp.first - 2 * f0.first + fm.first) / (hh * hh),
                                 (fp.second - fm.second) / (2 * hh),
                                 (fp.second - 2 * f0.second + fm.second) / (hh * hh)};
  };
  const auto d1 = diffs(h), d2 = diffs(0.5 * h);
  std::array<double, 4> r{};
  for (int i = 0; i < 4; ++i) r[i] = (4.0 * d2[i] - d1[i]) / 3.0;
  return {r[0], r[1], r[2], r[3]};
}

SwitchingStats switching_statistics(const std::vector<double>& t, const std::vector<double>& a, double threshold) {
  if (!(threshold > 0.0 && threshold < 0.5)) throw std::domain_error("threshold must lie in (0, 1/2)");
  if (t.size() != a.size()) throw std::invalid_argument("time and value series differ in length");
  SwitchingStats st;
  int pol = 0;
  double start = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const int side = a[i] > threshold ? 1 : (a[i] < -threshold ? -1 : 0);
    if (side == 0 || side == pol) continue;
    if (pol != 0) {
      st.dwells.push_back({start, t[i], pol, true});
      ++st.flips;
    }
    pol = side;
    start = t[i];
  }
  if (pol != 0) st.dwells.push_back({start, t.back(), pol, false});
  double sum = 0.0;
  int nc = 0;
  for (const auto& d : st.dwells) {
    if (d.closed) {
      sum += d.t_end - d.t_start;
      ++nc;
    }
  }
  st.mean_closed_dwell = nc > 0 ? sum / nc : 0.0;
  return st;
}

double dephasing_coherence(const SpinBosonSystem& sys, double t) {
  double lg = 0.0;
  for (int j = 0; j < sys.N; ++j) {
    const double w = sys.omega[j], g = sys.g[j];
    lg += -4.0 * g * g * (1.0 - std::cos(w * t)) / (w * w);
  }
  return 0.5 * std::exp(lg);
}

}  // namespace chaosflow
