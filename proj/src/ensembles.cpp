#include "chaosflow/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <thread>
#include <unordered_set>

namespace chaosflow {

Histogram1D Histogram1D::from_samples(std::span<const double> samples, double width) {
  if (!(width > 0.0)) throw std::domain_error("histogram bin width must be positive");
  if (samples.empty()) throw std::invalid_argument("histogram needs at least one sample");
  const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
  Histogram1D h;
  h.width = width;
  const double k0 = std::floor(*mn / width);
  h.lo = k0 * width;
  const auto nb = static_cast<std::size_t>(std::floor(*mx / width) - k0) + 1;
  h.counts.assign(nb, 0);
  for (double s : samples) {
    auto i = static_cast<std::int64_t>(std::floor(s / width) - k0);
    i = std::clamp<std::int64_t>(i, 0, static_cast<std::int64_t>(nb) - 1);
    ++h.counts[static_cast<std::size_t>(i)];
  }
  h.total = static_cast<std::int64_t>(samples.size());
  return h;
}

double shannon_entropy(const Histogram1D& h, double c, double d_p) {
  if (!(d_p > 0.0)) throw std::domain_error("resolution d_p must be positive");
  if (h.total <= 0) throw std::invalid_argument("empty histogram");
  CompensatedSum acc;
  for (auto n : h.counts) {
    if (n == 0) continue;
    const double prob = static_cast<double>(n) / static_cast<double>(h.total);
    const double q = prob / h.width;
    acc.add(prob * std::log(d_p * q));
  }
  return -c * acc.value();
}

namespace {

double entropy_of_counts(const std::vector<std::size_t>& counts, std::size_t total, double c) {
  CompensatedSum acc;
  for (auto n : counts) {
    if (n == 0) continue;
    const double P = static_cast<double>(n) / static_cast<double>(total);
    acc.add(P * std::log(P));
  }
  return -c * acc.value();
}

std::size_t cell_of(double v, double lo, double hi, int n) {
  auto i = static_cast<long>(std::floor((v - lo) / (hi - lo) * n));
  return static_cast<std::size_t>(std::clamp<long>(i, 0, n - 1));
}

}  // namespace

double coarse_entropy_2d(std::span<const PhasePoint> pts, int n, double c) {
  if (n < 1) throw std::invalid_argument("grid size must be positive");
  if (pts.empty()) throw std::invalid_argument("no points");
  std::vector<std::size_t> counts(static_cast<std::size_t>(n) * n, 0);
  for (const auto& pt : pts) {
    ++counts[cell_of(pt.p, 0.0, 1.0, n) * n + cell_of(pt.x, 0.0, 1.0, n)];
  }
  return entropy_of_counts(counts, pts.size(), c);
}

double coarse_entropy_2d(std::span<const double> xs, std::span<const double> ys, double x0,
                         double x1, double y0, double y1, int n, double c) {
  if (xs.size() != ys.size()) throw std::invalid_argument("coordinate arrays differ in length");
  if (n < 1) throw std::invalid_argument("grid size must be positive");
  std::vector<std::size_t> counts(static_cast<std::size_t>(n) * n, 0);
  std::size_t kept = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (xs[k] < x0 || xs[k] >= x1 || ys[k] < y0 || ys[k] >= y1) continue;
    ++counts[cell_of(ys[k], y0, y1, n) * n + cell_of(xs[k], x0, x1, n)];
    ++kept;
  }
  if (kept == 0) throw std::invalid_argument("no points inside the window");
  return entropy_of_counts(counts, kept, c);
}

std::size_t occupied_cells(std::span<const PhasePoint> pts, int n) {
  std::vector<char> hit(static_cast<std::size_t>(n) * n, 0);
  for (const auto& pt : pts) hit[cell_of(pt.p, 0.0, 1.0, n) * n + cell_of(pt.x, 0.0, 1.0, n)] = 1;
  return static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1));
}

DiffusionFit fit_diffusion(std::span<const double> series, std::size_t n0, std::size_t n1) {
  if (series.size() < 10) throw std::invalid_argument("diffusion fit needs at least 10 points");
  if (n1 >= series.size() || n1 <= n0) throw std::invalid_argument("degenerate fit window");
  const auto m = static_cast<double>(n1 - n0 + 1);
  CompensatedSum sx, sy;
  for (std::size_t n = n0; n <= n1; ++n) {
    sx += static_cast<double>(n);
    sy += series[n];
  }
  const double xm = sx.value() / m, ym = sy.value() / m;
  CompensatedSum sxx, sxy;
  for (std::size_t n = n0; n <= n1; ++n) {
    const double dx = static_cast<double>(n) - xm;
    sxx += dx * dx;
    sxy += dx * (series[n] - ym);
  }
  DiffusionFit f;
  f.n0 = n0;
  f.n1 = n1;
  f.slope = sxy.value() / sxx.value();
  f.intercept = ym - f.slope * xm;
  CompensatedSum ss;
  for (std::size_t n = n0; n <= n1; ++n) {
    const double r = series[n] - (f.slope * static_cast<double>(n) + f.intercept);
    ss += r * r;
  }
  f.residual = std::sqrt(ss.value() / m);
  f.slope_stderr = m > 2 ? std::sqrt(ss.value() / (m - 2) / sxx.value()) : 0.0;
  return f;
}

DiffusionFit fit_diffusion(std::span<const double> series) {
  if (series.size() < 10) throw std::invalid_argument("diffusion fit needs at least 10 points");
  return fit_diffusion(series, 0, series.size() - 1);
}

namespace {

constexpr std::size_t kChunk = 4096;

struct ChunkMoments {
  std::vector<CompensatedSum> s1, s2;
  std::vector<std::map<std::int64_t, std::int64_t>> bins;
};

RotorState sample_initial(const InitSpec& init, Rng& rng) {
  switch (init.kind) {
    case InitSpec::Kind::fixed_p_uniform_theta:
      return {kTwoPi * uniform01(rng), init.p0};
    case InitSpec::Kind::point:
      return {wrap_angle(init.theta0), init.p0};
    case InitSpec::Kind::gaussian: {
      const double p = init.p0 + init.sigma_p * standard_normal(rng);
      const double th = init.theta0 + init.sigma_theta * standard_normal(rng);
      return {wrap_angle(th), p};
    }
  }
  return {};
}

RotorState advance(MapId map, const EnsembleParams& prm, RotorState s, Rng& rng) {
  switch (map) {
    case MapId::standard:
      return standard_map_step(s, prm.K);
    case MapId::zaslavsky:
      return zaslavsky_step(s, prm.K, prm.lambda);
    case MapId::noisy:
      return noisy_standard_step(s, prm.K, prm.noise, prm.lambda, rng);
  }
  return s;
}

}  // namespace

EnsembleResult evolve_ensemble(MapId map, const EnsembleParams& params, const InitSpec& init,
                               const EnsembleOptions& opt) {
  if (opt.n_traj < 1) throw std::invalid_argument("n_traj must be >= 1");
  if (!(params.lambda >= 0.0)) throw std::domain_error("lambda must be >= 0");
  params.noise.validate();
  const std::size_t steps = opt.n_steps + 1;
  const std::size_t n_chunks = (opt.n_traj + kChunk - 1) / kChunk;
  const bool want_entropy = opt.entropy_dp > 0.0;

  EnsembleResult res;
  res.final_cloud.resize(opt.n_traj);
  std::vector<ChunkMoments> chunks(n_chunks);

  auto run_chunk = [&](std::size_t c) {
    auto& cm = chunks[c];
    cm.s1.assign(steps, {});
    cm.s2.assign(steps, {});
    if (want_entropy) cm.bins.assign(steps, {});
    const std::size_t lo = c * kChunk, hi = std::min(opt.n_traj, lo + kChunk);
    for (std::size_t i = lo; i < hi; ++i) {
      Rng rng = make_stream(opt.seed, i);
      RotorState s = sample_initial(init, rng);
      for (std::size_t n = 0; n < steps; ++n) {
        if (n > 0) s = advance(map, params, s, rng);
        cm.s1[n] += s.p;
        cm.s2[n] += s.p * s.p;
        if (want_entropy) ++cm.bins[n][static_cast<std::int64_t>(std::floor(s.p / opt.entropy_dp))];
      }
      res.final_cloud[i] = s;
    }
  };

  const unsigned nt = std::max(1u, std::min<unsigned>(opt.threads, static_cast<unsigned>(n_chunks)));
  if (nt == 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) run_chunk(c);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nt; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t c = t; c < n_chunks; c += nt) run_chunk(c);
      });
    }
    for (auto& th : pool) th.join();
  }

  const auto N = static_cast<double>(opt.n_traj);
  res.mean_p.resize(steps);
  res.var_p.resize(steps);
  if (want_entropy) res.entropy.resize(steps);
  for (std::size_t n = 0; n < steps; ++n) {
    CompensatedSum a, b;
    std::map<std::int64_t, std::int64_t> merged;
    for (const auto& cm : chunks) {
      a += cm.s1[n].value();
      b += cm.s2[n].value();
      if (want_entropy) {
        for (const auto& [k, v] : cm.bins[n]) merged[k] += v;
      }
    }
    const double m = a.value() / N;
    res.mean_p[n] = m;
    res.var_p[n] = std::max(0.0, b.value() / N - m * m);
    if (want_entropy) {
      Histogram1D h;
      h.width = opt.entropy_dp;
      h.lo = static_cast<double>(merged.begin()->first) * opt.entropy_dp;
      for (const auto& kv : merged) h.counts.push_back(kv.second);
      h.total = static_cast<std::int64_t>(opt.n_traj);
      res.entropy[n] = shannon_entropy(h, opt.entropy_c, opt.entropy_dp);
    }
  }
  return res;
}

double FPGrid::mass() const {
  CompensatedSum s;
  for (double r : rho) s += r * dp;
  return s.value();
}

double FPGrid::mean() const {
  CompensatedSum s;
  for (std::size_t i = 0; i < rho.size(); ++i) s += p(i) * rho[i] * dp;
  return s.value() / mass();
}

double FPGrid::variance() const {
  const double m = mean();
  CompensatedSum s;
  for (std::size_t i = 0; i < rho.size(); ++i) s += (p(i) - m) * (p(i) - m) * rho[i] * dp;
  return s.value() / mass();
}

FPGrid fokker_planck_evolve(const FPGrid& rho0, double D, double lambda, double dt, double T,
                            FPOptions opt) {
  if (!(D >= 0.0)) throw std::domain_error("diffusion coefficient must be >= 0");
  if (!(lambda >= 0.0)) throw std::domain_error("lambda must be >= 0");
  if (!(dt > 0.0) || !(T >= 0.0)) throw std::domain_error("dt must be > 0 and T >= 0");
  const std::size_t n = rho0.rho.size();
  if (n < 3) throw std::invalid_argument("grid needs at least 3 cells");
  const double h = rho0.dp;

  // Face quantities at p_{i+1/2}, i = 0..n-2: velocity v and diffusivity d.
  std::vector<double> v(n - 1), d(n - 1);
  double dmax = 0.0, vmax = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double pf = rho0.p(i) + 0.5 * h;
    if (opt.literal) {
      v[i] = -(1.0 - lambda);
      d[i] = D + (1.0 - lambda) * (1.0 - lambda) * pf * pf;
    } else {
      v[i] = -lambda * pf;
      d[i] = D;
    }
    dmax = std::max(dmax, d[i]);
    vmax = std::max(vmax, std::abs(v[i]));
  }
  if (dmax > 0.0 && dt > 0.4 * h * h / dmax) {
    throw std::domain_error("dt exceeds the diffusive stability bound 0.4*dp^2/D");
  }
  if (vmax * dt > 0.5 * h) throw std::domain_error("dt exceeds the advective stability bound");

  FPGrid out = rho0;
  std::vector<double> flux(n - 1);
  const auto steps = static_cast<std::size_t>(std::llround(T / dt));
  for (std::size_t s = 0; s < steps; ++s) {
    auto& r = out.rho;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double up = v[i] > 0.0 ? r[i] : r[i + 1];
      flux[i] = v[i] * up - d[i] * (r[i + 1] - r[i]) / h;
    }
    r[0] -= dt / h * flux[0];
    for (std::size_t i = 1; i + 1 < n; ++i) r[i] -= dt / h * (flux[i] - flux[i - 1]);
    r[n - 1] += dt / h * flux[n - 2];
  }
  return out;
}

BoxCountResult box_counting_dimension(std::span<const PhasePoint> pts, std::span<const double> scales) {
  if (pts.size() < 10000) throw std::invalid_argument("box counting needs at least 1e4 points");
  if (scales.size() < 4) throw std::invalid_argument("box counting needs at least 4 scales");
  const auto [smin, smax] = std::minmax_element(scales.begin(), scales.end());
  if (*smax / *smin < 100.0 - 1e-9) throw std::invalid_argument("scales must span two decades");

  BoxCountResult r;
  std::vector<double> lx, ly;
  for (double eps : scales) {
    if (!(eps > 0.0 && eps <= 1.0)) throw std::domain_error("scale outside (0,1]");
    const auto nb = static_cast<std::uint64_t>(std::ceil(1.0 / eps));
    std::size_t count = 0;
    if (nb <= 8192) {
      std::vector<char> hit(nb * nb, 0);
      for (const auto& pt : pts) {
        const auto ix = std::min<std::uint64_t>(static_cast<std::uint64_t>(pt.x / eps), nb - 1);
        const auto iy = std::min<std::uint64_t>(static_cast<std::uint64_t>(pt.p / eps), nb - 1);
        hit[iy * nb + ix] = 1;
      }
      count = static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1));
    } else {
      std::unordered_set<std::uint64_t> hit;
      for (const auto& pt : pts) {
        hit.insert(static_cast<std::uint64_t>(pt.p / eps) * nb + static_cast<std::uint64_t>(pt.x / eps));
      }
      count = hit.size();
    }
    r.scales.push_back(eps);
    r.counts.push_back(count);
    lx.push_back(std::log(1.0 / eps));
    ly.push_back(std::log(static_cast<double>(count)));
  }
  const double m = static_cast<double>(lx.size());
  double xm = 0, ym = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    xm += lx[i];
    ym += ly[i];
  }
  xm /= m;
  ym /= m;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - xm) * (lx[i] - xm);
    sxy += (lx[i] - xm) * (ly[i] - ym);
  }
  r.dimension = sxy / sxx;
  double ss = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double e = ly[i] - (ym + r.dimension * (lx[i] - xm));
    ss += e * e;
  }
  r.residual = std::sqrt(ss / m);
  return r;
}

std::vector<PhasePoint> dissipative_baker_cloud(std::size_t n_points, double a, int transient,
                                                int recorded, std::uint64_t seed) {
  if (transient < 0 || recorded < 1) throw std::invalid_argument("bad iteration counts");
  Rng rng(derive_seed(seed, 0));
  std::vector<PhasePoint> cur(n_points);
  for (auto& pt : cur) pt = {uniform01(rng), uniform01(rng)};
  for (int k = 0; k < transient; ++k) {
    for (auto& pt : cur) pt = dissipative_baker_step(pt, a);
  }
  std::vector<PhasePoint> out;
  out.reserve(n_points * static_cast<std::size_t>(recorded));
  for (int k = 0; k < recorded; ++k) {
    for (auto& pt : cur) {
      pt = dissipative_baker_step(pt, a);
      out.push_back(pt);
    }
  }
  return out;
}

}  // namespace chaosflow
