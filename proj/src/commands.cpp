#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>

#include "chaosflow/double_well.hpp"
#include "chaosflow/ensembles.hpp"
#include "chaosflow/experiment.hpp"
#include "chaosflow/kicked_rotor.hpp"
#include "chaosflow/kicked_rotor_open.hpp"
#include "chaosflow/maps_classical.hpp"
#include "chaosflow/quantum_baker.hpp"
#include "chaosflow/spin_boson.hpp"
#include "chaosflow/symbolic_dynamics.hpp"

namespace chaosflow {

namespace {

using Cfg = ExperimentConfig;

int as_int(const Cfg& c, const char* key, long long lo, long long hi) {
  const long long v = c.integer(key);
  if (v < lo || v > hi) {
    throw ConfigError("'" + std::string(key) + "' must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) +
                          "]",
                      key);
  }
  return static_cast<int>(v);
}

std::size_t as_size(const Cfg& c, const char* key, long long lo = 1) {
  const long long v = c.integer(key);
  if (v < lo) throw ConfigError("'" + std::string(key) + "' must be >= " + std::to_string(lo), key);
  return static_cast<std::size_t>(v);
}

double positive(const Cfg& c, const char* key) {
  const double v = c.real(key);
  if (!(v > 0.0)) throw ConfigError("'" + std::string(key) + "' must be positive", key);
  return v;
}

// Precedence: explicit hbar, explicit hbar-over-2pi, explicit hbar-frac,
// then the first nonzero default in the same order.
double resolve_hbar(const Cfg& c) {
  for (const char* k : {"hbar", "hbar-over-2pi", "hbar-frac"}) {
    if (!c.explicitly_set(k)) continue;
    const double v = positive(c, k);
    if (std::string(k) == "hbar") return v;
    return std::string(k) == "hbar-over-2pi" ? kTwoPi * v : hbar_from_golden_fraction(v);
  }
  if (c.real("hbar") > 0.0) return c.real("hbar");
  if (c.real("hbar-over-2pi") > 0.0) return kTwoPi * c.real("hbar-over-2pi");
  return hbar_from_golden_fraction(positive(c, "hbar-frac"));
}

double gamma_of_nu(const Cfg& c) {
  const double nu = c.real("nu");
  if (!(nu >= 0.0 && nu < 1.0)) throw ConfigError("'nu' must lie in [0, 1)", "nu");
  return NoiseSpec::gamma_from_nu(nu);
}

double classical_energy(const EnsembleResult& r, std::size_t n) {
  return 0.5 * (r.var_p[n] + r.mean_p[n] * r.mean_p[n]);
}

void run_bernoulli(const Cfg& c, RunContext& ctx) {
  const int N = as_int(c, "bits", 1, kMaxBits);
  const std::size_t steps = as_size(c, "steps", 0);
  double x = c.real("x0");
  if (!(x >= 0.0 && x < 1.0)) throw ConfigError("'x0' must lie in [0, 1)", "x0");
  BitCode code = encode_binary(x, N);
  Rng rng = make_stream(c.seed(), 0);
  auto& out = ctx.csv("orbit.csv", {"n", "x_float", "x_code", "bit_out", "bit_in"});
  out.row({0.0, x, decode_binary(code), NAN, NAN});
  std::size_t first_zero = steps + 1;
  for (std::size_t n = 1; n <= steps; ++n) {
    x = bernoulli_step(x);
    const int in = static_cast<int>(rng() >> 63);
    const auto [next, bit] = shift_step(code, ShiftDirection::up, in);
    code = next;
    out.row({static_cast<double>(n), x, decode_binary(code), static_cast<double>(bit), static_cast<double>(in)});
    if (x == 0.0 && first_zero > steps) first_zero = n;
  }
  ctx.note("float_orbit_zero_at", first_zero > steps ? NAN : static_cast<double>(first_zero));
}

std::vector<PhasePoint> initial_cloud(const Cfg& c, std::size_t n) {
  Rng rng = make_stream(c.seed(), 0);
  std::vector<PhasePoint> pts(n);
  const bool strip = c.text("init") == "strip";
  for (auto& pt : pts) {
    pt.p = uniform01(rng);
    if (!strip) {
      pt.x = uniform01(rng);
      continue;
    }
    do {
      pt.x = 0.3 + 0.03 * standard_normal(rng);
    } while (!(pt.x >= 0.0 && pt.x < 1.0));
  }
  return pts;
}

void run_baker(const Cfg& c, RunContext& ctx) {
  const double a = c.real("a");
  if (!(a > 0.0 && a <= 1.0)) throw ConfigError("'a' must lie in (0, 1]", "a");
  const std::size_t steps = as_size(c, "steps", 0);
  const std::size_t n = as_size(c, "n-points");
  const int grid = as_int(c, "grid", 1, 1 << 14);
  auto pts = initial_cloud(c, n);
  auto& out = ctx.csv("steps.csv", {"n", "entropy", "occupied_cells", "fine_occupied_cells"});
  auto record = [&](std::size_t k) {
    out.row({static_cast<double>(k), coarse_entropy_2d(pts, grid), static_cast<double>(occupied_cells(pts, grid)),
             static_cast<double>(occupied_cells(pts, 256))});
  };
  record(0);
  for (std::size_t k = 1; k <= steps; ++k) {
    for (auto& pt : pts) pt = a < 1.0 ? dissipative_baker_step(pt, a) : baker_step(pt);
    record(k);
  }
  if (c.boolean("dimension") && a < 1.0) {
    const std::size_t starts = std::max<std::size_t>(n / 10, 1000);
    const auto cloud = dissipative_baker_cloud(starts, a, 10, 10, c.seed());
    const std::vector<double> scales{1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256, 1.0 / 512, 1.0 / 1024};
    const auto bc = box_counting_dimension(cloud, scales);
    auto& d = ctx.csv("box_counts.csv", {"epsilon", "count"});
    for (std::size_t i = 0; i < bc.scales.size(); ++i) d.row({bc.scales[i], static_cast<double>(bc.counts[i])});
    ctx.note("box_dimension", bc.dimension);
    ctx.note("box_residual", bc.residual);
  }
}

void run_standard_map(const Cfg& c, RunContext& ctx) {
  EnsembleParams ep;
  ep.K = c.real("K");
  ep.lambda = c.real("lambda");
  if (ep.lambda < 0.0) throw ConfigError("'lambda' must be >= 0", "lambda");
  const std::string noise = c.text("noise");
  if (noise == "gaussian") ep.noise = NoiseSpec::gaussian(c.real("variance"));
  if (noise == "reset") ep.noise = NoiseSpec::reset(c.real("nu"));
  ep.noise.validate();
  InitSpec init;
  init.p0 = c.real("p0");
  EnsembleOptions opt;
  opt.n_steps = as_size(c, "steps");
  opt.n_traj = as_size(c, "n-traj", 2);
  opt.seed = c.seed();
  opt.entropy_dp = positive(c, "dp");
  opt.threads = static_cast<unsigned>(as_int(c, "threads", 1, 256));
  const MapId map = noise != "none" ? MapId::noisy : (ep.lambda > 0.0 ? MapId::zaslavsky : MapId::standard);
  const auto r = evolve_ensemble(map, ep, init, opt);
  auto& out = ctx.csv("moments.csv", {"n", "mean_p", "var_p", "entropy"});
  for (std::size_t n = 0; n <= opt.n_steps; ++n) {
    out.row({static_cast<double>(n), r.mean_p[n], r.var_p[n], r.entropy[n]});
  }
  const auto fit = fit_diffusion(r.var_p);
  ctx.note("diffusion_slope", fit.slope);
  ctx.note("diffusion_slope_stderr", fit.slope_stderr);
  ctx.note("diffusion_reference", 0.5 * ep.K * ep.K);
  ctx.note("final_entropy", r.entropy.back());

  // Fokker-Planck counterpart with D_pde = slope/2 from the same run.
  if (c.boolean("fokker-planck")) {
    const double D = 0.5 * std::max(fit.slope, 1e-12);
    const double T = static_cast<double>(opt.n_steps);
    const double half = 6.0 * std::sqrt(2.0 * D * T + 1.0) + std::abs(init.p0);
    FPGrid g;
    g.dp = half / 400.0;
    g.p_min = init.p0 - half;
    g.rho.assign(801, 0.0);
    g.rho[400] = 1.0 / g.dp;
    const double dt = 0.2 * g.dp * g.dp / D;
    const auto fp = fokker_planck_evolve(g, D, ep.lambda, dt, T, FPOptions{c.boolean("literal-fopl")});
    auto& f = ctx.csv("fokker_planck.csv", {"p", "rho"});
    for (std::size_t i = 0; i < fp.rho.size(); ++i) f.row({fp.p(i), fp.rho[i]});
    ctx.note("fp_variance", fp.variance());
  }
}

void run_discrete(const Cfg& c, RunContext& ctx) {
  const auto J = static_cast<std::size_t>(c.integer("J"));
  const auto B = bernoulli_perm(J);
  auto& m = ctx.csv("bernoulli_perm.csv", {"row", "col", "value"});
  const auto d = B.dense();
  for (std::size_t i = 0; i < J; ++i) {
    for (std::size_t j = 0; j < J; ++j) m.row({double(i), double(j), double(d[i][j])});
  }
  const auto Jmax = static_cast<std::size_t>(c.integer("J-max"));
  log2_exact(Jmax);
  auto& t = ctx.csv("recurrence.csv", {"J", "lb_J", "bernoulli_period", "baker_period"});
  for (std::size_t j = 2; j <= Jmax; j *= 2) {
    const double bp = j <= 256 ? double(baker_recurrence_period(j)) : NAN;
    t.row({double(j), double(log2_exact(j)), double(recurrence_period(j)), bp});
  }
  ctx.note("period", recurrence_period(J));
}

void run_qbaker(const Cfg& c, RunContext& ctx) {
  const int J = as_int(c, "J", 2, 4096);
  const int steps = as_int(c, "steps", 0, 1 << 24);
  const auto conv = c.text("convention") == "plain" ? BakerConvention::plain : BakerConvention::symmetric;
  const auto qb = build_quantum_baker(J, conv);
  const auto P = return_probabilities(qb, steps);
  auto& out = ctx.csv("return.csv", {"n", "P_ret", "P_ret_normalized"});
  const double J2 = double(J) * J;
  double best = 0.0, best_n = NAN;
  for (int n = 0; n <= steps; ++n) {
    out.row({double(n), P[n], P[n] / J2});
    if (n > 0 && P[n] / J2 > best) {
      best = P[n] / J2;
      best_n = n;
    }
  }
  ctx.note("unitarity_defect", unitarity_defect(qb.U));
  ctx.note("best_revival", best);
  ctx.note("best_revival_n", best_n);
}

void write_distribution(RunContext& ctx, const std::string& name, const std::vector<double>& P, int L) {
  auto& out = ctx.csv(name, {"l", "P_l"});
  for (int l = -L; l <= L; ++l) out.row({double(l), P[l + L]});
}

void run_qkr(const Cfg& c, RunContext& ctx) {
  QkrParams p;
  p.K = c.real("K");
  p.hbar = resolve_hbar(c);
  p.literal_phase = c.boolean("literal-phase");
  const std::size_t steps = as_size(c, "steps");
  const int L = c.integer("L") > 0 ? as_int(c, "L", 1, 1 << 20) : default_L(p);
  const auto q = evolve(RotorWavefunction::basis(L, 0), p, steps);

  EnsembleOptions eo;
  eo.n_steps = steps;
  eo.n_traj = as_size(c, "n-traj", 2);
  eo.seed = c.seed();
  const auto cl = evolve_ensemble(MapId::standard, EnsembleParams{p.K, 0.0, {}}, InitSpec{}, eo);

  auto& out = ctx.csv("energy.csv", {"n", "E_quantum", "E_classical_ref"});
  for (std::size_t n = 0; n <= steps; ++n) out.row({double(n), q.energy[n], classical_energy(cl, n)});
  write_distribution(ctx, "distribution.csv", q.P, q.L);

  const auto loc = localization_length(q.P, q.L);
  const auto cross = crossover_estimates(p.K, p.hbar);
  ctx.note("hbar", p.hbar);
  ctx.note("L", q.L);
  ctx.note("localization_length", loc.length);
  ctx.note("localization_r2", loc.r2);
  ctx.note("n_info", cross.n_info);
  ctx.note("n_uncertainty", cross.n_uncertainty);
  ctx.note("E_final", q.energy.back());
}

void write_wigner(RunContext& ctx, const std::string& name, const WignerCylinder& W) {
  auto& out = ctx.csv(name, {"theta", "p", "W"});
  for (int n = -2 * W.L; n <= 2 * W.L; ++n) {
    for (int k = 0; k < W.n_theta; ++k) out.row({W.theta(k), W.p(n), W.at(n, k)});
  }
}

void run_qkr_measured(const Cfg& c, RunContext& ctx) {
  OpenRotorParams p;
  p.K = c.real("K");
  p.hbar = resolve_hbar(c);
  p.gamma = gamma_of_nu(c);
  p.mode = c.text("mode") == "mean" ? MeasureMode::mean_l : MeasureMode::full_Pl;
  p.literal_phase = c.boolean("literal-phase");
  OpenRunOptions o;
  o.n_steps = as_size(c, "steps");
  o.entropy_every = as_int(c, "entropy-every", 0, 1 << 20);
  const int L = as_int(c, "L", 2, 1 << 14);
  const auto q = evolve_open(RotorDensity::basis(L, 0), p, o);

  EnsembleOptions eo;
  eo.n_steps = o.n_steps;
  eo.n_traj = as_size(c, "n-traj", 2);
  eo.seed = c.seed();
  const auto cl = evolve_ensemble(MapId::noisy, EnsembleParams{p.K, 0.0, matching_noise(p.mode, p.gamma)}, InitSpec{}, eo);

  auto& out = ctx.csv("energy.csv", {"n", "E", "S_vN", "E_classical"});
  for (std::size_t n = 0; n < q.energy.size(); ++n) {
    out.row({double(n), q.energy[n], q.entropy[n], classical_energy(cl, n)});
  }
  const auto P = q.final_state.diagonal();
  std::vector<double> pc;
  pc.reserve(cl.final_cloud.size());
  for (const auto& s : cl.final_cloud) pc.push_back(s.p);
  const auto cmp = compare_with_noisy_map(P, q.L, p.hbar, pc);
  std::vector<double> hist(P.size(), 0.0);
  for (double x : pc) {
    const long long l = std::llround(x / p.hbar);
    if (l >= -q.L && l <= q.L) hist[static_cast<std::size_t>(l + q.L)] += 1.0 / double(pc.size());
  }
  auto& d = ctx.csv("distribution.csv", {"l", "P_quantum", "P_classical"});
  for (int l = -q.L; l <= q.L; ++l) d.row({double(l), P[l + q.L], hist[l + q.L]});
  if (c.boolean("wigner")) write_wigner(ctx, "wigner.csv", wigner_cylinder(q.final_state.rho, p.hbar));

  const auto fit = fit_diffusion(q.energy);
  std::vector<double> ec(q.energy.size());
  for (std::size_t n = 0; n < ec.size(); ++n) ec[n] = classical_energy(cl, n);
  ctx.note("hbar", p.hbar);
  ctx.note("gamma", p.gamma);
  ctx.note("L", q.L);
  ctx.note("energy_slope", fit.slope);
  ctx.note("classical_slope", fit_diffusion(ec).slope);
  ctx.note("tv_distance", cmp.tv_distance);
  ctx.note("E_final", q.energy.back());
}

void run_qkr_dissipative(const Cfg& c, RunContext& ctx) {
  OpenRotorParams p;
  p.K = c.real("K");
  p.hbar = resolve_hbar(c);
  p.lambda = c.real("lambda");
  if (p.lambda < 0.0) throw ConfigError("'lambda' must be >= 0", "lambda");
  p.gamma = gamma_of_nu(c);
  p.mode = MeasureMode::full_Pl;
  OpenRunOptions o;
  o.n_steps = as_size(c, "steps");
  o.stop_when_stationary = c.boolean("stop-when-stationary");
  o.entropy_every = as_int(c, "entropy-every", 0, 1 << 20);
  const int L = as_int(c, "L", 2, 1 << 14);
  const auto q = evolve_open(RotorDensity::basis(L, 0), p, o);

  auto& out = ctx.csv("energy.csv", {"n", "E", "S_vN"});
  for (std::size_t n = 0; n < q.energy.size(); ++n) out.row({double(n), q.energy[n], q.entropy[n]});
  const auto W = wigner_cylinder(q.final_state.rho, p.hbar);
  write_wigner(ctx, "wigner.csv", W);

  const auto att = zaslavsky_attractor(p.K, p.lambda, as_size(c, "attractor-traj"), 200, 20, c.seed());
  auto& a = ctx.csv("attractor.csv", {"theta", "p"});
  for (const auto& s : att) a.row({s.theta, s.p});
  const auto band = attractor_band_fraction(W, att, c.real("band-width") * p.hbar);
  ctx.note("hbar", p.hbar);
  ctx.note("L", q.L);
  ctx.note("steps_done", double(q.steps_done));
  ctx.note("stationary", q.stationary ? 1.0 : 0.0);
  ctx.note("band_fraction", band.fraction);
  ctx.note("band_area_fraction", band.covered_area_fraction);
  ctx.note("E_final", q.energy.back());
}

ComplexVector boson_vector(const Cfg& c, int n_max) {
  const std::string kind = c.text("boson-state");
  if (kind == "vacuum") {
    ComplexVector v = ComplexVector::Zero(1);
    v(0) = 1.0;
    return v;
  }
  if (kind == "random") {
    const int m = as_int(c, "boson-levels", 1, n_max + 1);
    Rng rng = make_stream(c.seed(), 0);
    ComplexVector v(m);
    for (int i = 0; i < m; ++i) v(i) = cplx(standard_normal(rng), standard_normal(rng));
    return v / v.norm();
  }
  const double alpha = c.real("alpha");
  ComplexVector v(n_max + 1);
  double amp = std::exp(-0.5 * alpha * alpha);
  for (int i = 0; i <= n_max; ++i) {
    v(i) = amp;
    amp *= alpha / std::sqrt(double(i + 1));
  }
  return v / v.norm();
}

void run_spin_boson(const Cfg& c, RunContext& ctx) {
  const int N = as_int(c, "N", 1, 16);
  const int nmax = as_int(c, "nmax", 1, 1000);
  const double g = c.real("g");
  const auto sys = N == 1 ? SpinBosonSystem::rabi(c.real("omega0"), c.real("omega1"), g, nmax)
                          : SpinBosonSystem::ladder(N, c.real("omega0"), c.real("omega-c"), g, nmax);
  const int sign = as_int(c, "sign", -1, 1);
  if (sign == 0) throw ConfigError("'sign' must be +1 or -1", "sign");
  const auto psi0 = initial_state(sys, sign, boson_vector(c, nmax));
  const auto r = evolve(sys, psi0, positive(c, "dt"), c.real("T"));
  auto& out = ctx.csv("spin.csv", {"t", "a_x", "a_y", "a_z", "purity", "S_vN", "parity_expect"});
  for (std::size_t i = 0; i < r.t.size(); ++i) {
    out.row({r.t[i], r.ax[i], r.ay[i], r.az[i], r.purity[i], r.entropy[i], r.parity[i]});
  }
  const auto& comp = c.text("switch-component") == "z" ? r.az : r.ax;
  const auto st = switching_statistics(r.t, comp, c.real("switch-threshold"));
  auto& dw = ctx.csv("dwells.csv", {"t_start", "t_end", "polarity", "closed"});
  for (const auto& d : st.dwells) dw.row({d.t_start, d.t_end, double(d.polarity), d.closed ? 1.0 : 0.0});
  double drift = 0.0;
  for (double v : r.parity) drift = std::max(drift, std::abs(v - r.parity.front()));
  ctx.note("flips", st.flips);
  ctx.note("mean_closed_dwell", st.mean_closed_dwell);
  ctx.note("parity_drift", drift);
  ctx.note("n_max_final", r.system.n_max);
  ctx.note("escalations", r.escalations);
  ctx.note("final_purity", r.purity.back());
}

void run_double_well(const Cfg& c, RunContext& ctx) {
  const double dt = positive(c, "dt");
  const double T = positive(c, "T");
  DoubleWellSystem solo;
  solo.a = positive(c, "a");
  solo.b = positive(c, "b");
  solo.lambda = positive(c, "lambda");
  solo.validate();
  const int n = as_int(c, "basin-grid", 2, 4096);
  const auto bm = basin_map(solo, n, n, positive(c, "x-range"), positive(c, "p-range"), dt, T);
  auto& out = ctx.csv("basin.csv", {"x", "p", "label"});
  std::size_t asym = 0, undecided = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      out.row({bm.x(i), bm.p(j), double(bm.at(i, j))});
      if (bm.at(i, j) != -bm.at(n - 1 - i, n - 1 - j)) ++asym;
      if (bm.at(i, j) == 0) ++undecided;
    }
  }
  ctx.note("basin_antisymmetry_violations", double(asym));
  ctx.note("basin_undecided", double(undecided));

  const auto origin = damped_trajectory(solo, FullState{}, dt, T);
  ctx.note("origin_label", double(static_cast<int>(origin.label)));

  const std::size_t draws = as_size(c, "draws", 0);
  if (draws == 0) return;
  const auto sys = DoubleWellSystem::with_bath(solo.a, solo.b, as_int(c, "bath-N", 1, 4096), positive(c, "bath-omega-lo"),
                                               positive(c, "bath-omega-hi"), c.real("bath-g"), solo.lambda);
  BathSampling bs;
  bs.temperature = positive(c, "bath-temperature");
  const auto ex = bath_outcome_experiment(sys, draws, c.seed(), bs, dt, T);
  auto& o = ctx.csv("bath_outcomes.csv", {"draw", "label"});
  for (std::size_t i = 0; i < ex.labels.size(); ++i) o.row({double(i), double(ex.labels[i])});
  ctx.note("plus_fraction", ex.plus_fraction());
  ctx.note("undecided_draws", double(ex.undecided));
}

}  // namespace

void execute_command(const ExperimentConfig& cfg, RunContext& ctx) {
  const std::string& cmd = cfg.command();
  if (cmd == "bernoulli") return run_bernoulli(cfg, ctx);
  if (cmd == "baker") return run_baker(cfg, ctx);
  if (cmd == "standard-map") return run_standard_map(cfg, ctx);
  if (cmd == "discrete") return run_discrete(cfg, ctx);
  if (cmd == "qbaker") return run_qbaker(cfg, ctx);
  if (cmd == "qkr") return run_qkr(cfg, ctx);
  if (cmd == "qkr-measured") return run_qkr_measured(cfg, ctx);
  if (cmd == "qkr-dissipative") return run_qkr_dissipative(cfg, ctx);
  if (cmd == "spin-boson") return run_spin_boson(cfg, ctx);
  if (cmd == "double-well") return run_double_well(cfg, ctx);
  throw ConfigError("unknown subcommand '" + cmd + "'", cmd);
}

}  // namespace chaosflow
