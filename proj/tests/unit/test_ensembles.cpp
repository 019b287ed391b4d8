#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "chaosflow/ensembles.hpp"

using namespace chaosflow;

TEST_CASE("histogram entropy limits") {
  const std::vector<double> one{0.1, 0.2, 0.3, 0.4};
  CHECK(shannon_entropy(Histogram1D::from_samples(one, 1.0), 1.0, 1.0) == doctest::Approx(0.0));
  std::vector<double> spread;
  for (int m = 0; m < 8; ++m) {
    for (int k = 0; k < 10; ++k) spread.push_back(m + 0.05 + 0.09 * k);
  }
  CHECK(shannon_entropy(Histogram1D::from_samples(spread, 1.0), 1.0, 1.0) == doctest::Approx(std::log(8.0)));
  CHECK(shannon_entropy(Histogram1D::from_samples(spread, 1.0), 2.0, 1.0) == doctest::Approx(2 * std::log(8.0)));
}

TEST_CASE("coarse entropy and cell counts on the unit square") {
  std::vector<PhasePoint> pts;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) pts.push_back({(i + 0.5) / 4, (j + 0.5) / 4});
  }
  CHECK(coarse_entropy_2d(pts, 4) == doctest::Approx(std::log(16.0)));
  CHECK(coarse_entropy_2d(pts, 2) == doctest::Approx(std::log(4.0)));
  CHECK(occupied_cells(pts, 4) == 16);
  CHECK(occupied_cells(pts, 1) == 1);
}

TEST_CASE("diffusion fit on an exact line") {
  std::vector<double> v;
  for (int n = 0; n <= 50; ++n) v.push_back(3.5 * n + 2.0);
  const auto f = fit_diffusion(v, 10, 50);
  CHECK(f.slope == doctest::Approx(3.5));
  CHECK(f.intercept == doctest::Approx(2.0));
  CHECK(f.residual < 1e-9);
}

TEST_CASE("K = 0 ensemble keeps its momentum distribution") {
  EnsembleOptions o;
  o.n_steps = 20;
  o.n_traj = 1000;
  InitSpec in;
  in.p0 = 1.5;
  const auto r = evolve_ensemble(MapId::standard, EnsembleParams{0.0, 0.0, {}}, in, o);
  for (double m : r.mean_p) CHECK(m == doctest::Approx(1.5));
  for (double v : r.var_p) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("one kick gives variance K^2/2") {
  EnsembleOptions o;
  o.n_steps = 1;
  o.n_traj = 200000;
  const auto r = evolve_ensemble(MapId::standard, EnsembleParams{10.0, 0.0, {}}, InitSpec{}, o);
  // var of K sin(theta) is K^2/2 with sd K^2/2*sqrt(1/n) roughly
  CHECK(r.var_p[1] == doctest::Approx(50.0).epsilon(0.01));
}

TEST_CASE("ensemble results do not depend on the thread count") {
  EnsembleOptions o;
  o.n_steps = 30;
  o.n_traj = 10000;
  o.entropy_dp = 1.0;
  o.seed = 99;
  const EnsembleParams p{6.0, 0.1, NoiseSpec::gaussian(0.1)};
  const auto a = evolve_ensemble(MapId::noisy, p, InitSpec{}, o);
  o.threads = 3;
  const auto b = evolve_ensemble(MapId::noisy, p, InitSpec{}, o);
  CHECK(a.mean_p == b.mean_p);
  CHECK(a.var_p == b.var_p);
  CHECK(a.entropy == b.entropy);
}

namespace {
FPGrid delta_grid(double half, int n) {
  FPGrid g;
  g.dp = 2 * half / (2 * n);
  g.p_min = -half;
  g.rho.assign(2 * n + 1, 0.0);
  g.rho[n] = 1.0 / g.dp;
  return g;
}
}  // namespace

TEST_CASE("Fokker-Planck heat kernel") {
  const auto g = delta_grid(12.0, 600);
  const auto out = fokker_planck_evolve(g, 1.0, 0.0, 0.2 * g.dp * g.dp, 1.0);
  CHECK(out.variance() == doctest::Approx(2.0).epsilon(0.01));
  CHECK(std::abs(out.mass() - 1.0) < 1e-10);
  // compare the profile with the gaussian of variance 2
  double err = 0;
  for (std::size_t i = 0; i < out.rho.size(); ++i) {
    const double p = out.p(i);
    err = std::max(err, std::abs(out.rho[i] - std::exp(-p * p / 4) / std::sqrt(4 * std::numbers::pi)));
  }
  CHECK(err < 5e-3);
}

TEST_CASE("Fokker-Planck: D=0 is the identity, mass is conserved, drift pulls to 0") {
  auto g = delta_grid(5.0, 50);
  g.rho.assign(g.rho.size(), 0.0);
  for (std::size_t i = 60; i < 80; ++i) g.rho[i] = 1.0 / (20 * g.dp);
  const auto same = fokker_planck_evolve(g, 0.0, 0.0, 0.01, 1.0);
  CHECK(same.rho == g.rho);

  const double dt = 0.2 * g.dp * g.dp / 0.3;
  const auto many = fokker_planck_evolve(g, 0.3, 0.0, dt, 1000 * dt);
  CHECK(std::abs(many.mass() - g.mass()) < 1e-10);

  double prev = g.mean();
  auto cur = g;
  for (int k = 0; k < 10; ++k) {
    cur = fokker_planck_evolve(cur, 0.05, 0.5, dt, 0.5);
    CHECK(cur.mean() < prev);
    CHECK(cur.mean() > 0.0);
    prev = cur.mean();
  }
  const auto lit = fokker_planck_evolve(g, 0.3, 0.5, dt / 20, 0.2, FPOptions{true});
  CHECK(std::abs(lit.mass() - g.mass()) < 1e-10);
  CHECK_THROWS_AS(fokker_planck_evolve(g, 1.0, 0.0, g.dp * g.dp, 1.0), std::domain_error);
}

TEST_CASE("box counting on a segment and on a square") {
  Rng r(2);
  std::vector<PhasePoint> line, square;
  for (int i = 0; i < 200000; ++i) {
    const double u = uniform01(r);
    line.push_back({u, 0.3 + 0.4 * u});
    square.push_back({uniform01(r), uniform01(r)});
  }
  const std::vector<double> s{1.0 / 2, 1.0 / 4, 1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256};
  CHECK(std::abs(box_counting_dimension(line, s).dimension - 1.0) < 0.05);
  CHECK(std::abs(box_counting_dimension(square, s).dimension - 2.0) < 0.05);
  CHECK_THROWS(box_counting_dimension(std::span(line).first(100), s));
  const std::vector<double> narrow{0.1, 0.05, 0.03, 0.02};
  CHECK_THROWS(box_counting_dimension(line, narrow));
}

TEST_CASE("dissipative baker halves the occupied area per step") {
  Rng r(8);
  std::vector<PhasePoint> pts(1000000);
  for (auto& p : pts) p = {uniform01(r), uniform01(r)};
  const double c0 = double(occupied_cells(pts, 256));
  CHECK(c0 == 65536.0);
  for (int n = 1; n <= 4; ++n) {
    for (auto& p : pts) p = dissipative_baker_step(p, 0.5);
    CHECK(double(occupied_cells(pts, 256)) == doctest::Approx(c0 / std::pow(2.0, n)).epsilon(0.01));
  }
}
