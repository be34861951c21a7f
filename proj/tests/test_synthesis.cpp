// Copyright (c) the bdod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>

#include "bdod/oracle.hpp"
#include "bdod/synthesis.hpp"

using namespace bdod;

namespace {

IncidentPulse standard_pulse() {
  IncidentPulse p;
  p.direction = Vec3(0, 0, 1);
  p.carrier = 4.0;
  p.width = 0.5;
  p.delay = 8.0;
  p.amplitude = 1.0;
  p.c = 1.0;
  return p;
}

double legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  if (n == 0) return p0;
  for (int k = 2; k <= n; ++k) {
    double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

// Exact Neumann-trace density for plane-wave scattering by the soft unit
// sphere (Mie series): psi^f(r) = -(i beta / kappa) sum_n i^n (2n+1)
// P_n(d.r) / h_n(kappa), with beta the temporal spectrum factor.
Complex mie_density(const IncidentPulse& pulse, double omega, const Vec3& r) {
  double kappa = omega / pulse.c;
  Complex beta = spectrum_B(pulse, Vec3::Zero(), omega);
  Complex acc(0.0, 0.0);
  Complex ipow(1.0, 0.0);
  int n_max = static_cast<int>(kappa) + 25;
  for (int n = 0; n <= n_max; ++n) {
    SphBessel b = sph_bessel(n, kappa);
    Complex h(b.j, b.y);
    acc += ipow * (2.0 * n + 1.0) / h * legendre(n, pulse.direction.dot(r.normalized()));
    ipow *= Complex(0.0, 1.0);
  }
  return -Complex(0.0, 1.0) * beta / kappa * acc;
}

}  // namespace

TEST_CASE("window_pm partition and branch values") {
  double T = 3.0, tau = 0.7;
  std::mt19937 gen(9);
  std::uniform_real_distribution<double> td(-10.0, 10.0);
  for (int i = 0; i < 200; ++i) {
    double t = td(gen);
    auto [wm, wp] = window_pm(t, T, tau);
    CHECK(wm + wp == 1.0);  // exact by construction
    CHECK(wm >= 0.0);
    CHECK(wp >= 0.0);
  }
  CHECK(window_pm(T - 2.0 * tau, T, tau) == std::pair<double, double>{1.0, 0.0});
  CHECK(window_pm(T, T, tau) == std::pair<double, double>{0.0, 1.0});
  CHECK_THROWS_AS(window_pm(0.0, 0.0, 0.0), SynthesisError);
}

TEST_CASE("window_phi branch values and partition of unity") {
  double s0 = 0.8;
  CHECK(window_phi(2.0, 2.0, s0) == 1.0);
  CHECK(window_phi(2.0 + 3.0 * s0, 2.0, s0) == 0.0);
  CHECK(window_phi(2.0 - 3.0 * s0, 2.0, s0) == 0.0);

  std::mt19937 gen(31);
  std::uniform_real_distribution<double> sd(-30.0, 30.0);
  for (int i = 0; i < 100; ++i) {
    double s = sd(gen);
    double sum = 0.0;
    int nonzero = 0;
    for (int l = -16; l <= 16; ++l) {
      double w = window_phi(s, 3.0 * l * s0, s0);
      sum += w;
      if (w != 0.0) ++nonzero;
    }
    CHECK(std::abs(sum - 1.0) < 1e-12);
    CHECK(nonzero <= 2);
    CHECK(nonzero >= 1);
  }
}

TEST_CASE("window joints are smooth to two derivatives") {
  double s0 = 1.0;
  auto deriv_jump = [&](double joint) {
    double h = 1e-4;
    auto f = [&](double s) { return window_base(s, s0); };
    double d1r = (-3.0 * f(joint) + 4.0 * f(joint + h) - f(joint + 2 * h)) / (2 * h);
    double d1l = (3.0 * f(joint) - 4.0 * f(joint - h) + f(joint - 2 * h)) / (2 * h);
    double d2r =
        (2.0 * f(joint) - 5.0 * f(joint + h) + 4.0 * f(joint + 2 * h) - f(joint + 3 * h)) /
        (h * h);
    double d2l =
        (2.0 * f(joint) - 5.0 * f(joint - h) + 4.0 * f(joint - 2 * h) - f(joint - 3 * h)) /
        (h * h);
    return std::max(std::abs(d1r - d1l), std::abs(d2r - d2l));
  };
  for (double joint : {-2.0, -1.0, 1.0, 2.0}) CHECK(deriv_jump(joint * s0) < 1e-6);
}

TEST_CASE("frequency grids exclude omega0 and validate") {
  auto grid = make_midpoint_grid(16.0, 64, 1.0);
  CHECK(grid.size() == 64);
  CHECK(grid.front() == doctest::Approx(0.125));
  for (double w : grid) CHECK(w != 1.0);
  CHECK_THROWS_AS(make_midpoint_grid(16.0, 32, 0.25), SynthesisError);
  CHECK_THROWS_AS(make_uniform_grid(1.0, 2.0, 11, 1.5), SynthesisError);

  TimeGrid tg{0.0, 10.0, 256};
  tg.validate(16.0);
  CHECK_THROWS_AS((TimeGrid{0.0, 10.0, 255}).validate(16.0), SynthesisError);
  CHECK_THROWS_AS((TimeGrid{0.0, 10.0, 64}).validate(100.0), SynthesisError);
}

TEST_CASE("synthesis recovers a planted analytic signal") {
  // Plant the spectrum of a known Gaussian-cosine signal on one panel and
  // invert; the spectrum is analytic so truncation and aliasing dominate.
  IncidentPulse sig;
  sig.direction = Vec3(1, 0, 0);
  sig.carrier = 3.0;
  sig.width = 0.5;
  sig.delay = 10.0;
  sig.amplitude = 1.0;
  sig.c = 1.0;

  double omega_max = 16.0;
  int m = 256;
  SweepResult sweep;
  sweep.omegas = make_midpoint_grid(omega_max, m, 1.0);
  sweep.omega0 = 1.0;
  sweep.c = 1.0;
  sweep.weight = Eigen::VectorXd::Constant(1, 1.0);
  sweep.signal_duration = 12.0 * sig.width;
  sweep.densities.resize(1, m);
  for (int i = 0; i < m; ++i)
    sweep.densities(0, i) = spectrum_B(sig, Vec3::Zero(), sweep.omegas[i]);
  sweep.resolvent_norms.assign(m, 1.0);
  sweep.rhs_norms.assign(m, 1.0);
  sweep.solve_residuals.assign(m, 0.0);

  TimeGrid grid{0.0, 20.0, 512};
  DensityHistory h = synthesize_time_density(sweep, grid);
  double max_err = 0.0;
  for (int k = 0; k < grid.n_samples; ++k) {
    double t = grid.time(k);
    max_err = std::max(max_err, std::abs(h.values(0, k) - evaluate_b(sig, Vec3::Zero(), t)));
  }
  CHECK(max_err <= 1e-6);

  // Parseval: sum_t dt ||psi||^2 vs (1/pi) sum_w dw ||psi^f||^2 within 1%.
  double time_energy = 0.0;
  for (int k = 0; k < grid.n_samples; ++k) {
    double w = (k == 0 || k == grid.n_samples - 1) ? 0.5 : 1.0;
    time_energy += w * grid.dt() * h.values(0, k) * h.values(0, k);
  }
  double freq_energy = 0.0;
  double domega = sweep.omegas[1] - sweep.omegas[0];
  for (int i = 0; i < m; ++i)
    freq_energy += domega / M_PI * std::norm(sweep.densities(0, i));
  CHECK(time_energy == doctest::Approx(freq_energy).epsilon(0.01));
}

TEST_CASE("all-zero sweep synthesizes to the zero history") {
  SweepResult sweep;
  int m = 16;
  sweep.omegas = make_midpoint_grid(8.0, m, 1.0);
  sweep.omega0 = 1.0;
  sweep.c = 1.0;
  sweep.weight = Eigen::VectorXd::Constant(3, 0.5);
  sweep.signal_duration = 1.0;
  sweep.densities = Eigen::MatrixXcd::Zero(3, m);
  sweep.resolvent_norms.assign(m, 1.0);
  sweep.rhs_norms.assign(m, 0.0);
  sweep.solve_residuals.assign(m, 0.0);
  TimeGrid grid{0.0, 4.0, 64};
  DensityHistory h = synthesize_time_density(sweep, grid);
  CHECK(h.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("synthesis guards: aliasing and grid uniformity") {
  SweepResult sweep;
  int m = 8;
  sweep.omegas = make_midpoint_grid(2.0, m, 3.0);  // domega = 0.25, period 8 pi
  sweep.omega0 = 3.0;
  sweep.c = 1.0;
  sweep.weight = Eigen::VectorXd::Constant(1, 1.0);
  sweep.signal_duration = 10.0;
  sweep.densities = Eigen::MatrixXcd::Zero(1, m);
  sweep.resolvent_norms.assign(m, 1.0);
  sweep.rhs_norms.assign(m, 0.0);
  sweep.solve_residuals.assign(m, 0.0);
  TimeGrid grid{0.0, 30.0, 64};  // 30 + 10 > 8 pi
  CHECK_THROWS_AS(synthesize_time_density(sweep, grid), SynthesisError);

  sweep.signal_duration = 0.5;
  TimeGrid ok{0.0, 8.0, 64};
  synthesize_time_density(sweep, ok);  // passes the guard

  auto bad = sweep;
  bad.omegas[3] += 0.01;
  CHECK_THROWS_AS(synthesize_time_density(bad, ok), SynthesisError);
}

TEST_CASE("sweep solves match the Mie-series density") {
  SurfaceMesh mesh = build_sphere(1.0, 3);
  IncidentPulse pulse = standard_pulse();
  double omega = 1.0;
  SweepOptions opt;
  SweepResult sweep = frequency_sweep(mesh, pulse, {omega}, 0.5, opt);

  double num = 0.0, den = 0.0;
  for (int j = 0; j < mesh.n_panels(); ++j) {
    Complex exact = mie_density(pulse, omega, mesh.centroids[j]);
    num += mesh.areas[j] * std::norm(sweep.densities(j, 0) - exact);
    den += mesh.areas[j] * std::norm(exact);
  }
  CHECK(std::sqrt(num / den) < 0.02);
}

TEST_CASE("sweep is deterministic across worker counts") {
  SurfaceMesh mesh = build_sphere(1.0, 1);
  IncidentPulse pulse = standard_pulse();
  auto grid = make_midpoint_grid(6.0, 6, 1.0);
  SweepOptions opt1, opt4;
  opt1.jobs = 1;
  opt4.jobs = 4;
  SweepResult a = frequency_sweep(mesh, pulse, grid, 1.0, opt1);
  SweepResult b = frequency_sweep(mesh, pulse, grid, 1.0, opt4);
  CHECK((a.densities - b.densities).cwiseAbs().maxCoeff() == 0.0);
  for (int i = 0; i < a.n_freq(); ++i) {
    CHECK(a.resolvent_norms[i] == b.resolvent_norms[i]);
    CHECK(a.solve_residuals[i] <= 1e-10);
  }
}

TEST_CASE("zero-amplitude pulse sweeps to zero densities") {
  SurfaceMesh mesh = build_sphere(1.0, 0);
  IncidentPulse pulse = standard_pulse();
  pulse.amplitude = 0.0;
  auto grid = make_midpoint_grid(4.0, 4, 1.0);
  SweepResult sweep = frequency_sweep(mesh, pulse, grid, 1.0, {});
  CHECK(sweep.densities.cwiseAbs().maxCoeff() == 0.0);
  for (double rn : sweep.resolvent_norms) CHECK(rn > 0.0);
}

TEST_CASE("sweep grid hygiene") {
  SurfaceMesh mesh = build_sphere(1.0, 0);
  IncidentPulse pulse = standard_pulse();
  CHECK_THROWS_AS(frequency_sweep(mesh, pulse, {0.5, 1.0, 2.0}, 1.0, {}),
                  SynthesisError);
  CHECK_THROWS_AS(frequency_sweep(mesh, pulse, {2.0, 1.5}, 1.0, {}), SynthesisError);
}

TEST_CASE("history i/o round trip") {
  DensityHistory h;
  h.grid = TimeGrid{0.0, 2.0, 8};
  h.c = 1.3;
  h.weight = Eigen::VectorXd::LinSpaced(5, 0.1, 0.5);
  h.values.resize(5, 8);
  std::mt19937 gen(4);
  std::normal_distribution<double> nd;
  for (int j = 0; j < 5; ++j)
    for (int k = 0; k < 8; ++k) h.values(j, k) = nd(gen);
  auto path = std::string("/tmp/bdod_history_test.bin");
  save_history(h, path);
  DensityHistory r = load_history(path);
  CHECK((r.values - h.values).cwiseAbs().maxCoeff() == 0.0);
  CHECK(r.c == h.c);
  CHECK(r.grid.t_end == h.grid.t_end);
  CHECK((r.weight - h.weight).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sweep i/o round trip") {
  SurfaceMesh mesh = build_sphere(1.0, 0);
  IncidentPulse pulse = standard_pulse();
  auto grid = make_midpoint_grid(4.0, 4, 1.0);
  SweepResult sweep = frequency_sweep(mesh, pulse, grid, 1.0, {});
  save_sweep_result(sweep, "/tmp/bdod_sweep_test.bin");
  SweepResult r = load_sweep_result("/tmp/bdod_sweep_test.bin");
  CHECK((r.densities - sweep.densities).cwiseAbs().maxCoeff() == 0.0);
  CHECK(r.omega0 == sweep.omega0);
  CHECK(r.signal_duration == sweep.signal_duration);
  for (int i = 0; i < 4; ++i) CHECK(r.resolvent_norms[i] == sweep.resolvent_norms[i]);
}
