// Copyright (c) the bdod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "bdod/synthesis.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <thread>

namespace bdod {

void TimeGrid::validate(double omega_max) const {
  if (n_samples < 2 || (n_samples & (n_samples - 1)) != 0)
    throw SynthesisError("time grid sample count must be a power of two >= 2");
  if (!(t_end > t_start)) throw SynthesisError("empty time grid");
  if (M_PI / dt() < omega_max)
    throw SynthesisError("time grid violates Nyquist for the frequency grid");
}

Eigen::VectorXd DensityHistory::l2_norm_trace() const {
  Eigen::VectorXd out(n_samples());
  for (int k = 0; k < n_samples(); ++k) out[k] = l2_norm_at(k);
  return out;
}

void save_history(const DensityHistory& h, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SynthesisError("cannot open " + path + " for writing");
  int64_t np = h.n_panels(), ns = h.n_samples();
  out.write(reinterpret_cast<const char*>(&np), 8);
  out.write(reinterpret_cast<const char*>(&ns), 8);
  out.write(reinterpret_cast<const char*>(&h.grid.t_start), 8);
  out.write(reinterpret_cast<const char*>(&h.grid.t_end), 8);
  out.write(reinterpret_cast<const char*>(&h.c), 8);
  for (int j = 0; j < np; ++j)
    for (int k = 0; k < ns; ++k) {
      double v = h.values(j, k);
      out.write(reinterpret_cast<const char*>(&v), 8);
    }
  Eigen::VectorXd w = h.weight;
  out.write(reinterpret_cast<const char*>(w.data()), 8 * np);
  if (!out) throw SynthesisError("write failure on " + path);
}

DensityHistory load_history(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SynthesisError("cannot open " + path);
  int64_t np = 0, ns = 0;
  DensityHistory h;
  in.read(reinterpret_cast<char*>(&np), 8);
  in.read(reinterpret_cast<char*>(&ns), 8);
  in.read(reinterpret_cast<char*>(&h.grid.t_start), 8);
  in.read(reinterpret_cast<char*>(&h.grid.t_end), 8);
  in.read(reinterpret_cast<char*>(&h.c), 8);
  if (!in || np <= 0 || ns <= 1) throw SynthesisError("malformed history file " + path);
  h.grid.n_samples = static_cast<int>(ns);
  h.values.resize(np, ns);
  for (int j = 0; j < np; ++j)
    for (int k = 0; k < ns; ++k) {
      double v;
      in.read(reinterpret_cast<char*>(&v), 8);
      h.values(j, k) = v;
    }
  h.weight.resize(np);
  in.read(reinterpret_cast<char*>(h.weight.data()), 8 * np);
  if (!in) throw SynthesisError("truncated history file " + path);
  return h;
}

void save_sweep_result(const SweepResult& sweep, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SynthesisError("cannot open " + path + " for writing");
  int64_t np = sweep.densities.rows(), nf = sweep.n_freq();
  out.write(reinterpret_cast<const char*>(&np), 8);
  out.write(reinterpret_cast<const char*>(&nf), 8);
  out.write(reinterpret_cast<const char*>(&sweep.omega0), 8);
  out.write(reinterpret_cast<const char*>(&sweep.c), 8);
  out.write(reinterpret_cast<const char*>(&sweep.signal_duration), 8);
  auto vec = [&](const std::vector<double>& v) {
    out.write(reinterpret_cast<const char*>(v.data()), 8 * nf);
  };
  vec(sweep.omegas);
  vec(sweep.resolvent_norms);
  vec(sweep.rhs_norms);
  vec(sweep.solve_residuals);
  out.write(reinterpret_cast<const char*>(sweep.weight.data()), 8 * np);
  for (int64_t i = 0; i < nf; ++i)
    out.write(reinterpret_cast<const char*>(sweep.densities.col(i).data()), 16 * np);
  if (!out) throw SynthesisError("write failure on " + path);
}

SweepResult load_sweep_result(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SynthesisError("cannot open " + path);
  int64_t np = 0, nf = 0;
  SweepResult sweep;
  in.read(reinterpret_cast<char*>(&np), 8);
  in.read(reinterpret_cast<char*>(&nf), 8);
  in.read(reinterpret_cast<char*>(&sweep.omega0), 8);
  in.read(reinterpret_cast<char*>(&sweep.c), 8);
  in.read(reinterpret_cast<char*>(&sweep.signal_duration), 8);
  if (!in || np <= 0 || nf <= 0) throw SynthesisError("malformed sweep file " + path);
  auto vec = [&](std::vector<double>& v) {
    v.resize(nf);
    in.read(reinterpret_cast<char*>(v.data()), 8 * nf);
  };
  vec(sweep.omegas);
  vec(sweep.resolvent_norms);
  vec(sweep.rhs_norms);
  vec(sweep.solve_residuals);
  sweep.weight.resize(np);
  in.read(reinterpret_cast<char*>(sweep.weight.data()), 8 * np);
  sweep.densities.resize(np, nf);
  for (int64_t i = 0; i < nf; ++i)
    in.read(reinterpret_cast<char*>(sweep.densities.col(i).data()), 16 * np);
  if (!in) throw SynthesisError("truncated sweep file " + path);
  sweep.validate();
  return sweep;
}

std::vector<double> make_midpoint_grid(double omega_max, int n, double omega0) {
  if (n < 1 || !(omega_max > 0.0)) throw SynthesisError("bad frequency grid parameters");
  double d = omega_max / n;
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i) grid[i] = (i + 0.5) * d;
  for (double w : grid)
    if (w == omega0) throw SynthesisError("frequency grid hits omega0");
  return grid;
}

std::vector<double> make_uniform_grid(double omega_min, double omega_max, int n,
                                      double omega0) {
  if (n < 2 || !(omega_max > omega_min) || omega_min < 0.0)
    throw SynthesisError("bad frequency grid parameters");
  std::vector<double> grid(n);
  double d = (omega_max - omega_min) / (n - 1);
  for (int i = 0; i < n; ++i) grid[i] = omega_min + i * d;
  for (double w : grid)
    if (w == omega0) throw SynthesisError("frequency grid hits omega0");
  return grid;
}

SweepResult frequency_sweep(const SurfaceMesh& mesh, const IncidentPulse& pulse,
                            const std::vector<double>& omega_grid, double omega0,
                            const SweepOptions& opt) {
  pulse.validate();
  const int m = static_cast<int>(omega_grid.size());
  for (int i = 0; i < m; ++i) {
    if (omega_grid[i] < 0.0) throw SynthesisError("negative frequency in sweep grid");
    if (omega_grid[i] == omega0) throw SynthesisError("sweep grid hits omega0");
    if (i > 0 && !(omega_grid[i] > omega_grid[i - 1]))
      throw SynthesisError("sweep grid not strictly increasing");
  }

  SweepResult sweep;
  sweep.omegas = omega_grid;
  sweep.omega0 = omega0;
  sweep.c = opt.c;
  sweep.weight = mesh.area_weights();
  sweep.densities.resize(mesh.n_panels(), m);
  sweep.resolvent_norms.assign(m, 0.0);
  sweep.rhs_norms.assign(m, 0.0);
  sweep.solve_residuals.assign(m, 0.0);
  auto [a_lo, a_hi] = arrival_range(pulse, mesh);
  sweep.signal_duration = (a_hi - a_lo) + 12.0 * pulse.width;

  std::atomic<int> next{0};
  std::vector<std::string> failures(m);
  auto worker = [&]() {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= m) return;
      try {
        KernelParams params = KernelParams::make(omega_grid[i], opt.c, omega0);
        DenseOperator A = assemble_A(mesh, params, opt.assembly);
        Eigen::VectorXcd rhs = cfie_rhs(pulse, mesh, params);
        double residual = 0.0;
        sweep.densities.col(i) = solve_density(A, rhs, &residual);
        sweep.solve_residuals[i] = residual;
        sweep.rhs_norms[i] = weighted_norm(rhs, A.weight);
        sweep.resolvent_norms[i] = opt.resolvent_norms ? resolvent_norm(A) : 0.0;
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };

  int jobs = std::max(1, opt.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (int i = 0; i < m; ++i)
    if (!failures[i].empty())
      throw SolverError("sweep failed at omega = " + std::to_string(omega_grid[i]) + ": " +
                        failures[i]);
  sweep.validate();
  return sweep;
}

DensityHistory synthesize_time_density(const SweepResult& sweep, const TimeGrid& grid) {
  const int m = sweep.n_freq();
  if (m < 2) throw SynthesisError("sweep too short to synthesize");
  const double domega = sweep.omegas[1] - sweep.omegas[0];
  for (int i = 1; i < m; ++i) {
    if (std::abs((sweep.omegas[i] - sweep.omegas[i - 1]) - domega) > 1e-9 * domega)
      throw SynthesisError("synthesis requires a uniform frequency grid");
  }
  grid.validate(sweep.omegas.back());
  double period = 2.0 * M_PI / domega;
  if (period < (grid.t_end - grid.t_start) + sweep.signal_duration)
    throw SynthesisError("aliasing guard violated: periodization 2pi/domega too short");

  // Midpoint-offset grids integrate with uniform weights; otherwise fall
  // back to trapezoid end-weights.
  const bool midpoint = std::abs(sweep.omegas[0] - 0.5 * domega) < 1e-9 * domega;
  Eigen::VectorXd qw = Eigen::VectorXd::Constant(m, domega);
  if (!midpoint) {
    qw[0] *= 0.5;
    qw[m - 1] *= 0.5;
  }

  Eigen::MatrixXcd basis(m, grid.n_samples);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < grid.n_samples; ++k) {
      double ph = -sweep.omegas[i] * grid.time(k);  // F = int e^{+iwt}, inverse e^{-iwt}
      basis(i, k) = qw[i] / M_PI * Complex(std::cos(ph), std::sin(ph));
    }

  Eigen::MatrixXcd complex_vals = sweep.densities * basis;

  DensityHistory h;
  h.grid = grid;
  h.weight = sweep.weight;
  h.c = sweep.c;
  h.values = complex_vals.real();

  // Hermitian-unfolded realness check on a subsample: the two-sided sum
  // (1/2pi) [sum_w + sum_{-w}] must be real to rounding.
  double peak = h.values.cwiseAbs().maxCoeff();
  if (peak > 0.0) {
    int pstride = std::max(1, h.n_panels() / 16);
    int tstride = std::max(1, h.n_samples() / 16);
    double worst = 0.0;
    for (int j = 0; j < h.n_panels(); j += pstride) {
      for (int k = 0; k < h.n_samples(); k += tstride) {
        Complex plus = complex_vals(j, k);
        Complex minus = 0.0;
        for (int i = 0; i < m; ++i) {
          double ph = sweep.omegas[i] * grid.time(k);
          minus += qw[i] / M_PI * std::conj(sweep.densities(j, i)) *
                   Complex(std::cos(ph), std::sin(ph));
        }
        worst = std::max(worst, std::abs(0.5 * (plus + minus).imag()));
      }
    }
    if (worst > 1e-9 * peak)
      throw SynthesisError("synthesis imaginary residual above tolerance");
  }
  return h;
}

namespace {

// Ramp v(u) = exp(2 e^{-1/u} / (u-1)): 1 at u <= 0, 0 at u >= 1, C-infinity.
double vramp(double u) {
  if (u <= 0.0) return 1.0;
  if (u >= 1.0) return 0.0;
  return std::exp(2.0 * std::exp(-1.0 / u) / (u - 1.0));
}

}  // namespace

std::pair<double, double> window_pm(double t, double T, double tau) {
  if (!(tau > 0.0)) throw SynthesisError("window_pm requires tau > 0");
  double x = t - T;
  double wplus;
  if (x < -tau)
    wplus = 0.0;
  else if (x >= 0.0)
    wplus = 1.0;
  else
    wplus = 1.0 - vramp((x + tau) / tau);
  return {1.0 - wplus, wplus};
}

double window_base(double s, double s0) {
  if (!(s0 > 0.0)) throw SynthesisError("window requires s0 > 0");
  double a = std::abs(s);
  if (a >= 2.0 * s0) return 0.0;
  if (a <= s0) return 1.0;
  if (s > 0.0) return vramp((s - s0) / s0);
  return 1.0 - vramp((s + 2.0 * s0) / s0);
}

double window_phi(double s, double phi, double s0) { return window_base(s - phi, s0); }

}  // namespace bdod
