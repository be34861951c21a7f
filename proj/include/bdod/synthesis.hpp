// Copyright (c) the bdod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef BDOD_SYNTHESIS_HPP
#define BDOD_SYNTHESIS_HPP

#include <string>
#include <vector>

#include "bdod/incident.hpp"
#include "bdod/resolvent.hpp"

namespace bdod {

struct SynthesisError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TimeGrid {
  double t_start = 0.0;
  double t_end = 1.0;
  int n_samples = 2;

  double dt() const { return (t_end - t_start) / (n_samples - 1); }
  double time(int k) const { return t_start + k * dt(); }
  // Requires a power-of-two sample count and Nyquist coverage of omega_max.
  void validate(double omega_max) const;
};

// Real boundary density samples psi(r_j, t_k) on Gamma x uniform time grid.
struct DensityHistory {
  TimeGrid grid;
  Eigen::MatrixXd values;  // panels x samples
  Eigen::VectorXd weight;  // panel areas
  double c = 1.0;          // wavespeed, needed for retarded-time evaluation

  int n_panels() const { return static_cast<int>(values.rows()); }
  int n_samples() const { return static_cast<int>(values.cols()); }
  double l2_norm_at(int k) const { return std::sqrt(weight.dot(values.col(k).cwiseAbs2())); }
  Eigen::VectorXd l2_norm_trace() const;
};

// Binary container format: i64 n_panels, i64 n_samples, f64 t_start, f64
// t_end, f64 c, then row-major f64 samples, then the weights.
void save_history(const DensityHistory& h, const std::string& path);
DensityHistory load_history(const std::string& path);

// Binary sweep container (frequencies, densities, diagnostics, weights).
void save_sweep_result(const SweepResult& sweep, const std::string& path);
SweepResult load_sweep_result(const std::string& path);

// Uniform midpoint-offset grid omega_i = (i + 1/2) domega covering
// (0, omega_max]; excludes omega = 0 and (checked) omega0.
std::vector<double> make_midpoint_grid(double omega_max, int n, double omega0);
// Uniform inclusive grid on [omega_min, omega_max].
std::vector<double> make_uniform_grid(double omega_min, double omega_max, int n,
                                      double omega0);

struct SweepOptions {
  AssemblyOptions assembly;
  int jobs = 1;
  bool resolvent_norms = true;
  double c = 1.0;
};

// Per-frequency CFIE solves: assemble A, build the right-hand side from the
// pulse spectrum, solve, and record the resolvent norm.
SweepResult frequency_sweep(const SurfaceMesh& mesh, const IncidentPulse& pulse,
                            const std::vector<double>& omega_grid, double omega0,
                            const SweepOptions& opt = {});

// Hermitian-symmetric Fourier synthesis
//   psi(r_j, t_k) = (1/pi) Re sum_i w_i psi^f(r_j, omega_i) e^{-i omega_i t_k}
// with midpoint/trapezoid weights w_i on the uniform sweep grid (the
// forward transform is int f e^{+iwt} dt, pairing with the e^{+i kappa R}
// retarded kernel).
DensityHistory synthesize_time_density(const SweepResult& sweep, const TimeGrid& grid);

// Smooth ramp pair of the tau-windowing: w_- = 1 before T - tau, w_+ = 1
// after T, transition via the C-infinity ramp; w_- + w_+ = 1 exactly.
std::pair<double, double> window_pm(double t, double T, double tau);

// Four-branch C-infinity bump of width 4 s0 (1 on [-s0, s0], 0 outside
// [-2 s0, 2 s0]); window_phi shifts it by phi. The 3 l s0 translates form a
// partition of unity.
double window_base(double s, double s0);
double window_phi(double s, double phi, double s0);

}  // namespace bdod

#endif
