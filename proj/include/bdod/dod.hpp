// Copyright (c) the bdod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef BDOD_DOD_HPP
#define BDOD_DOD_HPP

#include <vector>

#include "bdod/synthesis.hpp"

namespace bdod {

struct DodError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// tau-extended domain-of-dependence interval [T - T* - 2 tau, T).
struct DoDInterval {
  double T = 0.0;
  double T_star = 0.0;
  double tau = 0.0;

  double lower() const { return T - T_star - 2.0 * tau; }
  double upper() const { return T; }
  double width() const { return T_star + 2.0 * tau; }
};

// Windowed decomposition psi = psi_- + psi_+ with psi_* supported strictly
// inside the DoD interval:
//   psi_-(t) = w_-(t - T) psi,  psi_+(t) = w_+(t - T) psi,
//   psi_*(t) = w_+(t - T + T* + tau) w_-(t - T) psi.
struct SplitDensities {
  DensityHistory minus, plus, star;
};

SplitDensities split_density(const DensityHistory& history, double T, double tau,
                             double T_star);

struct RetardedOptions {
  double near_factor = 1.0;  // closer than near_factor * panel diameter: sub-panel quadrature
  double near_rtol = 1e-6;
};

// Retarded single-layer potential sum_k area_k psi(r_k, t - R_k/c)/(4 pi R_k)
// with cubic temporal interpolation; density is zero before the grid start
// and evaluation past the grid end is an error.
double retarded_single_layer(const SurfaceMesh& mesh, const DensityHistory& history,
                             const Vec3& r, double t, const RetardedOptions& opt = {});

// h_T(r,t) = b(r,t) - (S psi_-)(r,t) at interior probes.
double compute_hT(const SurfaceMesh& mesh, const IncidentPulse& pulse,
                  const SplitDensities& split, const Vec3& r, double t,
                  const RetardedOptions& opt = {});

struct HVerdict {
  double max_identity = 0.0;     // |h_T + u_*| on [T - tau, T + T*]
  double max_pre_interval = 0.0; // |h_T| before T - tau (after illumination)
  double max_post_support = 0.0; // |h_T| after T + T*
  double scale = 0.0;            // peak |b| on Gamma
  double tol = 0.0;
  double eps_tail = 0.0;         // pulse tail at the start of the DoD interval
  bool pass = false;
};

struct HVerifyOptions {
  RetardedOptions retarded;
  double illumination_eps = 1e-8;
  int times_per_region = 48;
};

HVerdict verify_h_identity(const SurfaceMesh& mesh, const IncidentPulse& pulse,
                           const DensityHistory& history, double T, double tau,
                           const std::vector<Vec3>& probes, double tol_dod,
                           const HVerifyOptions& opt = {});

// Finite-difference weights for the m-th derivative at x0 over the given
// stencil nodes (Fornberg's algorithm).
std::vector<double> fd_weights(int m, double x0, const std::vector<double>& stencil);

// History of the p-th time derivative, centered differences of order >= 4.
DensityHistory time_derivative_history(const DensityHistory& history, int p);

// Sobolev-Bochner interval norm
//   [ int_I ||psi||^2_{L2} dt + int_I ||d^p psi||^2_{L2} dt ]^{1/2}.
double bochner_norm(const DensityHistory& history, double t0, double t1, int p);

struct DodRatioReport {
  bool defined = false;
  double hp_ratio = 0.0;   // ||psi||_{H^p([T0, end])} / ||psi||_{H^{p+q+1}(I_T0)}
  double sup_ratio = 0.0;  // sup_{t>T0} ||psi(.,t)|| / ||psi||_{H^{q+2}(I_T0)}
  double hp_num = 0.0, hp_den = 0.0, sup_num = 0.0, sup_den = 0.0;
};

DodRatioReport dod_bound_report(const DensityHistory& history, double T0, double tau,
                                double T_star, int p, int q);

}  // namespace bdod

#endif
