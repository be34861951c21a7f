// Copyright (c) the bdod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef BDOD_INCIDENT_HPP
#define BDOD_INCIDENT_HPP

#include <Eigen/Dense>
#include <complex>

#include "bdod/geometry.hpp"
#include "bdod/operators.hpp"

namespace bdod {

struct PulseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Traveling plane-wave pulse
//   b(r,t) = amplitude exp(-(t - delay - d.r/c)^2 / (2 width^2))
//            cos(carrier (t - delay - d.r/c)),
// an exact solution of the wave equation with a closed-form temporal
// spectrum. Compact support in time holds only to the Gaussian tail; the
// reported eps_tail must stay below 1e-8 for accepted configurations.
struct IncidentPulse {
  Vec3 direction = Vec3(1, 0, 0);  // unit propagation direction
  double carrier = 0.0;            // omega_c >= 0
  double width = 1.0;              // Gaussian sigma > 0
  double delay = 0.0;              // t0
  double amplitude = 1.0;
  double c = 1.0;  // wavespeed

  void validate() const;
  double phase(const Vec3& r, double t) const {
    return t - delay - direction.dot(r) / c;
  }
};

double evaluate_b(const IncidentPulse& pulse, const Vec3& r, double t);
double evaluate_db_dt(const IncidentPulse& pulse, const Vec3& r, double t);
// n . grad b via the traveling-wave identity grad b = -(d/c) db/dt.
double evaluate_dndb(const IncidentPulse& pulse, const Vec3& r, const Vec3& normal, double t);

// Temporal Fourier transform. The pairing F(w) = int f e^{+iwt} dt with
// synthesis along e^{-iwt} keeps the kernel e^{+i kappa R} on the retarded
// (causal) branch:
//   B(r,w) = amplitude sigma sqrt(pi/2)
//            [e^{-sigma^2 (w-wc)^2/2} + e^{-sigma^2 (w+wc)^2/2}] e^{+iw(t0 + d.r/c)}.
std::complex<double> spectrum_B(const IncidentPulse& pulse, const Vec3& r, double omega);
// Analytic omega-derivatives, m <= 2 (used by the Leibniz identity check).
std::complex<double> spectrum_B_domega(const IncidentPulse& pulse, const Vec3& r,
                                       double omega, int m);
std::complex<double> spectrum_dnB(const IncidentPulse& pulse, const Vec3& r,
                                  const Vec3& normal, double omega);
std::complex<double> spectrum_dnB_domega(const IncidentPulse& pulse, const Vec3& r,
                                         const Vec3& normal, double omega, int m);

// CFIE right-hand side: entries spectrum_dnB(c_j) - i eta spectrum_B(c_j).
Eigen::VectorXcd cfie_rhs(const IncidentPulse& pulse, const SurfaceMesh& mesh,
                          const KernelParams& params);
// m-th omega-derivative of the right-hand side, accounting for the eta
// switch (eta = 1 below omega0, eta = omega above).
Eigen::VectorXcd cfie_rhs_domega(const IncidentPulse& pulse, const SurfaceMesh& mesh,
                                 const KernelParams& params, int m);

// Range of d.r/c over the mesh (arrival-time spread across the obstacle).
std::pair<double, double> arrival_range(const IncidentPulse& pulse, const SurfaceMesh& mesh);

// sup over the obstacle of |b(.,t)| / amplitude at a fixed time.
double pulse_tail_bound(const IncidentPulse& pulse, double arrival_min, double arrival_max,
                        double t);

// Causality surrogate: sup over Omega-bar and t <= 0 of |b|/amplitude.
double epsilon_tail(const IncidentPulse& pulse, const SurfaceMesh& mesh);

// Time after which the pulse trace on the obstacle stays below
// eps * amplitude (end of illumination), and the matching start time.
double illumination_end(const IncidentPulse& pulse, const SurfaceMesh& mesh, double eps);
double illumination_start(const IncidentPulse& pulse, const SurfaceMesh& mesh, double eps);

}  // namespace bdod

#endif
