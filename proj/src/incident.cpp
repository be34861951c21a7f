// Copyright (c) the bdod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "bdod/incident.hpp"

#include <cmath>

namespace bdod {

void IncidentPulse::validate() const {
  if (std::abs(direction.norm() - 1.0) > 1e-12)
    throw PulseError("pulse direction must be a unit vector");
  if (!(width > 0.0)) throw PulseError("pulse width must be positive");
  if (!(c > 0.0)) throw PulseError("wavespeed must be positive");
  if (carrier < 0.0) throw PulseError("carrier must be nonnegative");
}

double evaluate_b(const IncidentPulse& pulse, const Vec3& r, double t) {
  double ph = pulse.phase(r, t);
  return pulse.amplitude * std::exp(-ph * ph / (2.0 * pulse.width * pulse.width)) *
         std::cos(pulse.carrier * ph);
}

double evaluate_db_dt(const IncidentPulse& pulse, const Vec3& r, double t) {
  double ph = pulse.phase(r, t);
  double s2 = pulse.width * pulse.width;
  double envelope = std::exp(-ph * ph / (2.0 * s2));
  return pulse.amplitude * envelope *
         (-ph / s2 * std::cos(pulse.carrier * ph) -
          pulse.carrier * std::sin(pulse.carrier * ph));
}

double evaluate_dndb(const IncidentPulse& pulse, const Vec3& r, const Vec3& normal,
                     double t) {
  return -pulse.direction.dot(normal) / pulse.c * evaluate_db_dt(pulse, r, t);
}

namespace {

// d^m/dw^m of g(w) e^{+i w theta} with g = exp(-sigma^2 (w -+ wc)^2 / 2).
// The phase sign pairs with the retarded kernel e^{+i kappa R}: transforms
// here are F(w) = int f e^{+iwt} dt, synthesis uses e^{-iwt}. Each
// derivative multiplies by u(w) = -sigma^2 (w -+ wc) + i theta and the
// second adds the u' = -sigma^2 correction.
std::complex<double> gaussian_line_domega(double sigma, double wshift, double theta,
                                          double omega, int m) {
  double u_re = -sigma * sigma * (omega - wshift);
  std::complex<double> u(u_re, theta);
  double g = std::exp(-sigma * sigma * (omega - wshift) * (omega - wshift) / 2.0);
  std::complex<double> e(std::cos(omega * theta), std::sin(omega * theta));
  std::complex<double> base = g * e;
  switch (m) {
    case 0:
      return base;
    case 1:
      return u * base;
    case 2:
      return (u * u - sigma * sigma) * base;
    default:
      throw PulseError("spectrum derivatives implemented for m <= 2");
  }
}

}  // namespace

std::complex<double> spectrum_B_domega(const IncidentPulse& pulse, const Vec3& r,
                                       double omega, int m) {
  double theta = pulse.delay + pulse.direction.dot(r) / pulse.c;
  double sigma = pulse.width;
  double pref = pulse.amplitude * sigma * std::sqrt(M_PI / 2.0);
  return pref * (gaussian_line_domega(sigma, pulse.carrier, theta, omega, m) +
                 gaussian_line_domega(sigma, -pulse.carrier, theta, omega, m));
}

std::complex<double> spectrum_B(const IncidentPulse& pulse, const Vec3& r, double omega) {
  return spectrum_B_domega(pulse, r, omega, 0);
}

std::complex<double> spectrum_dnB_domega(const IncidentPulse& pulse, const Vec3& r,
                                         const Vec3& normal, double omega, int m) {
  // d_t maps to -i w under F = int f e^{+iwt} dt, so
  // dnB(w) = -(d.n/c) (-iw) B(w) = (d.n/c) iw B(w).
  double proj = pulse.direction.dot(normal) / pulse.c;
  const std::complex<double> i_unit(0.0, 1.0);
  std::complex<double> val =
      omega * spectrum_B_domega(pulse, r, omega, m) +
      (m >= 1 ? double(m) * spectrum_B_domega(pulse, r, omega, m - 1)
              : std::complex<double>(0.0));
  return proj * i_unit * val;
}

std::complex<double> spectrum_dnB(const IncidentPulse& pulse, const Vec3& r,
                                  const Vec3& normal, double omega) {
  return spectrum_dnB_domega(pulse, r, normal, omega, 0);
}

Eigen::VectorXcd cfie_rhs(const IncidentPulse& pulse, const SurfaceMesh& mesh,
                          const KernelParams& params) {
  const int n = mesh.n_panels();
  Eigen::VectorXcd rhs(n);
  const std::complex<double> ieta(0.0, params.eta);
  for (int j = 0; j < n; ++j) {
    rhs[j] = spectrum_dnB(pulse, mesh.centroids[j], mesh.normals[j], params.omega) -
             ieta * spectrum_B(pulse, mesh.centroids[j], params.omega);
  }
  return rhs;
}

Eigen::VectorXcd cfie_rhs_domega(const IncidentPulse& pulse, const SurfaceMesh& mesh,
                                 const KernelParams& params, int m) {
  const int n = mesh.n_panels();
  const bool high = params.omega > params.omega0;
  const std::complex<double> i_unit(0.0, 1.0);
  Eigen::VectorXcd rhs(n);
  for (int j = 0; j < n; ++j) {
    const Vec3& rj = mesh.centroids[j];
    std::complex<double> v = spectrum_dnB_domega(pulse, rj, mesh.normals[j], params.omega, m);
    if (high) {
      // d^m [w B] = w d^m B + m d^{m-1} B
      v -= i_unit * (params.omega * spectrum_B_domega(pulse, rj, params.omega, m) +
                     (m >= 1 ? double(m) * spectrum_B_domega(pulse, rj, params.omega, m - 1)
                             : std::complex<double>(0.0)));
    } else {
      v -= i_unit * spectrum_B_domega(pulse, rj, params.omega, m);
    }
    rhs[j] = v;
  }
  return rhs;
}

std::pair<double, double> arrival_range(const IncidentPulse& pulse, const SurfaceMesh& mesh) {
  double lo = std::numeric_limits<double>::max(), hi = -lo;
  for (const auto& v : mesh.vertices) {
    double a = pulse.direction.dot(v) / pulse.c;
    lo = std::min(lo, a);
    hi = std::max(hi, a);
  }
  return {lo, hi};
}

double pulse_tail_bound(const IncidentPulse& pulse, double arrival_min, double arrival_max,
                        double t) {
  // Phase t - t0 - a ranges over [t - t0 - a_max, t - t0 - a_min]; the
  // envelope peaks at the point of that interval closest to zero.
  double lo = t - pulse.delay - arrival_max;
  double hi = t - pulse.delay - arrival_min;
  double ph = 0.0;
  if (lo > 0.0)
    ph = lo;
  else if (hi < 0.0)
    ph = hi;
  return std::exp(-ph * ph / (2.0 * pulse.width * pulse.width));
}

double epsilon_tail(const IncidentPulse& pulse, const SurfaceMesh& mesh) {
  auto [lo, hi] = arrival_range(pulse, mesh);
  return pulse_tail_bound(pulse, lo, hi, 0.0);
}

double illumination_end(const IncidentPulse& pulse, const SurfaceMesh& mesh, double eps) {
  auto [lo, hi] = arrival_range(pulse, mesh);
  double margin = pulse.width * std::sqrt(-2.0 * std::log(eps));
  return pulse.delay + hi + margin;
}

double illumination_start(const IncidentPulse& pulse, const SurfaceMesh& mesh, double eps) {
  auto [lo, hi] = arrival_range(pulse, mesh);
  double margin = pulse.width * std::sqrt(-2.0 * std::log(eps));
  return pulse.delay + lo - margin;
}

}  // namespace bdod
