// Copyright (c) the bdod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef BDOD_ORACLE_HPP
#define BDOD_ORACLE_HPP

#include <complex>
#include <stdexcept>
#include <vector>

#include "bdod/geometry.hpp"

namespace bdod {

struct OracleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SphBessel {
  double j, jp, y, yp;  // j_n(x), j_n'(x), y_n(x), y_n'(x)
};

// Spherical Bessel functions: y_n by upward recurrence, j_n by downward
// (Miller) recurrence normalized against j_0 = sin(x)/x.
SphBessel sph_bessel(int n, double x);

// Eigenvalues of S_omega, K*_omega and A_{omega,eta} on the unit sphere,
// indexed by spherical-harmonic degree n (each with multiplicity 2n+1).
//
// Separation of variables with G = i kappa sum_n j_n(kappa r_<) h_n(kappa r_>)
// sum_m Y_nm Y_nm* gives, on the unit sphere,
//   s_n = i kappa j_n(kappa) h_n(kappa),
//   k_n = (i kappa^2 / 2) [j_n'(kappa) h_n(kappa) + j_n(kappa) h_n'(kappa)]
// (k_n is the mean of the interior/exterior normal derivatives of the
// single-layer potential). Laplace limits: s_n -> 1/(2n+1) and
// k_n -> -1/(2(2n+1)) as kappa -> 0.
struct ModalSpectrum {
  int n_max = 0;
  double kappa = 0.0, eta = 0.0;
  std::vector<std::complex<double>> s_eigs, k_eigs, a_eigs;
};

ModalSpectrum modal_spectrum(double kappa, double eta, int n_max);

// 1 / min_n |a_n|; requires the modal tail to be increasing over the last
// ten degrees so the minimum is interior to the truncation.
double sphere_resolvent_norm(double kappa, double eta, int n_max = 60);

// Real spherical harmonic of degree n, order m in [-n, n], evaluated at the
// direction of r (normalized internally). Orthonormal on the unit sphere.
double real_sph_harmonic(int n, int m, const Vec3& r);

}  // namespace bdod

#endif
