// Copyright (c) the bdod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "bdod/oracle.hpp"

#include <cmath>

namespace bdod {

SphBessel sph_bessel(int n, double x) {
  if (!(x > 0.0)) throw OracleError("sph_bessel requires x > 0");
  if (n < 0 || n > 200) throw OracleError("sph_bessel degree out of range");

  // y_n grows with n: upward recurrence is stable.
  double y0 = -std::cos(x) / x;
  double y1 = -std::cos(x) / (x * x) - std::sin(x) / x;
  std::vector<double> y(std::max(n + 2, 2));
  y[0] = y0;
  y[1] = y1;
  for (int k = 1; k <= n; ++k) {
    y[k + 1] = (2.0 * k + 1.0) / x * y[k] - y[k - 1];
    if (std::abs(y[k + 1]) > 1e280)
      throw OracleError("sph_bessel overflow: n too large for this x");
  }

  // j_n decays with n past the turning point: downward (Miller) recurrence
  // from a start order well above max(n, x), normalized by j_0.
  int start = n + 16 + static_cast<int>(std::ceil(1.5 * x));
  std::vector<double> j(start + 2, 0.0);
  double jp1 = 0.0, jp0 = 1e-300;
  j[start + 1] = jp1;
  j[start] = jp0;
  for (int k = start; k >= 1; --k) {
    double jm = (2.0 * k + 1.0) / x * j[k] - j[k + 1];
    j[k - 1] = jm;
    if (std::abs(jm) > 1e250) {
      for (int q = k - 1; q <= start + 1; ++q) j[q] *= 1e-250;
    }
  }
  double scale = (std::sin(x) / x) / j[0];
  for (auto& v : j) v *= scale;

  SphBessel out;
  out.j = j[n];
  out.y = y[n];
  // f_n' = f_{n-1} - (n+1)/x f_n, with f_{-1}(x) = cos(x)/x for j and
  // sin(x)/x for y.
  double jm1 = (n == 0) ? std::cos(x) / x : j[n - 1];
  double ym1 = (n == 0) ? std::sin(x) / x : y[n - 1];
  out.jp = jm1 - (n + 1.0) / x * out.j;
  out.yp = ym1 - (n + 1.0) / x * out.y;
  return out;
}

ModalSpectrum modal_spectrum(double kappa, double eta, int n_max) {
  if (!(kappa > 0.0)) throw OracleError("modal_spectrum requires kappa > 0");
  ModalSpectrum ms;
  ms.n_max = n_max;
  ms.kappa = kappa;
  ms.eta = eta;
  ms.s_eigs.resize(n_max + 1);
  ms.k_eigs.resize(n_max + 1);
  ms.a_eigs.resize(n_max + 1);
  const std::complex<double> i_unit(0.0, 1.0);
  for (int n = 0; n <= n_max; ++n) {
    SphBessel b = sph_bessel(n, kappa);
    std::complex<double> h(b.j, b.y);    // h_n^{(1)}
    std::complex<double> hp(b.jp, b.yp);
    ms.s_eigs[n] = i_unit * kappa * b.j * h;
    ms.k_eigs[n] = i_unit * kappa * kappa * 0.5 * (b.jp * h + b.j * hp);
    ms.a_eigs[n] = 0.5 + ms.k_eigs[n] - i_unit * eta * ms.s_eigs[n];
  }
  return ms;
}

double sphere_resolvent_norm(double kappa, double eta, int n_max) {
  if (n_max < 12) throw OracleError("sphere_resolvent_norm needs n_max >= 12");
  // The modal resonance dips live at degrees n up to about kappa; past them
  // |a_n| settles towards its n -> infinity limit 1/2 (the K* and eta S
  // eigenvalues decay like 1/n; the residual tail dip below 1/2 near
  // n ~ 2 eta^2 is smaller than 1/(16 eta^2)). The truncation is safe when
  // the computed range extends past the resonance region, and the limit
  // value 1/2 enters the minimum to cover the unresolved shallow tail.
  if (n_max < kappa + 15)
    throw OracleError("n_max truncates inside the resonance region; raise n_max");
  ModalSpectrum ms = modal_spectrum(kappa, eta, n_max);
  for (int n = n_max - 9; n <= n_max; ++n) {
    double v = std::abs(ms.a_eigs[n]);
    if (!(v > 0.4 && v < 0.6))
      throw OracleError("modal tail has not settled near its limit; raise n_max");
  }
  double amin = 0.5;
  for (int n = 0; n <= n_max; ++n) amin = std::min(amin, std::abs(ms.a_eigs[n]));
  if (!(amin > 0.0)) throw OracleError("modal eigenvalue vanished");
  return 1.0 / amin;
}

namespace {

// Associated Legendre P_n^m(x) (no Condon-Shortley phase), stable upward
// recurrence in n for fixed m.
double assoc_legendre(int n, int m, double x) {
  double pmm = 1.0;
  if (m > 0) {
    double somx2 = std::sqrt(std::max(0.0, 1.0 - x * x));
    double fact = 1.0;
    for (int i = 1; i <= m; ++i) {
      pmm *= fact * somx2;
      fact += 2.0;
    }
  }
  if (n == m) return pmm;
  double pmmp1 = x * (2.0 * m + 1.0) * pmm;
  if (n == m + 1) return pmmp1;
  double pnn = 0.0;
  for (int k = m + 2; k <= n; ++k) {
    pnn = ((2.0 * k - 1.0) * x * pmmp1 - (k + m - 1.0) * pmm) / (k - m);
    pmm = pmmp1;
    pmmp1 = pnn;
  }
  return pnn;
}

}  // namespace

double real_sph_harmonic(int n, int m, const Vec3& r) {
  if (n < 0 || std::abs(m) > n) throw OracleError("invalid spherical harmonic indices");
  Vec3 u = r.normalized();
  double ct = u.z();
  double phi = std::atan2(u.y(), u.x());
  int am = std::abs(m);
  double lognorm = 0.0;  // sqrt((2n+1)/(4pi) (n-|m|)!/(n+|m|)!)
  for (int k = n - am + 1; k <= n + am; ++k) lognorm -= std::log(double(k));
  double norm = std::sqrt((2.0 * n + 1.0) / (4.0 * M_PI) * std::exp(lognorm));
  double p = assoc_legendre(n, am, ct);
  if (m == 0) return norm * p;
  double sq2 = std::sqrt(2.0);
  if (m > 0) return sq2 * norm * p * std::cos(am * phi);
  return sq2 * norm * p * std::sin(am * phi);
}

}  // namespace bdod
