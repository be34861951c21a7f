// Copyright (c) the bdod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "bdod/dod.hpp"

#include <cmath>

#include "bdod/quadrature.hpp"

namespace bdod {

SplitDensities split_density(const DensityHistory& history, double T, double tau,
                             double T_star) {
  if (!(tau > 0.0) || !(T_star > 0.0)) throw DodError("split_density: tau, T* must be positive");
  double lo = T - T_star - 2.0 * tau;
  if (lo < history.grid.t_start - 1e-12 || T > history.grid.t_end + 1e-12)
    throw DodError("split_density: DoD interval exceeds the time grid");

  SplitDensities out;
  out.minus = history;
  out.plus = history;
  out.star = history;
  for (int k = 0; k < history.n_samples(); ++k) {
    double t = history.grid.time(k);
    auto [wm, wp] = window_pm(t, T, tau);
    double wstar = window_pm(t + T_star + tau, T, tau).second * wm;
    out.minus.values.col(k) *= wm;
    out.plus.values.col(k) *= wp;
    out.star.values.col(k) *= wstar;
  }
  return out;
}

namespace {

// Cubic Lagrange interpolation of a panel row at retarded time t; samples
// before the grid start are zero (density starts at rest).
inline double interp_density(const DensityHistory& h, int panel, double t) {
  const double dt = h.grid.dt();
  const int ns = h.n_samples();
  double x = (t - h.grid.t_start) / dt;
  if (x <= -2.0) return 0.0;
  int i0 = static_cast<int>(std::floor(x)) - 1;
  if (i0 > ns - 4) i0 = ns - 4;  // shift the stencil inside near the grid end
  if (i0 < -4) return 0.0;
  double acc = 0.0;
  for (int a = 0; a < 4; ++a) {
    int idx = i0 + a;
    if (idx < 0) continue;  // zero padding before the grid start
    double lag = 1.0;
    for (int b = 0; b < 4; ++b) {
      if (b == a) continue;
      lag *= (x - (i0 + b)) / double(a - b);
    }
    acc += lag * h.values(panel, idx);
  }
  return acc;
}

}  // namespace

double retarded_single_layer(const SurfaceMesh& mesh, const DensityHistory& history,
                             const Vec3& r, double t, const RetardedOptions& opt) {
  const double c = history.c;
  double acc = 0.0;
  for (int k = 0; k < mesh.n_panels(); ++k) {
    double R = (r - mesh.centroids[k]).norm();
    double t_ret = t - R / c;
    if (t_ret > history.grid.t_end + 1e-9 * history.grid.dt())
      throw DodError("retarded time beyond the stored density history");
    Triangle tri = mesh.panel_triangle(k);
    double diam = tri.diameter();
    if (R >= opt.near_factor * diam) {
      acc += mesh.areas[k] * interp_density(history, k, t_ret) / (4.0 * M_PI * R);
    } else {
      // Near-field path: sub-panel quadrature of the retarded kernel; the
      // density is constant in space on the panel.
      auto res = near_singular_integral(
          tri,
          [&](const Vec3& rp) {
            double Rq = (r - rp).norm();
            if (Rq < 1e-14) Rq = 1e-14;
            return Complex(interp_density(history, k, t - Rq / c) / (4.0 * M_PI * Rq), 0.0);
          },
          opt.near_rtol);
      acc += res.value.real();
    }
  }
  return acc;
}

double compute_hT(const SurfaceMesh& mesh, const IncidentPulse& pulse,
                  const SplitDensities& split, const Vec3& r, double t,
                  const RetardedOptions& opt) {
  return evaluate_b(pulse, r, t) - retarded_single_layer(mesh, split.minus, r, t, opt);
}

HVerdict verify_h_identity(const SurfaceMesh& mesh, const IncidentPulse& pulse,
                           const DensityHistory& history, double T, double tau,
                           const std::vector<Vec3>& probes, double tol_dod,
                           const HVerifyOptions& opt) {
  if (probes.empty()) throw DodError("verify_h_identity needs at least one probe");
  const double T_star = t_star(mesh, history.c);
  const double interval_lo = T - T_star - 2.0 * tau;

  HVerdict v;
  v.tol = tol_dod;
  auto [a_lo, a_hi] = arrival_range(pulse, mesh);
  v.eps_tail = pulse_tail_bound(pulse, a_lo, a_hi, interval_lo);
  if (v.eps_tail > opt.illumination_eps)
    throw DodError("illumination overlaps the DoD interval (pulse tail " +
                   std::to_string(v.eps_tail) + " at its start)");

  // Peak of |b| on Gamma, the reference scale for the residual maxima.
  double scale = 0.0;
  for (int k = 0; k < history.n_samples(); ++k) {
    double t = history.grid.time(k);
    if (t < illumination_start(pulse, mesh, 1e-6) ||
        t > illumination_end(pulse, mesh, 1e-6))
      continue;
    for (int j = 0; j < mesh.n_panels(); ++j)
      scale = std::max(scale, std::abs(evaluate_b(pulse, mesh.centroids[j], t)));
  }
  if (scale == 0.0) scale = std::abs(pulse.amplitude);
  v.scale = scale;

  SplitDensities split = split_density(history, T, tau, T_star);

  double illum_end = illumination_end(pulse, mesh, opt.illumination_eps);
  // Retarded evaluation at time t reaches back at most diam + probe offset;
  // staying below the grid end keeps every retarded time in range.
  double t_max = history.grid.t_end;

  auto sweep_region = [&](double lo, double hi, auto&& f) {
    if (!(hi > lo)) return;
    for (int i = 0; i < opt.times_per_region; ++i) {
      double t = lo + (hi - lo) * (i + 0.5) / opt.times_per_region;
      for (const Vec3& probe : probes) f(probe, t);
    }
  };

  // (b) h_T = 0 for t < T - tau (checked after illumination has ceased).
  sweep_region(illum_end, std::min(T - tau, t_max), [&](const Vec3& p, double t) {
    double h = compute_hT(mesh, pulse, split, p, t, opt.retarded);
    v.max_pre_interval = std::max(v.max_pre_interval, std::abs(h));
  });
  // (a) h_T = -u_* on [T - tau, T + T*].
  sweep_region(T - tau, std::min(T + T_star, t_max), [&](const Vec3& p, double t) {
    double h = compute_hT(mesh, pulse, split, p, t, opt.retarded);
    double ustar = retarded_single_layer(mesh, split.star, p, t, opt.retarded);
    v.max_identity = std::max(v.max_identity, std::abs(h + ustar));
  });
  // (c) h_T = 0 past T + T*.
  sweep_region(T + T_star, t_max, [&](const Vec3& p, double t) {
    double h = compute_hT(mesh, pulse, split, p, t, opt.retarded);
    v.max_post_support = std::max(v.max_post_support, std::abs(h));
  });

  double bound = tol_dod * scale;
  v.pass = v.max_identity <= bound && v.max_pre_interval <= bound &&
           v.max_post_support <= bound;
  return v;
}

std::vector<double> fd_weights(int m, double x0, const std::vector<double>& stencil) {
  // Fornberg (1988): weights for all derivatives up to m at x0.
  const int n = static_cast<int>(stencil.size());
  if (n < m + 1) throw DodError("fd_weights: stencil too short");
  std::vector<std::vector<double>> w(n, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0;
  double c4 = stencil[0] - x0;
  w[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    int mn = std::min(i, m);
    double c2 = 1.0;
    double c5 = c4;
    c4 = stencil[i] - x0;
    for (int j = 0; j < i; ++j) {
      double c3 = stencil[i] - stencil[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          w[i][k] = c1 * (k * w[i - 1][k - 1] - c5 * w[i - 1][k]) / c2;
        w[i][0] = -c1 * c5 * w[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k)
        w[j][k] = (c4 * w[j][k] - k * w[j][k - 1]) / c3;
      w[j][0] = c4 * w[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = w[i][m];
  return out;
}

DensityHistory time_derivative_history(const DensityHistory& history, int p) {
  if (p < 0 || p > 6) throw DodError("time derivative order must be in [0, 6]");
  if (p == 0) return history;
  const int hw = (p + 1) / 2 + 2;  // central stencil half-width, accuracy >= 4
  const int ns = history.n_samples();
  if (ns < 2 * hw + 1) throw DodError("history too short for the FD stencil");
  const double dt = history.grid.dt();

  std::vector<double> stencil(2 * hw + 1);
  for (int i = 0; i <= 2 * hw; ++i) stencil[i] = (i - hw) * dt;
  std::vector<double> wc = fd_weights(p, 0.0, stencil);

  DensityHistory out = history;
  out.values.setZero();
  for (int k = 0; k < ns; ++k) {
    int base = k - hw;
    if (base < 0) base = 0;
    if (base + 2 * hw >= ns) base = ns - 1 - 2 * hw;
    if (base == k - hw) {
      for (int i = 0; i <= 2 * hw; ++i)
        out.values.col(k) += wc[i] * history.values.col(base + i);
    } else {
      // One-sided stencil near the edges, same width and order.
      std::vector<double> pts(2 * hw + 1);
      for (int i = 0; i <= 2 * hw; ++i) pts[i] = (base + i - k) * dt;
      std::vector<double> we = fd_weights(p, 0.0, pts);
      for (int i = 0; i <= 2 * hw; ++i)
        out.values.col(k) += we[i] * history.values.col(base + i);
    }
  }
  return out;
}

double bochner_norm(const DensityHistory& history, double t0, double t1, int p) {
  if (!(t1 > t0)) throw DodError("bochner_norm: empty interval");
  if (p < 0 || p > 6) throw DodError("bochner_norm: p must be in [0, 6]");
  const double dt = history.grid.dt();
  const double tol = 1e-9 * dt;
  if (t0 < history.grid.t_start - tol || t1 > history.grid.t_end + tol)
    throw DodError("bochner_norm: interval exceeds the time grid");

  int k0 = static_cast<int>(std::ceil((t0 - history.grid.t_start) / dt - 1e-9));
  int k1 = static_cast<int>(std::floor((t1 - history.grid.t_start) / dt + 1e-9));
  const int hw = (p + 1) / 2 + 2;
  if (k1 - k0 < 1) throw DodError("bochner_norm: interval shorter than the grid spacing");
  if (history.n_samples() < 2 * hw + 1)
    throw DodError("bochner_norm: interval too short for the FD stencil");

  DensityHistory deriv = time_derivative_history(history, p);
  double i_zero = 0.0, i_p = 0.0;
  for (int k = k0; k <= k1; ++k) {
    double w = (k == k0 || k == k1) ? 0.5 * dt : dt;
    double n0 = history.l2_norm_at(k);
    double np = deriv.l2_norm_at(k);
    i_zero += w * n0 * n0;
    i_p += w * np * np;
  }
  return std::sqrt(i_zero + i_p);
}

DodRatioReport dod_bound_report(const DensityHistory& history, double T0, double tau,
                                double T_star, int p, int q) {
  DodRatioReport rep;
  double lo = T0 - T_star - 2.0 * tau;
  rep.hp_num = bochner_norm(history, T0, history.grid.t_end, p);
  rep.hp_den = bochner_norm(history, lo, T0, p + q + 1);
  rep.sup_den = bochner_norm(history, lo, T0, q + 2);

  double sup = 0.0;
  for (int k = 0; k < history.n_samples(); ++k)
    if (history.grid.time(k) > T0) sup = std::max(sup, history.l2_norm_at(k));
  rep.sup_num = sup;

  double peak = 0.0;
  for (int k = 0; k < history.n_samples(); ++k)
    peak = std::max(peak, history.l2_norm_at(k));
  double floor_val = 1e-12 * peak;
  rep.defined = rep.hp_den > floor_val && rep.sup_den > floor_val;
  if (rep.defined) {
    rep.hp_ratio = rep.hp_num / rep.hp_den;
    rep.sup_ratio = rep.sup_num / rep.sup_den;
  }
  return rep;
}

}  // namespace bdod
