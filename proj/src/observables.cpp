// Copyright (c) the bdod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "bdod/observables.hpp"

#include <cmath>

namespace bdod {

VolumeRegion make_volume_region(double R, double h,
                                const std::function<bool(const Vec3&)>& inside_solid,
                                double max_vertex_radius) {
  if (!(R > 0.0) || !(h > 0.0)) throw ObservableError("region parameters must be positive");
  if (R <= max_vertex_radius)
    throw ObservableError("region radius must keep the ball boundary clear of the obstacle");
  VolumeRegion region;
  region.R = R;
  region.h = h;
  region.inside_solid = inside_solid;
  int n = static_cast<int>(std::floor(R / h));
  for (int i = -n; i <= n; ++i)
    for (int j = -n; j <= n; ++j)
      for (int k = -n; k <= n; ++k) {
        Vec3 p(i * h, j * h, k * h);
        if (p.norm() >= R) continue;
        if (inside_solid(p)) continue;
        region.points.push_back(p);
      }
  if (region.points.empty()) throw ObservableError("volume region grid is empty");
  return region;
}

double field_u(const SurfaceMesh& mesh, const DensityHistory& history, const Vec3& r,
               double t, const RetardedOptions& opt) {
  return retarded_single_layer(mesh, history, r, t, opt);
}

double field_u_time_derivative(const SurfaceMesh& mesh, const DensityHistory& history,
                               const Vec3& r, double t, int p, const RetardedOptions& opt) {
  if (p < 1 || p > 2) throw ObservableError("field time derivative supports p in {1,2}");
  DensityHistory deriv = time_derivative_history(history, p);
  return retarded_single_layer(mesh, deriv, r, t, opt);
}

double local_energy(const SurfaceMesh& mesh, const DensityHistory& history,
                    const VolumeRegion& region, double t, const RetardedOptions& opt) {
  if (region.points.empty()) throw ObservableError("volume region grid is empty");
  DensityHistory dpsi = time_derivative_history(history, 1);

  auto usable = [&](const Vec3& p) {
    return p.norm() < region.R && !region.inside_solid(p);
  };
  auto u_at = [&](const Vec3& p) { return retarded_single_layer(mesh, history, p, t, opt); };

  const double h = region.h;
  double energy = 0.0;
  for (const Vec3& p : region.points) {
    double u_c = u_at(p);
    double grad2 = 0.0;
    for (int axis = 0; axis < 3; ++axis) {
      Vec3 e = Vec3::Zero();
      e[axis] = h;
      bool plus_ok = usable(p + e), minus_ok = usable(p - e);
      double d;
      if (plus_ok && minus_ok)
        d = (u_at(p + e) - u_at(p - e)) / (2.0 * h);
      else if (plus_ok)
        d = (u_at(p + e) - u_c) / h;
      else if (minus_ok)
        d = (u_c - u_at(p - e)) / h;
      else
        d = 0.0;
      grad2 += d * d;
    }
    double ut = retarded_single_layer(mesh, dpsi, p, t, opt);
    energy += (grad2 + ut * ut) * h * h * h;
  }
  return energy;
}

DecayReport decay_fit(const std::vector<double>& times, const std::vector<double>& norms,
                      double T0, double offset, bool energy_convention,
                      double noise_floor_rel) {
  if (times.size() != norms.size()) throw ObservableError("decay_fit: size mismatch");
  double peak = 0.0;
  for (double v : norms) peak = std::max(peak, v);
  double floor_val = noise_floor_rel * peak;

  DecayReport rep;
  std::vector<double> lx, ly;
  for (size_t i = 0; i < times.size(); ++i) {
    double s = times[i] - T0 - offset;
    if (s <= 0.0 || norms[i] <= floor_val) continue;
    lx.push_back(std::log(s));
    ly.push_back(std::log(norms[i]));
    rep.times.push_back(times[i]);
    rep.norms.push_back(norms[i]);
  }
  if (lx.size() < 8)
    throw ObservableError("decay_fit: need at least 8 usable samples past T0 + offset");

  const double n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  rep.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  double intercept = (sy - rep.slope * sx) / n;
  double ss = 0.0;
  for (size_t i = 0; i < lx.size(); ++i) {
    double e = ly[i] - (intercept + rep.slope * lx[i]);
    ss += e * e;
  }
  rep.residual = std::sqrt(ss / n);
  rep.fitted_n = energy_convention ? 0.5 * (1.0 - rep.slope) : 0.5 - rep.slope;
  rep.window_lo = rep.times.front();
  rep.window_hi = rep.times.back();
  rep.n_used = static_cast<int>(lx.size());
  return rep;
}

}  // namespace bdod
