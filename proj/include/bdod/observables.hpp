// Copyright (c) the bdod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef BDOD_OBSERVABLES_HPP
#define BDOD_OBSERVABLES_HPP

#include <functional>
#include <vector>

#include "bdod/dod.hpp"

namespace bdod {

struct ObservableError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Uniform grid covering D = Omega^c intersect {|r| < R}; every point is
// strictly outside the obstacle per the analytic inside test.
struct VolumeRegion {
  double R = 0.0;
  double h = 0.0;
  std::vector<Vec3> points;
  std::function<bool(const Vec3&)> inside_solid;
};

VolumeRegion make_volume_region(double R, double h,
                                const std::function<bool(const Vec3&)>& inside_solid,
                                double max_vertex_radius);

// Scattered field via the Kirchhoff representation u = S psi.
double field_u(const SurfaceMesh& mesh, const DensityHistory& history, const Vec3& r,
               double t, const RetardedOptions& opt = {});

// d_t^p u using an FD-differentiated density history (p in {1,2}).
double field_u_time_derivative(const SurfaceMesh& mesh, const DensityHistory& history,
                               const Vec3& r, double t, int p,
                               const RetardedOptions& opt = {});

// Local energy E(u, D, t) = sum over the region grid of
// (|grad u|^2 + |u_t|^2) h^3; gradients by central differences on the grid
// (one-sided next to masked points).
double local_energy(const SurfaceMesh& mesh, const DensityHistory& history,
                    const VolumeRegion& region, double t,
                    const RetardedOptions& opt = {});

struct DecayReport {
  std::vector<double> times, norms;
  double slope = 0.0;
  double fitted_n = 0.0;
  double residual = 0.0;
  double window_lo = 0.0, window_hi = 0.0;
  int n_used = 0;
};

// Least-squares slope of log(norm) against log(t - T0 - offset); fitted_n
// is recovered from slope = 1/2 - n, or 1 - 2n under the energy convention.
DecayReport decay_fit(const std::vector<double>& times, const std::vector<double>& norms,
                      double T0, double offset, bool energy_convention = false,
                      double noise_floor_rel = 1e-10);

}  // namespace bdod

#endif
