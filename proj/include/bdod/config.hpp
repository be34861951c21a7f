// Copyright (c) the bdod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef BDOD_CONFIG_HPP
#define BDOD_CONFIG_HPP

#include <string>
#include <vector>

#include "bdod/incident.hpp"
#include "bdod/operators.hpp"
#include "bdod/synthesis.hpp"

namespace bdod {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Experiment configuration, schema version 1 (JSON). Loaded and validated by
// load_config; cross-checks that need the mesh (eps_tail, probe placement)
// run in prepare_mesh.
struct ExperimentConfig {
  int version = 1;

  struct MeshBlock {
    std::string shape = "sphere";  // sphere | cavity-cube | file
    int refine = 2;
    double radius = 1.0;
    std::string path;
  } mesh;

  IncidentPulse pulse;

  struct SweepBlock {
    double omega_min = 0.0;  // ignored for midpoint grids
    double omega_max = 16.0;
    int n_omega = 64;
    double omega0 = 1.0;
    std::string grid = "midpoint";  // midpoint | uniform
    bool resolvent_norms = true;
  } sweep;

  TimeGrid time;

  struct DodBlock {
    double T0 = 0.0;
    double tau = 0.5;
    int p = 1;
    int q = 0;
    double tol_dod = 1e-2;
    std::vector<Vec3> probes;
  } dod;

  struct ObservablesBlock {
    double R = 2.0;
    double h_vol = 0.5;
    Vec3 probe = Vec3(1.5, 0.0, 0.0);
    double fit_offset = -1.0;  // < 0: default r_max / c
    double noise_floor = 1e-10;
    int n_windows = 4;
  } observables;

  AssemblyOptions assembly;
  int jobs = 1;
  std::string output_dir = "out";
  std::string cache_dir;  // empty: BDOD_CACHE env var or caching off
};

ExperimentConfig load_config(const std::string& path);
// Builds (or loads) the mesh named by the config and runs the mesh-dependent
// validation: eps_tail <= 1e-8, sweep grid excludes omega0, Nyquist check.
SurfaceMesh prepare_mesh(const ExperimentConfig& cfg);
void validate_with_mesh(const ExperimentConfig& cfg, const SurfaceMesh& mesh);

std::vector<double> config_omega_grid(const ExperimentConfig& cfg);

// Full-precision text emit helpers (17 significant digits).
std::string format_g17(double v);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace bdod

#endif
