// Copyright (c) the bdod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "bdod/config.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace bdod {

using nlohmann::json;

namespace {

Vec3 vec3_from(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3)
    throw ConfigError(std::string(what) + " must be a 3-element array");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  return it->get<T>();
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }

  ExperimentConfig cfg;
  if (get_or<int>(j, "version", 0) != 1)
    throw ConfigError("config must declare \"version\": 1");

  if (j.contains("mesh")) {
    const auto& m = j["mesh"];
    cfg.mesh.shape = get_or<std::string>(m, "shape", "sphere");
    cfg.mesh.refine = get_or<int>(m, "refine", 2);
    cfg.mesh.radius = get_or<double>(m, "radius", 1.0);
    cfg.mesh.path = get_or<std::string>(m, "path", "");
    if (cfg.mesh.shape != "sphere" && cfg.mesh.shape != "cavity-cube" &&
        cfg.mesh.shape != "file")
      throw ConfigError("mesh.shape must be sphere, cavity-cube or file");
    if (cfg.mesh.refine < 0) throw ConfigError("mesh.refine must be nonnegative");
    if (cfg.mesh.shape == "sphere" && !(cfg.mesh.radius > 0.0))
      throw ConfigError("mesh.radius must be positive");
    if (cfg.mesh.shape == "file" && cfg.mesh.path.empty())
      throw ConfigError("mesh.shape=file requires mesh.path");
  }

  if (j.contains("pulse")) {
    const auto& p = j["pulse"];
    if (p.contains("direction")) cfg.pulse.direction = vec3_from(p["direction"], "pulse.direction").normalized();
    cfg.pulse.carrier = get_or<double>(p, "carrier", 0.0);
    cfg.pulse.width = get_or<double>(p, "width", 1.0);
    cfg.pulse.delay = get_or<double>(p, "delay", 0.0);
    cfg.pulse.amplitude = get_or<double>(p, "amplitude", 1.0);
    cfg.pulse.c = get_or<double>(p, "wavespeed", 1.0);
    cfg.pulse.validate();
  }

  if (j.contains("sweep")) {
    const auto& s = j["sweep"];
    cfg.sweep.omega_min = get_or<double>(s, "omega_min", 0.0);
    cfg.sweep.omega_max = get_or<double>(s, "omega_max", 16.0);
    cfg.sweep.n_omega = get_or<int>(s, "n_omega", 64);
    cfg.sweep.omega0 = get_or<double>(s, "omega0", 1.0);
    cfg.sweep.grid = get_or<std::string>(s, "grid", "midpoint");
    cfg.sweep.resolvent_norms = get_or<bool>(s, "resolvent_norms", true);
    if (!(cfg.sweep.omega0 > 0.0)) throw ConfigError("sweep.omega0 must be positive");
    if (cfg.sweep.n_omega < 2) throw ConfigError("sweep.n_omega must be >= 2");
    if (cfg.sweep.grid != "midpoint" && cfg.sweep.grid != "uniform")
      throw ConfigError("sweep.grid must be midpoint or uniform");
  }

  if (j.contains("time")) {
    const auto& t = j["time"];
    cfg.time.t_start = get_or<double>(t, "t_start", 0.0);
    cfg.time.t_end = get_or<double>(t, "t_end", 1.0);
    cfg.time.n_samples = get_or<int>(t, "n_samples", 256);
  }

  if (j.contains("dod")) {
    const auto& d = j["dod"];
    cfg.dod.T0 = get_or<double>(d, "T0", 0.0);
    cfg.dod.tau = get_or<double>(d, "tau", 0.5);
    cfg.dod.p = get_or<int>(d, "p", 1);
    cfg.dod.q = get_or<int>(d, "q", 0);
    cfg.dod.tol_dod = get_or<double>(d, "tol_dod", 1e-2);
    if (d.contains("probes"))
      for (const auto& pr : d["probes"]) cfg.dod.probes.push_back(vec3_from(pr, "dod.probes[i]"));
    if (!(cfg.dod.tau > 0.0)) throw ConfigError("dod.tau must be positive");
    if (cfg.dod.p < 0 || cfg.dod.p > 6 || cfg.dod.q < 0 || cfg.dod.q > 4)
      throw ConfigError("dod.p must be in [0,6] and dod.q in [0,4]");
  }

  if (j.contains("observables")) {
    const auto& o = j["observables"];
    cfg.observables.R = get_or<double>(o, "R", 2.0);
    cfg.observables.h_vol = get_or<double>(o, "h_vol", 0.5);
    if (o.contains("probe")) cfg.observables.probe = vec3_from(o["probe"], "observables.probe");
    cfg.observables.fit_offset = get_or<double>(o, "fit_offset", -1.0);
    cfg.observables.noise_floor = get_or<double>(o, "noise_floor", 1e-10);
    cfg.observables.n_windows = get_or<int>(o, "n_windows", 4);
  }

  if (j.contains("assembly")) {
    const auto& a = j["assembly"];
    cfg.assembly.far_degree = get_or<int>(a, "far_degree", cfg.assembly.far_degree);
    cfg.assembly.near_factor = get_or<double>(a, "near_factor", cfg.assembly.near_factor);
    cfg.assembly.near_rtol = get_or<double>(a, "near_rtol", cfg.assembly.near_rtol);
  }

  cfg.jobs = get_or<int>(j, "jobs", 1);
  cfg.output_dir = get_or<std::string>(j, "output_dir", "out");
  cfg.cache_dir = get_or<std::string>(j, "cache_dir", "");
  if (cfg.cache_dir.empty()) {
    const char* env = std::getenv("BDOD_CACHE");
    if (env) cfg.cache_dir = env;
  }
  return cfg;
}

SurfaceMesh prepare_mesh(const ExperimentConfig& cfg) {
  SurfaceMesh mesh;
  if (cfg.mesh.shape == "sphere")
    mesh = build_sphere(cfg.mesh.radius, cfg.mesh.refine);
  else if (cfg.mesh.shape == "cavity-cube")
    mesh = build_cavity_cube(cfg.mesh.refine);
  else
    mesh = load_mesh(cfg.mesh.path);
  validate_with_mesh(cfg, mesh);
  return mesh;
}

void validate_with_mesh(const ExperimentConfig& cfg, const SurfaceMesh& mesh) {
  double eps = epsilon_tail(cfg.pulse, mesh);
  if (eps > 1e-8)
    throw ConfigError("pulse violates the causality surrogate: eps_tail = " +
                      format_g17(eps) + " > 1e-8 (increase delay or shrink width)");
  for (double w : config_omega_grid(cfg))
    if (w == cfg.sweep.omega0) throw ConfigError("sweep grid contains omega0");
  cfg.time.validate(cfg.sweep.omega_max);
}

std::vector<double> config_omega_grid(const ExperimentConfig& cfg) {
  if (cfg.sweep.grid == "midpoint")
    return make_midpoint_grid(cfg.sweep.omega_max, cfg.sweep.n_omega, cfg.sweep.omega0);
  return make_uniform_grid(cfg.sweep.omega_min, cfg.sweep.omega_max, cfg.sweep.n_omega,
                           cfg.sweep.omega0);
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  out << content;
  if (!out) throw ConfigError("write failure on " + path);
}

}  // namespace bdod
