// Copyright (c) the bdod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
//
// bdod: boundary-integral workbench for resolvent sweeps, frequency-time
// synthesis, bootstrap domain-of-dependence verification and decay fits.
// Subcommands: mesh | sweep | qfit | synthesize | dod-verify | decay | oracle.
// Exit codes: 0 on success/pass, 2 on a failed verdict, 1 on error.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>

#include "bdod/cache.hpp"
#include "bdod/config.hpp"
#include "bdod/dod.hpp"
#include "bdod/observables.hpp"
#include "bdod/oracle.hpp"
#include "bdod/synthesis.hpp"

using namespace bdod;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;    // overrides config output_dir when set
  std::string cache_dir;  // overrides config cache_dir when set
  int jobs = 0;           // overrides config jobs when > 0
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "experiment config (JSON, version 1)")
      ->required();
  cmd->add_option("--out", args.out_dir, "output directory (overrides config)");
  cmd->add_option("--cache", args.cache_dir, "cache directory (overrides config)");
  cmd->add_option("--jobs", args.jobs, "worker count (overrides config)");
}

ExperimentConfig resolve_config(const CommonArgs& args) {
  ExperimentConfig cfg = load_config(args.config_path);
  if (!args.out_dir.empty()) cfg.output_dir = args.out_dir;
  if (!args.cache_dir.empty()) cfg.cache_dir = args.cache_dir;
  if (args.jobs > 0) cfg.jobs = args.jobs;
  fs::create_directories(cfg.output_dir);
  return cfg;
}

void write_json_file(const std::string& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

uint64_t pulse_hash(const IncidentPulse& p) {
  uint64_t h = fnv1a("pulse", 5);
  for (int d = 0; d < 3; ++d) h = hash_double(h, p.direction[d]);
  h = hash_double(h, p.carrier);
  h = hash_double(h, p.width);
  h = hash_double(h, p.delay);
  h = hash_double(h, p.amplitude);
  h = hash_double(h, p.c);
  return h;
}

uint64_t sweep_point_key(uint64_t mesh_hash, const ExperimentConfig& cfg, double omega) {
  uint64_t h = mesh_hash;
  h = fnv1a("sweep", 5, h);
  h = hash_double(h, pulse_hash(cfg.pulse));
  h = hash_double(h, omega);
  h = hash_double(h, cfg.sweep.omega0);
  h = hash_double(h, cfg.pulse.c);
  h = fnv1a(&cfg.assembly.far_degree, sizeof(int), h);
  h = hash_double(h, cfg.assembly.near_factor);
  h = hash_double(h, cfg.assembly.near_rtol);
  int rn = cfg.sweep.resolvent_norms ? 1 : 0;
  h = fnv1a(&rn, sizeof(int), h);
  return h;
}

std::string csv_line(std::initializer_list<double> vals) {
  std::string line;
  bool first = true;
  for (double v : vals) {
    if (!first) line += ",";
    line += format_g17(v);
    first = false;
  }
  return line + "\n";
}

// ---------------------------------------------------------------------------

int cmd_mesh(const std::string& shape, int refine, double radius, const std::string& out) {
  SurfaceMesh mesh;
  if (shape == "sphere")
    mesh = build_sphere(radius, refine);
  else if (shape == "cavity-cube")
    mesh = build_cavity_cube(refine);
  else
    throw MeshError("unknown shape '" + shape + "'");
  save_mesh(mesh, out);
  std::cout << "wrote " << out << ": " << mesh.n_panels() << " panels, diameter "
            << format_g17(mesh.diameter) << "\n";
  return 0;
}

SweepResult run_sweep_cached(const ExperimentConfig& cfg, const SurfaceMesh& mesh,
                             int* hits_out = nullptr) {
  std::vector<double> grid = config_omega_grid(cfg);
  SweepCache cache(cfg.cache_dir);
  uint64_t mh = mesh_content_hash(mesh);

  SweepResult sweep;
  sweep.omegas = grid;
  sweep.omega0 = cfg.sweep.omega0;
  sweep.c = cfg.pulse.c;
  sweep.weight = mesh.area_weights();
  auto [a_lo, a_hi] = arrival_range(cfg.pulse, mesh);
  sweep.signal_duration = (a_hi - a_lo) + 12.0 * cfg.pulse.width;
  const int m = static_cast<int>(grid.size());
  sweep.densities.resize(mesh.n_panels(), m);
  sweep.resolvent_norms.assign(m, 0.0);
  sweep.rhs_norms.assign(m, 0.0);
  sweep.solve_residuals.assign(m, 0.0);

  // Cached points load directly; the rest go through a one-shot sweep.
  std::vector<int> missing;
  int hits = 0;
  for (int i = 0; i < m; ++i) {
    auto rec = cache.load("sw_" + hash_hex(sweep_point_key(mh, cfg, grid[i])));
    if (rec && rec->density.size() == mesh.n_panels()) {
      sweep.densities.col(i) = rec->density;
      sweep.resolvent_norms[i] = rec->resolvent_norm;
      sweep.rhs_norms[i] = rec->rhs_norm;
      sweep.solve_residuals[i] = rec->solve_residual;
      ++hits;
    } else {
      missing.push_back(i);
    }
  }
  if (!missing.empty()) {
    std::vector<double> todo;
    for (int i : missing) todo.push_back(grid[i]);
    SweepOptions opt;
    opt.assembly = cfg.assembly;
    opt.jobs = cfg.jobs;
    opt.resolvent_norms = cfg.sweep.resolvent_norms;
    opt.c = cfg.pulse.c;
    SweepResult fresh = frequency_sweep(mesh, cfg.pulse, todo, cfg.sweep.omega0, opt);
    for (size_t k = 0; k < missing.size(); ++k) {
      int i = missing[k];
      sweep.densities.col(i) = fresh.densities.col(k);
      sweep.resolvent_norms[i] = fresh.resolvent_norms[k];
      sweep.rhs_norms[i] = fresh.rhs_norms[k];
      sweep.solve_residuals[i] = fresh.solve_residuals[k];
      if (cache.enabled()) {
        SweepRecord rec{fresh.densities.col(k), grid[i], fresh.resolvent_norms[k],
                        fresh.rhs_norms[k], fresh.solve_residuals[k]};
        cache.store("sw_" + hash_hex(sweep_point_key(mh, cfg, grid[i])), rec);
      }
    }
  }
  sweep.validate();
  if (hits_out) *hits_out = hits;
  return sweep;
}

int cmd_sweep(const CommonArgs& args) {
  ExperimentConfig cfg = resolve_config(args);
  SurfaceMesh mesh = prepare_mesh(cfg);
  int hits = 0;
  SweepResult sweep = run_sweep_cached(cfg, mesh, &hits);

  std::string csv = "omega,resolvent_norm,rhs_norm,solve_residual\n";
  for (int i = 0; i < sweep.n_freq(); ++i)
    csv += csv_line({sweep.omegas[i], sweep.resolvent_norms[i], sweep.rhs_norms[i],
                     sweep.solve_residuals[i]});
  write_text_file(cfg.output_dir + "/resolvent.csv", csv);
  save_sweep_result(sweep, cfg.output_dir + "/sweep.bin");

  json meta;
  meta["n_omega"] = sweep.n_freq();
  meta["omega0"] = sweep.omega0;
  meta["c"] = sweep.c;
  meta["panels"] = mesh.n_panels();
  meta["mesh_hash"] = hash_hex(mesh_content_hash(mesh));
  meta["cache_hits"] = hits;
  meta["signal_duration"] = sweep.signal_duration;
  write_json_file(cfg.output_dir + "/sweep_meta.json", meta);
  std::cout << "sweep: " << sweep.n_freq() << " frequencies, cache hits " << hits << "/"
            << sweep.n_freq() << "\n";
  return 0;
}

int cmd_qfit(const CommonArgs& args, const std::string& norms_csv) {
  ExperimentConfig cfg = resolve_config(args);

  std::vector<double> omegas, norms;
  if (!norms_csv.empty()) {
    // Synthetic passthrough: a CSV of omega,resolvent_norm rows.
    std::ifstream in(norms_csv);
    if (!in) throw ConfigError("cannot open " + norms_csv);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      std::istringstream ss(line);
      double w, n;
      char comma;
      if (ss >> w >> comma >> n) {
        omegas.push_back(w);
        norms.push_back(n);
      }
    }
  } else {
    SweepResult sweep = load_sweep_result(cfg.output_dir + "/sweep.bin");
    omegas = sweep.omegas;
    norms = sweep.resolvent_norms;
  }

  QGrowthFit fit = q_fit(omegas, norms, cfg.sweep.omega0);
  json rep;
  rep["q_hat"] = fit.q_hat;
  rep["c2_hat"] = fit.c2_hat;
  if (fit.c1_hat)
    rep["c1_hat"] = *fit.c1_hat;
  else
    rep["c1_hat"] = nullptr;
  rep["residual"] = fit.residual;
  rep["omega0"] = fit.omega0;

  if (norms_csv.empty() && cfg.mesh.shape == "sphere" && cfg.mesh.radius == 1.0) {
    json oracle_rows = json::array();
    for (int pick : {static_cast<int>(omegas.size()) / 2,
                     static_cast<int>(omegas.size()) - 1}) {
      double w = omegas[pick];
      if (w <= cfg.sweep.omega0) continue;
      json row;
      row["omega"] = w;
      row["discrete"] = norms[pick];
      row["oracle"] = sphere_resolvent_norm(w / cfg.pulse.c, w, 60 + int(w));
      oracle_rows.push_back(row);
    }
    rep["oracle_comparison"] = oracle_rows;
  }
  write_json_file(cfg.output_dir + "/qfit.json", rep);
  std::cout << "q_hat = " << format_g17(fit.q_hat) << " (residual "
            << format_g17(fit.residual) << ")\n";
  return 0;
}

int cmd_synthesize(const CommonArgs& args) {
  ExperimentConfig cfg = resolve_config(args);
  SweepResult sweep = load_sweep_result(cfg.output_dir + "/sweep.bin");
  DensityHistory history = synthesize_time_density(sweep, cfg.time);
  save_history(history, cfg.output_dir + "/history.bin");

  std::string csv = "t,psi_l2\n";
  for (int k = 0; k < history.n_samples(); ++k)
    csv += csv_line({history.grid.time(k), history.l2_norm_at(k)});
  write_text_file(cfg.output_dir + "/density_l2.csv", csv);
  std::cout << "synthesized " << history.n_panels() << " x " << history.n_samples()
            << " density history\n";
  return 0;
}

int cmd_dod_verify(const CommonArgs& args) {
  ExperimentConfig cfg = resolve_config(args);
  SurfaceMesh mesh = prepare_mesh(cfg);
  DensityHistory history = load_history(cfg.output_dir + "/history.bin");

  std::vector<Vec3> probes = cfg.dod.probes;
  if (probes.empty()) probes.push_back(Vec3::Zero());

  HVerdict v = verify_h_identity(mesh, cfg.pulse, history, cfg.dod.T0, cfg.dod.tau,
                                 probes, cfg.dod.tol_dod);
  double T_star = t_star(mesh, cfg.pulse.c);

  json rep;
  rep["maxima"]["identity"] = v.max_identity;
  rep["maxima"]["pre_interval"] = v.max_pre_interval;
  rep["maxima"]["post_support"] = v.max_post_support;
  rep["scale"] = v.scale;
  rep["tol"] = v.tol;
  rep["eps_tail"] = v.eps_tail;
  rep["pass"] = v.pass;

  // Constant-stability ratios at two observation times.
  std::string csv = "T0,hp_ratio,sup_ratio,defined\n";
  json ratios = json::array();
  for (double T0 : {cfg.dod.T0, cfg.dod.T0 + 2.0}) {
    if (T0 > history.grid.t_end) continue;
    DodRatioReport r =
        dod_bound_report(history, T0, cfg.dod.tau, T_star, cfg.dod.p, cfg.dod.q);
    json jr;
    jr["T0"] = T0;
    jr["defined"] = r.defined;
    jr["hp_ratio"] = r.hp_ratio;
    jr["sup_ratio"] = r.sup_ratio;
    ratios.push_back(jr);
    csv += csv_line({T0, r.hp_ratio, r.sup_ratio, r.defined ? 1.0 : 0.0});
  }
  rep["ratios"] = ratios;
  write_json_file(cfg.output_dir + "/dod_verdict.json", rep);
  write_text_file(cfg.output_dir + "/dod_ratios.csv", csv);
  std::cout << "dod verdict: " << (v.pass ? "pass" : "FAIL") << " (identity "
            << format_g17(v.max_identity / v.scale) << ", pre "
            << format_g17(v.max_pre_interval / v.scale) << ", post "
            << format_g17(v.max_post_support / v.scale) << " rel; tol "
            << format_g17(v.tol) << ")\n";
  return v.pass ? 0 : 2;
}

int cmd_decay(const CommonArgs& args) {
  ExperimentConfig cfg = resolve_config(args);
  SurfaceMesh mesh = prepare_mesh(cfg);
  DensityHistory history = load_history(cfg.output_dir + "/history.bin");

  double r_max = 0.0;
  for (const auto& vtx : mesh.vertices)
    r_max = std::max(r_max, (cfg.observables.probe - vtx).norm());
  double offset = cfg.observables.fit_offset >= 0.0 ? cfg.observables.fit_offset
                                                    : r_max / cfg.pulse.c;

  std::vector<double> times, norms;
  for (int k = 0; k < history.n_samples(); ++k) {
    times.push_back(history.grid.time(k));
    norms.push_back(history.l2_norm_at(k));
  }
  std::string csv = "t,psi_l2\n";
  for (size_t i = 0; i < times.size(); ++i) csv += csv_line({times[i], norms[i]});
  write_text_file(cfg.output_dir + "/decay_psi.csv", csv);

  // Nested fit windows with increasing right endpoints.
  json windows = json::array();
  double t_lo = cfg.dod.T0 + offset;
  double span = history.grid.t_end - t_lo;
  if (span <= 0.0) throw ObservableError("decay: T0 + offset beyond the time grid");
  bool nondecreasing = true;
  double prev_n = -1e300;
  for (int w = 0; w < cfg.observables.n_windows; ++w) {
    double hi = t_lo + span * (w + 1) / cfg.observables.n_windows;
    std::vector<double> wt, wn;
    for (size_t i = 0; i < times.size(); ++i) {
      if (times[i] > cfg.dod.T0 && times[i] <= hi) {
        wt.push_back(times[i]);
        wn.push_back(norms[i]);
      }
    }
    try {
      DecayReport rep = decay_fit(wt, wn, cfg.dod.T0, offset, false,
                                  cfg.observables.noise_floor);
      json jw;
      jw["window_hi"] = hi;
      jw["fitted_n"] = rep.fitted_n;
      jw["slope"] = rep.slope;
      jw["residual"] = rep.residual;
      jw["n_used"] = rep.n_used;
      windows.push_back(jw);
      if (rep.fitted_n < prev_n - 1e-12) nondecreasing = false;
      prev_n = rep.fitted_n;
    } catch (const ObservableError&) {
      // window too short; skip
    }
  }
  if (windows.empty()) throw ObservableError("decay: no usable fit window");

  json rep;
  rep["windows"] = windows;
  rep["offset"] = offset;
  rep["fitted_n_final"] = windows.back()["fitted_n"];
  rep["fitted_n_nondecreasing"] = nondecreasing;

  // Local energy trace (energy exponent convention 1 - 2n) and a pointwise
  // field probe, both on a coarse time set.
  auto inside = [&](const Vec3& r) {
    return cfg.mesh.shape == "cavity-cube" ? inside_cavity_cube(r)
                                           : inside_sphere(r, cfg.mesh.radius);
  };
  double max_vr = 0.0;
  for (const auto& vtx : mesh.vertices) max_vr = std::max(max_vr, vtx.norm());
  VolumeRegion region =
      make_volume_region(cfg.observables.R, cfg.observables.h_vol, inside, max_vr);
  std::string ecsv = "t,energy,u_probe\n";
  std::vector<double> etimes, evals;
  int n_energy = 6;
  for (int i = 0; i < n_energy; ++i) {
    double t = t_lo + span * (0.1 + 0.85 * i / (n_energy - 1));
    double e = local_energy(mesh, history, region, t);
    double u = field_u(mesh, history, cfg.observables.probe, t);
    ecsv += csv_line({t, e, u});
    etimes.push_back(t);
    evals.push_back(e);
  }
  write_text_file(cfg.output_dir + "/decay_energy.csv", ecsv);
  try {
    DecayReport erep = decay_fit(etimes, evals, cfg.dod.T0, offset, true,
                                 cfg.observables.noise_floor);
    rep["energy_fitted_n"] = erep.fitted_n;
  } catch (const ObservableError&) {
    rep["energy_fitted_n"] = nullptr;  // too few samples above the floor
  }

  write_json_file(cfg.output_dir + "/decay.json", rep);
  std::cout << "decay: final fitted_n = " << format_g17(windows.back()["fitted_n"])
            << (nondecreasing ? " (nondecreasing across windows)" : " (NOT monotone)")
            << "\n";
  return 0;
}

int cmd_oracle(double kappa, double eta, int n_max, const std::string& out) {
  ModalSpectrum ms = modal_spectrum(kappa, eta, n_max);
  std::string csv = "n,re_s,im_s,re_k,im_k,abs_a\n";
  for (int n = 0; n <= ms.n_max; ++n) {
    csv += std::to_string(n) + "," + format_g17(ms.s_eigs[n].real()) + "," +
           format_g17(ms.s_eigs[n].imag()) + "," + format_g17(ms.k_eigs[n].real()) +
           "," + format_g17(ms.k_eigs[n].imag()) + "," +
           format_g17(std::abs(ms.a_eigs[n])) + "\n";
  }
  if (out.empty())
    std::cout << csv;
  else
    write_text_file(out, csv);
  std::cerr << "resolvent norm: " << format_g17(sphere_resolvent_norm(kappa, eta, n_max))
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"boundary-integral domain-of-dependence workbench"};
  app.require_subcommand(1);

  // mesh
  auto* mesh_cmd = app.add_subcommand("mesh", "build and save an obstacle mesh");
  std::string shape = "sphere", mesh_out = "mesh.txt";
  int refine = 2;
  double radius = 1.0;
  mesh_cmd->add_option("--shape", shape, "sphere | cavity-cube");
  mesh_cmd->add_option("--refine", refine, "refinement level");
  mesh_cmd->add_option("--radius", radius, "sphere radius");
  mesh_cmd->add_option("--out", mesh_out, "output path")->required();

  CommonArgs sweep_args, qfit_args, synth_args, dod_args, decay_args;
  auto* sweep_cmd = app.add_subcommand("sweep", "frequency sweep of CFIE solves");
  add_common(sweep_cmd, sweep_args);
  auto* qfit_cmd = app.add_subcommand("qfit", "fit the q-growth exponent");
  add_common(qfit_cmd, qfit_args);
  std::string norms_csv;
  qfit_cmd->add_option("--norms", norms_csv, "fit a synthetic omega,norm CSV instead");
  auto* synth_cmd = app.add_subcommand("synthesize", "frequency-time synthesis");
  add_common(synth_cmd, synth_args);
  auto* dod_cmd = app.add_subcommand("dod-verify", "verify the DoD identity");
  add_common(dod_cmd, dod_args);
  auto* decay_cmd = app.add_subcommand("decay", "fit decay exponents");
  add_common(decay_cmd, decay_args);

  auto* oracle_cmd = app.add_subcommand("oracle", "unit-sphere modal spectrum CSV");
  double kappa = 5.0, eta = 5.0;
  int n_max = 60;
  std::string oracle_out;
  oracle_cmd->add_option("--kappa", kappa, "wavenumber");
  oracle_cmd->add_option("--eta", eta, "coupling parameter");
  oracle_cmd->add_option("--nmax", n_max, "modal cutoff");
  oracle_cmd->add_option("--out", oracle_out, "CSV path (stdout if omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (mesh_cmd->parsed()) return cmd_mesh(shape, refine, radius, mesh_out);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep_args);
    if (qfit_cmd->parsed()) return cmd_qfit(qfit_args, norms_csv);
    if (synth_cmd->parsed()) return cmd_synthesize(synth_args);
    if (dod_cmd->parsed()) return cmd_dod_verify(dod_args);
    if (decay_cmd->parsed()) return cmd_decay(decay_args);
    if (oracle_cmd->parsed()) return cmd_oracle(kappa, eta, n_max, oracle_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
