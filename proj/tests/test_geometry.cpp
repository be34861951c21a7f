// Copyright (c) the bdod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "bdod/geometry.hpp"

using namespace bdod;

TEST_CASE("icosahedron combinatorics") {
  SurfaceMesh m = build_sphere(1.0, 0);
  CHECK(m.n_panels() == 20);
  CHECK(m.n_vertices() == 12);
  for (const auto& v : m.vertices) CHECK(std::abs(v.norm() - 1.0) < 1e-14);
}

TEST_CASE("icosphere refinement converges to the sphere area") {
  SurfaceMesh m = build_sphere(1.0, 3);
  CHECK(m.n_panels() == 20 * 64);
  double area = 0.0;
  for (double a : m.areas) area += a;
  CHECK(std::abs(area - 4.0 * M_PI) / (4.0 * M_PI) < 0.005);
}

TEST_CASE("radius-2 icosahedron has antipodal diameter 4") {
  SurfaceMesh m = build_sphere(2.0, 0);
  CHECK(m.diameter == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("cavity cube volume and diameter at all refinement levels") {
  for (int level : {0, 1, 2}) {
    SurfaceMesh m = build_cavity_cube(level);
    CHECK(std::abs(m.signed_volume() - 7.0) < 1e-8);
    CHECK(std::abs(m.diameter - 2.0 * std::sqrt(3.0)) < 1e-12);
  }
  CHECK(std::abs(build_cavity_cube(0).signed_volume() - 7.0) < 1e-10);
}

TEST_CASE("unit normals and positive areas") {
  for (const SurfaceMesh& m : {build_sphere(1.0, 1), build_cavity_cube(1)}) {
    for (int k = 0; k < m.n_panels(); ++k) {
      CHECK(m.areas[k] > 0.0);
      CHECK(std::abs(m.normals[k].norm() - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("normals point outward (point-in-solid test)") {
  SurfaceMesh sph = build_sphere(1.0, 2);
  double eps = 0.1 * sph.max_panel_diameter();
  for (int k = 0; k < sph.n_panels(); ++k) {
    CHECK(!inside_sphere(sph.centroids[k] + eps * sph.normals[k], 1.0));
    CHECK(inside_sphere(sph.centroids[k] - eps * sph.normals[k], 1.0));
  }
  SurfaceMesh cav = build_cavity_cube(1);
  eps = 0.1 * cav.max_panel_diameter();
  for (int k = 0; k < cav.n_panels(); ++k) {
    CHECK(!inside_cavity_cube(cav.centroids[k] + eps * cav.normals[k]));
    CHECK(inside_cavity_cube(cav.centroids[k] - eps * cav.normals[k]));
  }
}

TEST_CASE("mesh i/o round-trips bit-identically") {
  SurfaceMesh m = build_sphere(1.0, 0);
  auto path = std::filesystem::temp_directory_path() / "bdod_roundtrip.mesh";
  save_mesh(m, path.string());
  SurfaceMesh r = load_mesh(path.string());
  REQUIRE(r.n_vertices() == m.n_vertices());
  REQUIRE(r.n_panels() == m.n_panels());
  for (int i = 0; i < m.n_vertices(); ++i)
    for (int d = 0; d < 3; ++d) CHECK(r.vertices[i][d] == m.vertices[i][d]);
  for (int k = 0; k < m.n_panels(); ++k) CHECK(r.panels[k] == m.panels[k]);
  CHECK(r.diameter == m.diameter);

  // Saving the loaded mesh reproduces the file byte for byte.
  auto path2 = std::filesystem::temp_directory_path() / "bdod_roundtrip2.mesh";
  save_mesh(r, path2.string());
  std::ifstream a(path), b(path2);
  std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  CHECK(sa == sb);
}

TEST_CASE("flipped panel is rejected") {
  SurfaceMesh m = build_sphere(1.0, 0);
  std::swap(m.panels[3][0], m.panels[3][1]);
  auto path = std::filesystem::temp_directory_path() / "bdod_flipped.mesh";
  {
    std::ofstream out(path);
    out << "mesh v1\n";
    for (const auto& v : m.vertices) {
      char buf[96];
      std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", v.x(), v.y(), v.z());
      out << buf;
    }
    for (const auto& p : m.panels) out << "f " << p[0] << ' ' << p[1] << ' ' << p[2] << '\n';
  }
  CHECK_THROWS_AS(load_mesh(path.string()), MeshError);
}

TEST_CASE("degenerate panel is rejected") {
  auto path = std::filesystem::temp_directory_path() / "bdod_degenerate.mesh";
  {
    std::ofstream out(path);
    out << "mesh v1\nv 0 0 0\nv 1 0 0\nv 0 1 0\nf 0 1 1\n";
  }
  CHECK_THROWS_AS(load_mesh(path.string()), MeshError);
}

TEST_CASE("malformed header is rejected") {
  auto path = std::filesystem::temp_directory_path() / "bdod_badheader.mesh";
  std::ofstream(path) << "mesh v2\n";
  CHECK_THROWS_AS(load_mesh(path.string()), MeshError);
}

TEST_CASE("t_star") {
  SurfaceMesh cav = build_cavity_cube(0);
  CHECK(t_star(cav, 1.0) == doctest::Approx(2.0 * std::sqrt(3.0)).epsilon(1e-12));
  SurfaceMesh sph = build_sphere(1.0, 0);
  CHECK(t_star(sph, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t_star(sph, 0.5) == 2.0 * t_star(sph, 1.0));
  CHECK_THROWS_AS(t_star(sph, 0.0), MeshError);
}
