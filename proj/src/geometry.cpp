// Copyright (c) the bdod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "bdod/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace bdod {

double Triangle::diameter() const {
  return std::max({(a - b).norm(), (b - c).norm(), (c - a).norm()});
}

double SurfaceMesh::signed_volume() const {
  // (1/3) sum of centroid . (area * normal), exact for polyhedra.
  double v = 0.0;
  for (int k = 0; k < n_panels(); ++k) {
    Triangle t = panel_triangle(k);
    v += t.centroid().dot(t.scaled_normal());
  }
  return v / 3.0;
}

double SurfaceMesh::max_panel_diameter() const {
  double d = 0.0;
  for (int k = 0; k < n_panels(); ++k) d = std::max(d, panel_triangle(k).diameter());
  return d;
}

Eigen::VectorXd SurfaceMesh::area_weights() const {
  Eigen::VectorXd w(n_panels());
  for (int k = 0; k < n_panels(); ++k) w[k] = areas[k];
  return w;
}

void SurfaceMesh::finalize() {
  const int np = n_panels();
  if (np == 0) throw MeshError("mesh has no panels");

  centroids.resize(np);
  normals.resize(np);
  areas.resize(np);
  for (int k = 0; k < np; ++k) {
    const auto& p = panels[k];
    if (p[0] == p[1] || p[1] == p[2] || p[0] == p[2])
      throw MeshError("panel " + std::to_string(k) + " has duplicate vertex indices");
    for (int i = 0; i < 3; ++i)
      if (p[i] < 0 || p[i] >= n_vertices())
        throw MeshError("panel " + std::to_string(k) + " has out-of-range vertex index");
    Triangle t = panel_triangle(k);
    double area = t.area();
    if (!(area > 0.0)) throw MeshError("panel " + std::to_string(k) + " has zero area");
    centroids[k] = t.centroid();
    normals[k] = t.scaled_normal() / area;
    areas[k] = area;
  }

  // Closed + consistently oriented: every directed edge must be matched by
  // exactly one reversed copy.
  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& p : panels) {
    for (int i = 0; i < 3; ++i) {
      int u = p[i], v = p[(i + 1) % 3];
      edge_count[{u, v}] += 1;
    }
  }
  for (const auto& [e, cnt] : edge_count) {
    if (cnt != 1)
      throw MeshError("surface not consistently oriented: directed edge repeated");
    auto rev = edge_count.find({e.second, e.first});
    if (rev == edge_count.end())
      throw MeshError("surface not closed: unmatched edge");
  }

  if (!(signed_volume() > 0.0))
    throw MeshError("surface oriented inward (signed volume <= 0)");

  if (curvature.size() != static_cast<size_t>(np)) curvature.assign(np, 0.0);

  diameter = 0.0;
  for (int i = 0; i < n_vertices(); ++i)
    for (int j = i + 1; j < n_vertices(); ++j)
      diameter = std::max(diameter, (vertices[i] - vertices[j]).norm());
}

double t_star(const SurfaceMesh& mesh, double c) {
  if (!(c > 0.0)) throw MeshError("wavespeed must be positive");
  return mesh.diameter / c;
}

bool inside_sphere(const Vec3& r, double radius) { return r.norm() < radius; }

bool inside_cavity_cube(const Vec3& r) {
  bool in_cube = std::abs(r.x()) < 1.0 && std::abs(r.y()) < 1.0 && std::abs(r.z()) < 1.0;
  bool in_notch = std::abs(r.x()) < 0.5 && std::abs(r.y()) < 0.5 && r.z() > 0.0;
  return in_cube && !in_notch;
}

// ---------------------------------------------------------------------------
// Icosphere
// ---------------------------------------------------------------------------

namespace {

void icosahedron(std::vector<Vec3>& verts, std::vector<std::array<int, 3>>& faces) {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  const double s = 1.0 / std::sqrt(1.0 + phi * phi);
  auto v = [&](double x, double y, double z) { verts.push_back(s * Vec3(x, y, z)); };
  v(-1, phi, 0); v(1, phi, 0); v(-1, -phi, 0); v(1, -phi, 0);
  v(0, -1, phi); v(0, 1, phi); v(0, -1, -phi); v(0, 1, -phi);
  v(phi, 0, -1); v(phi, 0, 1); v(-phi, 0, -1); v(-phi, 0, 1);
  faces = {{{0, 11, 5}}, {{0, 5, 1}},  {{0, 1, 7}},   {{0, 7, 10}}, {{0, 10, 11}},
           {{1, 5, 9}},  {{5, 11, 4}}, {{11, 10, 2}}, {{10, 7, 6}}, {{7, 1, 8}},
           {{3, 9, 4}},  {{3, 4, 2}},  {{3, 2, 6}},   {{3, 6, 8}},  {{3, 8, 9}},
           {{4, 9, 5}},  {{2, 4, 11}}, {{6, 2, 10}},  {{8, 6, 7}},  {{9, 8, 1}}};
}

}  // namespace

SurfaceMesh build_sphere(double radius, int refinement_level) {
  if (!(radius > 0.0)) throw MeshError("sphere radius must be positive");
  if (refinement_level < 0) throw MeshError("refinement level must be nonnegative");

  std::vector<Vec3> verts;
  std::vector<std::array<int, 3>> faces;
  icosahedron(verts, faces);

  for (int level = 0; level < refinement_level; ++level) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int i, int j) {
      auto key = std::minmax(i, j);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      Vec3 m = (verts[i] + verts[j]).normalized();
      verts.push_back(m);
      int idx = static_cast<int>(verts.size()) - 1;
      midpoint[key] = idx;
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }

  SurfaceMesh mesh;
  mesh.vertices.reserve(verts.size());
  for (const auto& v : verts) mesh.vertices.push_back(radius * v);
  mesh.panels = std::move(faces);
  mesh.curvature.assign(mesh.panels.size(), 1.0 / radius);
  mesh.finalize();
  return mesh;
}

// ---------------------------------------------------------------------------
// Cavity cube: boundary of [-1,1]^3 \ [-1/2,1/2] x [-1/2,1/2] x [0,1]
// ---------------------------------------------------------------------------

namespace {

// Key for vertex dedup on a grid of spacing multiples of 2^-30.
struct GridFace {
  Vec3 origin, du, dv;  // face spans origin + s*du + t*dv, s,t in [0,1]
  int nu, nv;           // cell counts
  bool flip;            // flip triangle orientation so normals point outward
};

void emit_face(const GridFace& f, std::vector<Vec3>& verts,
               std::vector<std::array<int, 3>>& panels,
               std::map<std::array<long long, 3>, int>& lookup) {
  auto vertex_index = [&](int i, int j) {
    Vec3 p = f.origin + (double(i) / f.nu) * f.du + (double(j) / f.nv) * f.dv;
    std::array<long long, 3> key;
    for (int d = 0; d < 3; ++d) key[d] = llround(p[d] * (1LL << 30));
    auto it = lookup.find(key);
    if (it != lookup.end()) return it->second;
    verts.push_back(p);
    int idx = static_cast<int>(verts.size()) - 1;
    lookup[key] = idx;
    return idx;
  };
  for (int i = 0; i < f.nu; ++i) {
    for (int j = 0; j < f.nv; ++j) {
      int v00 = vertex_index(i, j), v10 = vertex_index(i + 1, j);
      int v01 = vertex_index(i, j + 1), v11 = vertex_index(i + 1, j + 1);
      if (!f.flip) {
        panels.push_back({v00, v10, v11});
        panels.push_back({v00, v11, v01});
      } else {
        panels.push_back({v00, v11, v10});
        panels.push_back({v00, v01, v11});
      }
    }
  }
}

}  // namespace

SurfaceMesh build_cavity_cube(int refinement_level) {
  if (refinement_level < 0) throw MeshError("refinement level must be nonnegative");
  const int n = 1 << refinement_level;  // cells per half-unit at level 0

  std::vector<Vec3> verts;
  std::vector<std::array<int, 3>> panels;
  std::map<std::array<long long, 3>, int> lookup;
  auto face = [&](Vec3 origin, Vec3 du, Vec3 dv, int nu, int nv, bool flip) {
    emit_face(GridFace{origin, du, dv, nu, nv, flip}, verts, panels, lookup);
  };

  // Outer faces; du x dv points outward, flip=false keeps that orientation.
  face({-1, -1, -1}, {0, 2, 0}, {0, 0, 2}, 4 * n, 4 * n, true);    // x = -1, outward -x
  face({+1, -1, -1}, {0, 2, 0}, {0, 0, 2}, 4 * n, 4 * n, false);   // x = +1, outward +x
  face({-1, -1, -1}, {2, 0, 0}, {0, 0, 2}, 4 * n, 4 * n, false);   // y = -1, outward -y
  face({-1, +1, -1}, {2, 0, 0}, {0, 0, 2}, 4 * n, 4 * n, true);    // y = +1, outward +y
  face({-1, -1, -1}, {2, 0, 0}, {0, 2, 0}, 4 * n, 4 * n, true);    // z = -1, outward -z

  // Top face z = +1 with the notch opening removed: four rectangular strips.
  auto top = [&](double x0, double x1, double y0, double y1) {
    int nu = static_cast<int>(llround((x1 - x0) * 2 * n));
    int nv = static_cast<int>(llround((y1 - y0) * 2 * n));
    face({x0, y0, 1}, {x1 - x0, 0, 0}, {0, y1 - y0, 0}, nu, nv, false);
  };
  top(-1.0, -0.5, -1.0, 1.0);
  top(+0.5, +1.0, -1.0, 1.0);
  top(-0.5, +0.5, -1.0, -0.5);
  top(-0.5, +0.5, +0.5, +1.0);

  // Notch walls; outward normal of the solid points into the notch.
  face({-0.5, -0.5, 0}, {0, 1, 0}, {0, 0, 1}, 2 * n, 2 * n, false);  // x=-1/2, outward +x
  face({+0.5, -0.5, 0}, {0, 1, 0}, {0, 0, 1}, 2 * n, 2 * n, true);   // x=+1/2, outward -x
  face({-0.5, -0.5, 0}, {1, 0, 0}, {0, 0, 1}, 2 * n, 2 * n, true);   // y=-1/2, outward +y
  face({-0.5, +0.5, 0}, {1, 0, 0}, {0, 0, 1}, 2 * n, 2 * n, false);  // y=+1/2, outward -y

  // Notch floor z = 0, solid below, outward +z.
  face({-0.5, -0.5, 0}, {1, 0, 0}, {0, 1, 0}, 2 * n, 2 * n, false);

  SurfaceMesh mesh;
  mesh.vertices = std::move(verts);
  mesh.panels = std::move(panels);
  mesh.finalize();
  return mesh;
}

// ---------------------------------------------------------------------------
// Native mesh format: "mesh v1", then "v x y z" lines, then "f i j k" lines.
// ---------------------------------------------------------------------------

void save_mesh(const SurfaceMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw MeshError("cannot open " + path + " for writing");
  out << "mesh v1\n";
  char buf[96];
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", v.x(), v.y(), v.z());
    out << buf;
  }
  for (const auto& p : mesh.panels) out << "f " << p[0] << ' ' << p[1] << ' ' << p[2] << '\n';
  if (!out) throw MeshError("write failure on " + path);
}

SurfaceMesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open " + path);
  std::string header;
  if (!std::getline(in, header) || header != "mesh v1")
    throw MeshError(path + ": missing 'mesh v1' header");

  SurfaceMesh mesh;
  std::string line;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "v") {
      Vec3 v;
      if (!(ss >> v.x() >> v.y() >> v.z()))
        throw MeshError(path + ":" + std::to_string(lineno) + ": malformed vertex line");
      mesh.vertices.push_back(v);
    } else if (tag == "f") {
      std::array<int, 3> p{};
      if (!(ss >> p[0] >> p[1] >> p[2]))
        throw MeshError(path + ":" + std::to_string(lineno) + ": malformed face line");
      mesh.panels.push_back(p);
    } else {
      throw MeshError(path + ":" + std::to_string(lineno) + ": unknown record '" + tag + "'");
    }
  }
  mesh.finalize();
  return mesh;
}

}  // namespace bdod
