// Copyright (c) the bdod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef BDOD_GEOMETRY_HPP
#define BDOD_GEOMETRY_HPP

#include <Eigen/Dense>
#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace bdod {

using Vec3 = Eigen::Vector3d;

struct MeshError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat triangular panel given by its three vertices (counter-clockwise
// seen from outside the obstacle).
struct Triangle {
  Vec3 a, b, c;

  Vec3 centroid() const { return (a + b + c) / 3.0; }
  Vec3 scaled_normal() const { return 0.5 * (b - a).cross(c - a); }  // area * unit normal
  double area() const { return scaled_normal().norm(); }
  Vec3 unit_normal() const { return scaled_normal().normalized(); }
  double diameter() const;
};

// Closed, outward-oriented triangulated surface. Panel-derived quantities
// (centroids, normals, areas) and the vertex-pair diameter are filled in by
// finalize(), which also validates closedness and orientation.
struct SurfaceMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> panels;

  std::vector<Vec3> centroids;
  std::vector<Vec3> normals;
  std::vector<double> areas;
  // Per-panel mean curvature of the underlying surface (0 for genuinely
  // flat facets). Analytic builders fill it in; it feeds the curvature
  // self-term of the adjoint double layer.
  std::vector<double> curvature;
  double diameter = 0.0;

  int n_panels() const { return static_cast<int>(panels.size()); }
  int n_vertices() const { return static_cast<int>(vertices.size()); }
  Triangle panel_triangle(int k) const {
    const auto& p = panels[k];
    return Triangle{vertices[p[0]], vertices[p[1]], vertices[p[2]]};
  }
  double signed_volume() const;
  double max_panel_diameter() const;
  Eigen::VectorXd area_weights() const;

  // Computes derived fields and checks the mesh invariants (closed,
  // consistently oriented, positive areas, positive enclosed volume).
  void finalize();
};

SurfaceMesh build_sphere(double radius, int refinement_level);
SurfaceMesh build_cavity_cube(int refinement_level);

SurfaceMesh load_mesh(const std::string& path);
void save_mesh(const SurfaceMesh& mesh, const std::string& path);

// Domain-of-dependence traversal time: diam(Gamma) / c.
double t_star(const SurfaceMesh& mesh, double c);

// Point-in-solid tests for the two analytic obstacles (used by normal
// orientation checks and exterior-region construction).
bool inside_sphere(const Vec3& r, double radius);
bool inside_cavity_cube(const Vec3& r);

}  // namespace bdod

#endif
