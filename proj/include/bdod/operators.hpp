// Copyright (c) the bdod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef BDOD_OPERATORS_HPP
#define BDOD_OPERATORS_HPP

#include <Eigen/Dense>
#include <complex>

#include "bdod/geometry.hpp"

namespace bdod {

using Complex = std::complex<double>;

struct OperatorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Frequency-domain kernel parameters. eta follows the coupling switch:
// eta = 1 for 0 <= omega < omega0, eta = omega for omega >= omega0.
struct KernelParams {
  double omega = 0.0;
  double c = 1.0;
  double kappa = 0.0;   // omega / c
  double omega0 = 1.0;  // coupling switch frequency
  double eta = 1.0;

  static KernelParams make(double omega, double c = 1.0, double omega0 = 1.0);
  // Fixed coupling parameter (bypasses the switch); used by oracle cross-checks.
  static KernelParams with_eta(double omega, double c, double eta, double omega0 = 1.0);
};

// Helmholtz free-space kernel e^{i kappa R} / (4 pi R).
Complex green(const Vec3& r, const Vec3& rp, const KernelParams& p);

// m-th omega-derivative of the kernel: (i R / c)^m G_omega.
Complex green_domega(const Vec3& r, const Vec3& rp, const KernelParams& p, int m);

// m-th omega-derivative of dG/dn(r) (adjoint double-layer kernel):
// ((r-r').n / (4 pi R^3)) e^{i kappa R} (iR/c)^m (i omega R / c + m - 1),
// valid for all m >= 0.
Complex dgreen_dn_domega(const Vec3& r, const Vec3& rp, const Vec3& normal_at_r,
                         const KernelParams& p, int m);

// Dense collocation matrix over panel centroids together with the panel-area
// weights that define the discrete L2(Gamma) inner product.
struct DenseOperator {
  Eigen::MatrixXcd entries;
  Eigen::VectorXd weight;

  int size() const { return static_cast<int>(entries.rows()); }
  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const { return entries * x; }
};

// Discrete L2(Gamma) norm / inner product with area weights.
double weighted_norm(const Eigen::VectorXcd& f, const Eigen::VectorXd& w);
Complex weighted_inner(const Eigen::VectorXcd& f, const Eigen::VectorXcd& g,
                       const Eigen::VectorXd& w);

struct AssemblyOptions {
  int far_degree = 3;        // regular rule for well-separated pairs
  double near_factor = 2.5;  // centroid distance below near_factor*diam uses adaptive quadrature
  double near_rtol = 1e-8;
  int duffy_points = 16;
};

DenseOperator assemble_S(const SurfaceMesh& mesh, const KernelParams& p,
                         const AssemblyOptions& opt = {});
DenseOperator assemble_Kstar(const SurfaceMesh& mesh, const KernelParams& p,
                             const AssemblyOptions& opt = {});
// Combined-field operator (1/2) I + K* - i eta S.
DenseOperator assemble_A(const SurfaceMesh& mesh, const KernelParams& p,
                         const AssemblyOptions& opt = {});
// m-th omega-derivative of A (m >= 1); undefined at the coupling switch
// omega = omega0 and rejected within a small guard of it.
DenseOperator assemble_A_derivative(const SurfaceMesh& mesh, const KernelParams& p, int m,
                                    const AssemblyOptions& opt = {});

}  // namespace bdod

#endif
