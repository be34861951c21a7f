// Copyright (c) the bdod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "bdod/operators.hpp"

#include <cmath>

#include "bdod/quadrature.hpp"

namespace bdod {

KernelParams KernelParams::make(double omega, double c, double omega0) {
  if (!(c > 0.0)) throw OperatorError("wavespeed must be positive");
  if (!(omega0 > 0.0)) throw OperatorError("omega0 must be positive");
  KernelParams p;
  p.omega = omega;
  p.c = c;
  p.kappa = omega / c;
  p.omega0 = omega0;
  p.eta = (std::abs(omega) < omega0) ? 1.0 : std::abs(omega);
  return p;
}

KernelParams KernelParams::with_eta(double omega, double c, double eta, double omega0) {
  KernelParams p = make(omega, c, omega0);
  p.eta = eta;
  return p;
}

namespace {

constexpr double kFourPi = 4.0 * M_PI;

inline Complex ipow_iRc(double R_over_c, int m) {
  // (i R / c)^m
  Complex z(0.0, R_over_c);
  Complex acc(1.0, 0.0);
  for (int i = 0; i < m; ++i) acc *= z;
  return acc;
}

inline Complex phase(double kappa, double R) {
  return Complex(std::cos(kappa * R), std::sin(kappa * R));
}

// (e^{i kappa R} - 1) / (4 pi R), continuously extended by i kappa/(4 pi).
inline Complex green_minus_static(double kappa, double R) {
  Complex z(0.0, kappa * R);
  if (std::abs(kappa * R) < 1e-4) {
    Complex series = 1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0;
    return Complex(0.0, kappa) * series / kFourPi;
  }
  return (phase(kappa, R) - 1.0) / (kFourPi * R);
}

}  // namespace

Complex green(const Vec3& r, const Vec3& rp, const KernelParams& p) {
  double R = (r - rp).norm();
  if (!(R > 0.0)) throw OperatorError("green kernel evaluated at coincident points");
  return phase(p.kappa, R) / (kFourPi * R);
}

Complex green_domega(const Vec3& r, const Vec3& rp, const KernelParams& p, int m) {
  double R = (r - rp).norm();
  if (!(R > 0.0)) throw OperatorError("green_domega evaluated at coincident points");
  return ipow_iRc(R / p.c, m) * phase(p.kappa, R) / (kFourPi * R);
}

Complex dgreen_dn_domega(const Vec3& r, const Vec3& rp, const Vec3& normal_at_r,
                         const KernelParams& p, int m) {
  Vec3 d = r - rp;
  double R = d.norm();
  if (!(R > 0.0)) throw OperatorError("dgreen_dn_domega evaluated at coincident points");
  double proj = d.dot(normal_at_r);
  Complex radial(m - 1.0, p.omega * R / p.c);  // i omega R / c + m - 1
  return proj / (kFourPi * R * R * R) * phase(p.kappa, R) * ipow_iRc(R / p.c, m) * radial;
}

double weighted_norm(const Eigen::VectorXcd& f, const Eigen::VectorXd& w) {
  return std::sqrt(w.dot(f.cwiseAbs2()));
}

Complex weighted_inner(const Eigen::VectorXcd& f, const Eigen::VectorXcd& g,
                       const Eigen::VectorXd& w) {
  Complex acc(0.0, 0.0);
  for (Eigen::Index i = 0; i < f.size(); ++i) acc += w[i] * f[i] * std::conj(g[i]);
  return acc;
}

// ---------------------------------------------------------------------------
// Assembly
// ---------------------------------------------------------------------------

namespace {

struct PanelQuad {
  std::vector<Vec3> nodes;
  std::vector<double> weights;  // quadrature weight * 2 * area
};

std::vector<PanelQuad> precompute_panel_quads(const SurfaceMesh& mesh, int degree) {
  const QuadratureRule& rule = regular_rule(degree);
  std::vector<PanelQuad> quads(mesh.n_panels());
  for (int k = 0; k < mesh.n_panels(); ++k) {
    Triangle t = mesh.panel_triangle(k);
    double two_area = 2.0 * mesh.areas[k];
    PanelQuad& q = quads[k];
    q.nodes.resize(rule.nodes.size());
    q.weights.resize(rule.nodes.size());
    for (size_t i = 0; i < rule.nodes.size(); ++i) {
      const auto& b = rule.nodes[i];
      q.nodes[i] = b[0] * t.a + b[1] * t.b + b[2] * t.c;
      q.weights[i] = rule.weights[i] * two_area;
    }
  }
  return quads;
}

// Entry of the m-th omega-derivative of S for target on the panel itself.
Complex s_self_entry(const Triangle& tri, const Vec3& target, const KernelParams& p, int m,
                     const AssemblyOptions& opt) {
  if (m == 0) {
    // Weak-singularity subtraction G = (G - G_0) + G_0; the bounded
    // difference integrates to machine accuracy in Duffy coordinates (a raw
    // panel rule stalls at ~1e-5 on the |r - r'| kink), the static part by
    // the exact-in-u Duffy reduction.
    Complex smooth = duffy_panel_integral(
        tri, target,
        [&](const Vec3& rp) { return green_minus_static(p.kappa, (target - rp).norm()); },
        opt.duffy_points);
    return smooth + singular_panel_integral(tri, target);
  }
  return duffy_panel_integral(
      tri, target,
      [&](const Vec3& rp) { return green_domega(target, rp, p, m); }, opt.duffy_points);
}

// Curvature-model adjoint-double-layer kernel. On the underlying smooth
// surface (r - r').n(r) = (H/2) R^2 (exact on a sphere, O(R^3) close in
// general), so near the diagonal the facet-exact kernel loses an O(h) mass;
// the model kernel
//   (H/2) e^{i kappa R} (iR/c)^m (i omega R/c + m - 1) / (4 pi R)
// restores it. Flat facets (H = 0) keep the exact zero.
Complex kstar_model_kernel(double H, const Vec3& target, const Vec3& rp,
                           const KernelParams& p, int m) {
  double R = (target - rp).norm();
  Complex radial(m - 1.0, p.omega * R / p.c);
  return 0.5 * H * phase(p.kappa, R) * ipow_iRc(R / p.c, m) * radial / (kFourPi * R);
}

Complex kstar_self_entry(const Triangle& tri, const Vec3& target, const KernelParams& p,
                         int m, double mean_curvature, const AssemblyOptions& opt) {
  if (mean_curvature == 0.0) return Complex(0.0, 0.0);
  return duffy_panel_integral(
      tri, target,
      [&](const Vec3& rp) { return kstar_model_kernel(mean_curvature, target, rp, p, m); },
      opt.duffy_points);
}

// Generic assembly driver: fills op(j,k) with the integral over panel k of a
// kernel evaluated at target centroid j. The kernel pair (S-like, K*-like,
// or their omega-derivatives) is selected by 'entry'.
template <typename FarKernel, typename NearKernel, typename SelfEntry>
DenseOperator assemble_generic(const SurfaceMesh& mesh, const AssemblyOptions& opt,
                               FarKernel&& far_kernel, NearKernel&& near_kernel,
                               SelfEntry&& self_entry) {
  const int n = mesh.n_panels();
  DenseOperator op;
  op.entries.resize(n, n);
  op.weight = mesh.area_weights();

  std::vector<PanelQuad> quads = precompute_panel_quads(mesh, opt.far_degree);
  std::vector<double> diam(n);
  for (int k = 0; k < n; ++k) diam[k] = mesh.panel_triangle(k).diameter();

  for (int j = 0; j < n; ++j) {
    const Vec3 target = mesh.centroids[j];
    const Vec3 nj = mesh.normals[j];
    for (int k = 0; k < n; ++k) {
      if (k == j) {
        op.entries(j, k) = self_entry(k, mesh.panel_triangle(k), target, nj);
        continue;
      }
      double dist = (target - mesh.centroids[k]).norm();
      double scale = std::max(diam[j], diam[k]);
      if (dist < opt.near_factor * scale) {
        auto res = near_singular_integral(
            mesh.panel_triangle(k),
            [&](const Vec3& rp) { return near_kernel(j, target, nj, rp); }, opt.near_rtol);
        op.entries(j, k) = res.value;
      } else {
        const PanelQuad& q = quads[k];
        Complex acc(0.0, 0.0);
        for (size_t i = 0; i < q.nodes.size(); ++i)
          acc += q.weights[i] * far_kernel(target, nj, q.nodes[i]);
        op.entries(j, k) = acc;
      }
    }
  }
  return op;
}

}  // namespace

DenseOperator assemble_S(const SurfaceMesh& mesh, const KernelParams& p,
                         const AssemblyOptions& opt) {
  auto far = [&p](const Vec3& r, const Vec3&, const Vec3& rp) { return green(r, rp, p); };
  auto near = [&p](int, const Vec3& r, const Vec3&, const Vec3& rp) {
    return green(r, rp, p);
  };
  return assemble_generic(mesh, opt, far, near,
                          [&](int, const Triangle& tri, const Vec3& target, const Vec3&) {
                            return s_self_entry(tri, target, p, 0, opt);
                          });
}

DenseOperator assemble_Kstar(const SurfaceMesh& mesh, const KernelParams& p,
                             const AssemblyOptions& opt) {
  auto far = [&p](const Vec3& r, const Vec3& nr, const Vec3& rp) {
    return dgreen_dn_domega(r, rp, nr, p, 0);
  };
  auto near = [&](int j, const Vec3& r, const Vec3& nr, const Vec3& rp) {
    double H = mesh.curvature[j];
    return H == 0.0 ? dgreen_dn_domega(r, rp, nr, p, 0)
                    : kstar_model_kernel(H, r, rp, p, 0);
  };
  return assemble_generic(mesh, opt, far, near,
                          [&](int k, const Triangle& tri, const Vec3& target, const Vec3&) {
                            return kstar_self_entry(tri, target, p, 0,
                                                    mesh.curvature[k], opt);
                          });
}

DenseOperator assemble_A(const SurfaceMesh& mesh, const KernelParams& p,
                         const AssemblyOptions& opt) {
  if (p.omega < 0.0) throw OperatorError("assemble_A requires omega >= 0");
  const Complex ieta(0.0, p.eta);
  auto far = [&p, ieta](const Vec3& r, const Vec3& nr, const Vec3& rp) {
    return dgreen_dn_domega(r, rp, nr, p, 0) - ieta * green(r, rp, p);
  };
  auto near = [&](int j, const Vec3& r, const Vec3& nr, const Vec3& rp) {
    double H = mesh.curvature[j];
    Complex kpart = H == 0.0 ? dgreen_dn_domega(r, rp, nr, p, 0)
                             : kstar_model_kernel(H, r, rp, p, 0);
    return kpart - ieta * green(r, rp, p);
  };
  DenseOperator op = assemble_generic(
      mesh, opt, far, near,
      [&](int k, const Triangle& tri, const Vec3& target, const Vec3&) {
        return 0.5 + kstar_self_entry(tri, target, p, 0, mesh.curvature[k], opt) -
               ieta * s_self_entry(tri, target, p, 0, opt);
      });
  return op;
}

DenseOperator assemble_A_derivative(const SurfaceMesh& mesh, const KernelParams& p, int m,
                                    const AssemblyOptions& opt) {
  if (m < 1) throw OperatorError("assemble_A_derivative requires m >= 1");
  if (p.omega < 0.0) throw OperatorError("assemble_A_derivative requires omega >= 0");
  if (std::abs(p.omega - p.omega0) < 1e-9)
    throw OperatorError("A derivative undefined at the coupling switch omega0");

  const bool high = p.omega > p.omega0;
  const Complex i_unit(0.0, 1.0);
  auto s_part = [&, high](const Vec3& r, const Vec3& rp) {
    if (high)
      return i_unit * (double(m) * green_domega(r, rp, p, m - 1) +
                       p.omega * green_domega(r, rp, p, m));
    return i_unit * green_domega(r, rp, p, m);
  };
  auto far = [&](const Vec3& r, const Vec3& nr, const Vec3& rp) {
    return dgreen_dn_domega(r, rp, nr, p, m) - s_part(r, rp);
  };
  auto near = [&](int j, const Vec3& r, const Vec3& nr, const Vec3& rp) {
    double H = mesh.curvature[j];
    Complex kpart = H == 0.0 ? dgreen_dn_domega(r, rp, nr, p, m)
                             : kstar_model_kernel(H, r, rp, p, m);
    return kpart - s_part(r, rp);
  };
  return assemble_generic(
      mesh, opt, far, near,
      [&](int k, const Triangle& tri, const Vec3& target, const Vec3&) {
        Complex k_m = kstar_self_entry(tri, target, p, m, mesh.curvature[k], opt);
        Complex s_m = s_self_entry(tri, target, p, m, opt);
        if (high) {
          Complex s_m1 = s_self_entry(tri, target, p, m - 1, opt);
          return k_m - i_unit * (double(m) * s_m1 + p.omega * s_m);
        }
        return k_m - i_unit * s_m;
      });
}

}  // namespace bdod
