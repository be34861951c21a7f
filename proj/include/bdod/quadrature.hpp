// Copyright (c) the bdod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef BDOD_QUADRATURE_HPP
#define BDOD_QUADRATURE_HPP

#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "bdod/geometry.hpp"

namespace bdod {

struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Symmetric rule on the reference triangle {(x,y): x,y >= 0, x+y <= 1}.
// Nodes are barycentric triples; weights are positive and sum to 1/2.
struct QuadratureRule {
  int degree = 0;
  std::vector<std::array<double, 3>> nodes;
  std::vector<double> weights;
};

// Positive-weight Gauss rules of polynomial exactness degree 1..6.
const QuadratureRule& regular_rule(int degree);

// Integrates f over the physical panel with the given rule.
template <typename F>
auto integrate_panel(const Triangle& t, const QuadratureRule& rule, F&& f)
    -> decltype(f(Vec3())) {
  decltype(f(Vec3())) acc{};
  const double two_area = 2.0 * t.area();
  for (size_t i = 0; i < rule.nodes.size(); ++i) {
    const auto& b = rule.nodes[i];
    Vec3 r = b[0] * t.a + b[1] * t.b + b[2] * t.c;
    acc += (rule.weights[i] * two_area) * f(r);
  }
  return acc;
}

// Integral of 1/(4*pi*|r - r'|) over the panel for a target on the panel.
// The panel is split at the target into up to three subtriangles; the Duffy
// map concentrates the singularity at a vertex where it cancels against the
// Jacobian, leaving a smooth 1D integral per subtriangle.
double singular_panel_integral(const Triangle& panel, const Vec3& target,
                               int kernel_power = 1);

// Duffy-transformed integral of a generic kernel over the panel, target on
// the panel. Handles kernels whose only nonsmoothness is a radial kink at
// the target (e.g. the omega-differentiated Helmholtz kernels).
std::complex<double> duffy_panel_integral(const Triangle& panel, const Vec3& target,
                                          const std::function<std::complex<double>(const Vec3&)>& kernel,
                                          int n_gauss = 16);

struct AdaptiveResult {
  std::complex<double> value{0.0, 0.0};
  double achieved_rtol = 0.0;
  bool converged = false;
  long evals = 0;
};

// Adaptive panel integration by uniform 4-way subdivision; refines until the
// local estimate changes by less than rtol or the budget runs out. Intended
// for near-singular kernels with the target strictly off the panel.
AdaptiveResult near_singular_integral(const Triangle& panel,
                                      const std::function<std::complex<double>(const Vec3&)>& kernel,
                                      double rtol = 1e-8, int max_depth = 20,
                                      long max_evals = 200000);

// Gauss-Legendre nodes/weights on [0,1].
void gauss_legendre_01(int n, std::vector<double>& x, std::vector<double>& w);

}  // namespace bdod

#endif
