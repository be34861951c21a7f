// Copyright (c) the bdod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "bdod/quadrature.hpp"

#include <cmath>

namespace bdod {

namespace {

void push_orbit3(QuadratureRule& rule, double a, double w) {
  double b = 1.0 - 2.0 * a;
  rule.nodes.push_back({a, a, b});
  rule.nodes.push_back({a, b, a});
  rule.nodes.push_back({b, a, a});
  for (int i = 0; i < 3; ++i) rule.weights.push_back(w * 0.5);
}

void push_orbit6(QuadratureRule& rule, double a, double b, double c, double w) {
  rule.nodes.push_back({a, b, c});
  rule.nodes.push_back({a, c, b});
  rule.nodes.push_back({b, a, c});
  rule.nodes.push_back({b, c, a});
  rule.nodes.push_back({c, a, b});
  rule.nodes.push_back({c, b, a});
  for (int i = 0; i < 6; ++i) rule.weights.push_back(w * 0.5);
}

QuadratureRule make_rule(int degree) {
  QuadratureRule r;
  r.degree = degree;
  switch (degree) {
    case 1:
      r.nodes.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
      r.weights.push_back(0.5);
      break;
    case 2:
      push_orbit3(r, 1.0 / 6.0, 1.0 / 3.0);
      break;
    case 3:
      // Strang six-point rule, equal weights.
      push_orbit6(r, 0.659027622374092, 0.231933368553031, 0.109039009072877,
                  1.0 / 6.0);
      break;
    case 4:
      push_orbit3(r, 0.445948490915965, 0.223381589678011);
      push_orbit3(r, 0.091576213509771, 0.109951743655322);
      break;
    case 5:
      r.nodes.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
      r.weights.push_back(0.225 * 0.5);
      push_orbit3(r, 0.470142064105115, 0.132394152788506);
      push_orbit3(r, 0.101286507323456, 0.125939180544827);
      break;
    case 6:
      push_orbit3(r, 0.249286745170910, 0.116786275726379);
      push_orbit3(r, 0.063089014491502, 0.050844906370207);
      push_orbit6(r, 0.310352451033785, 0.636502499121399, 0.053145049844816,
                  0.082851075618374);
      break;
    default:
      throw QuadratureError("unsupported quadrature degree " + std::to_string(degree));
  }
  return r;
}

}  // namespace

const QuadratureRule& regular_rule(int degree) {
  static const QuadratureRule rules[6] = {make_rule(1), make_rule(2), make_rule(3),
                                          make_rule(4), make_rule(5), make_rule(6)};
  if (degree < 1 || degree > 6)
    throw QuadratureError("unsupported quadrature degree " + std::to_string(degree));
  return rules[degree - 1];
}

void gauss_legendre_01(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = 0.5 * (1.0 - z);
    x[n - 1 - i] = 0.5 * (1.0 + z);
    w[i] = 1.0 / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
}

namespace {

// Barycentric coordinates of p with respect to t (least-squares in the
// panel plane).
std::array<double, 3> barycentric(const Triangle& t, const Vec3& p) {
  Vec3 e1 = t.b - t.a, e2 = t.c - t.a, d = p - t.a;
  double a11 = e1.dot(e1), a12 = e1.dot(e2), a22 = e2.dot(e2);
  double b1 = d.dot(e1), b2 = d.dot(e2);
  double det = a11 * a22 - a12 * a12;
  double u = (a22 * b1 - a12 * b2) / det;
  double v = (a11 * b2 - a12 * b1) / det;
  return {1.0 - u - v, u, v};
}

}  // namespace

double singular_panel_integral(const Triangle& panel, const Vec3& target, int kernel_power) {
  if (kernel_power != 1)
    throw QuadratureError("singular_panel_integral supports kernel power 1 only");
  const double area = panel.area();
  if (!(area > 0.0)) throw QuadratureError("degenerate panel in singular integral");

  auto bary = barycentric(panel, target);
  const double tol = 1e-9;
  double off_plane = std::abs((target - panel.a).dot(panel.unit_normal()));
  if (bary[0] < -tol || bary[1] < -tol || bary[2] < -tol ||
      off_plane > 1e-9 * panel.diameter())
    throw QuadratureError("singular integral target not on the panel");

  static std::vector<double> gx, gw;
  if (gx.empty()) gauss_legendre_01(32, gx, gw);

  const Vec3 verts[3] = {panel.a, panel.b, panel.c};
  double total = 0.0;
  for (int i = 0; i < 3; ++i) {
    Vec3 e1 = verts[i] - target;
    Vec3 e2 = verts[(i + 1) % 3] - target;
    double twice_area = e1.cross(e2).norm();
    if (twice_area < 1e-14 * area) continue;  // target on this edge/vertex
    // After the Duffy map r' = target + u((1-v)e1 + v e2) the u-integral of
    // 1/|r'-target| * u * |e1 x e2| is exact; only the v-integral remains.
    double sub = 0.0;
    for (size_t q = 0; q < gx.size(); ++q) {
      double v = gx[q];
      sub += gw[q] / ((1.0 - v) * e1 + v * e2).norm();
    }
    total += twice_area * sub;
  }
  return total / (4.0 * M_PI);
}

std::complex<double> duffy_panel_integral(
    const Triangle& panel, const Vec3& target,
    const std::function<std::complex<double>(const Vec3&)>& kernel, int n_gauss) {
  const double area = panel.area();
  if (!(area > 0.0)) throw QuadratureError("degenerate panel in Duffy integral");

  std::vector<double> gx, gw;
  gauss_legendre_01(n_gauss, gx, gw);

  const Vec3 verts[3] = {panel.a, panel.b, panel.c};
  std::complex<double> total = 0.0;
  for (int i = 0; i < 3; ++i) {
    Vec3 e1 = verts[i] - target;
    Vec3 e2 = verts[(i + 1) % 3] - target;
    double twice_area = e1.cross(e2).norm();
    if (twice_area < 1e-14 * area) continue;
    std::complex<double> sub = 0.0;
    for (int qu = 0; qu < n_gauss; ++qu) {
      double u = gx[qu];
      std::complex<double> inner = 0.0;
      for (int qv = 0; qv < n_gauss; ++qv) {
        double v = gx[qv];
        Vec3 r = target + u * ((1.0 - v) * e1 + v * e2);
        inner += gw[qv] * kernel(r);
      }
      sub += gw[qu] * u * inner;
    }
    total += twice_area * sub;
  }
  return total;
}

namespace {

struct AdaptiveState {
  const std::function<std::complex<double>(const Vec3&)>* kernel;
  const QuadratureRule* rule;
  double abs_tol;
  long evals;
  long max_evals;
  double err_acc;
  bool budget_hit;
};

std::complex<double> estimate(AdaptiveState& st, const Triangle& t) {
  st.evals += static_cast<long>(st.rule->nodes.size());
  return integrate_panel(t, *st.rule, *st.kernel);
}

std::complex<double> adapt(AdaptiveState& st, const Triangle& t,
                           std::complex<double> coarse, double tol, int depth) {
  Vec3 mab = 0.5 * (t.a + t.b), mbc = 0.5 * (t.b + t.c), mca = 0.5 * (t.c + t.a);
  Triangle kids[4] = {{t.a, mab, mca}, {mab, t.b, mbc}, {mca, mbc, t.c}, {mab, mbc, mca}};
  std::complex<double> fine[4];
  std::complex<double> sum = 0.0;
  for (int i = 0; i < 4; ++i) {
    fine[i] = estimate(st, kids[i]);
    sum += fine[i];
  }
  double err = std::abs(sum - coarse);
  if (err <= tol || depth <= 0 || st.evals >= st.max_evals) {
    if (err > tol) st.budget_hit = true;
    st.err_acc += err;
    return sum;
  }
  std::complex<double> refined = 0.0;
  for (int i = 0; i < 4; ++i) refined += adapt(st, kids[i], fine[i], tol / 4.0, depth - 1);
  return refined;
}

}  // namespace

AdaptiveResult near_singular_integral(
    const Triangle& panel, const std::function<std::complex<double>(const Vec3&)>& kernel,
    double rtol, int max_depth, long max_evals) {
  AdaptiveState st{&kernel, &regular_rule(5), 0.0, 0, max_evals, 0.0, false};
  std::complex<double> coarse = estimate(st, panel);
  double scale = std::max(std::abs(coarse), 1e-300);
  st.abs_tol = rtol * scale;

  AdaptiveResult res;
  res.value = adapt(st, panel, coarse, st.abs_tol, max_depth);
  res.evals = st.evals;
  double mag = std::max(std::abs(res.value), 1e-300);
  res.achieved_rtol = st.err_acc / mag;
  res.converged = !st.budget_hit && res.achieved_rtol <= 4.0 * rtol;
  return res;
}

}  // namespace bdod
