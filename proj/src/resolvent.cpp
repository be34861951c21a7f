// Copyright (c) the bdod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "bdod/resolvent.hpp"

#include <cmath>

namespace bdod {

Eigen::VectorXcd solve_density(const DenseOperator& A, const Eigen::VectorXcd& rhs,
                               double* residual_out) {
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A.entries);
  // Pivot-ratio condition estimate; Eigen's rcond() misreports exactly
  // singular factors.
  Eigen::VectorXd pivots = lu.matrixLU().diagonal().cwiseAbs();
  double pmin = pivots.minCoeff(), pmax = pivots.maxCoeff();
  if (!(pmin > 1e-14 * pmax) || pmax == 0.0)
    throw SolverError("matrix singular to working precision (rcond estimate " +
                      std::to_string(pmax > 0 ? pmin / pmax : 0.0) + ")");
  Eigen::VectorXcd x = lu.solve(rhs);
  Eigen::VectorXcd r = rhs - A.entries * x;
  x += lu.solve(r);

  double rhs_norm = weighted_norm(rhs, A.weight);
  double res = 0.0;
  if (rhs_norm > 0.0)
    res = weighted_norm(rhs - A.entries * x, A.weight) / rhs_norm;
  if (residual_out) *residual_out = res;
  return x;
}

namespace {

Eigen::MatrixXcd weighted_similarity(const DenseOperator& A) {
  Eigen::VectorXd sqw = A.weight.cwiseSqrt();
  Eigen::MatrixXcd B = A.entries;
  for (int i = 0; i < B.rows(); ++i) B.row(i) *= sqw[i];
  for (int j = 0; j < B.cols(); ++j) B.col(j) /= sqw[j];
  return B;
}

// Deterministic pseudo-random start vector for power iterations.
Eigen::VectorXcd start_vector(int n) {
  Eigen::VectorXcd v(n);
  unsigned long long s = 0x9e3779b97f4a7c15ULL;
  for (int i = 0; i < n; ++i) {
    s = s * 6364136223846793005ULL + 1442695040888963407ULL;
    double a = double((s >> 11) & ((1ULL << 40) - 1)) / double(1ULL << 40) - 0.5;
    s = s * 6364136223846793005ULL + 1442695040888963407ULL;
    double b = double((s >> 11) & ((1ULL << 40) - 1)) / double(1ULL << 40) - 0.5;
    v[i] = Complex(a, b);
  }
  v.normalize();
  return v;
}

// Largest singular value of B by power iteration on B^H B.
double power_sigma_max(const Eigen::MatrixXcd& B) {
  Eigen::VectorXcd x = start_vector(static_cast<int>(B.rows()));
  double sigma = 0.0;
  for (int it = 0; it < 300; ++it) {
    Eigen::VectorXcd y = B * x;
    Eigen::VectorXcd z = B.adjoint() * y;
    double nz = z.norm();
    if (nz == 0.0) return 0.0;
    double next = std::sqrt(nz);
    x = z / nz;
    if (it > 4 && std::abs(next - sigma) <= 1e-12 * next) return next;
    sigma = next;
  }
  return sigma;
}

// Smallest singular value of B via inverse power iteration on (B^H B)^{-1}
// using an in-place LU of B. With P B = L U:
//   B^{-1} x : lu.solve
//   B^{-H} x : solve U^H a = x, L^H z = a, y = P^T z.
double lu_sigma_min(Eigen::MatrixXcd B) {
  const int n = static_cast<int>(B.rows());
  Eigen::PartialPivLU<Eigen::Ref<Eigen::MatrixXcd>> lu(B);
  auto solve_adjoint = [&](const Eigen::VectorXcd& x) {
    Eigen::VectorXcd a =
        lu.matrixLU().triangularView<Eigen::Upper>().adjoint().solve(x);
    Eigen::VectorXcd z =
        lu.matrixLU().triangularView<Eigen::UnitLower>().adjoint().solve(a);
    return (lu.permutationP().transpose() * z).eval();
  };
  Eigen::VectorXcd x = start_vector(n);
  double lambda = 0.0;  // approx largest eigenvalue of (B B^H)^-1... of inverse Gram
  for (int it = 0; it < 500; ++it) {
    Eigen::VectorXcd y = solve_adjoint(x);  // B^{-H} x
    Eigen::VectorXcd z = lu.solve(y);       // B^{-1} B^{-H} x
    double nz = z.norm();
    if (!(nz > 0.0)) throw SolverError("inverse power iteration broke down");
    double next = nz;
    x = z / nz;
    if (it > 8 && std::abs(next - lambda) <= 1e-13 * next) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return 1.0 / std::sqrt(lambda);
}

}  // namespace

double resolvent_norm(const DenseOperator& A, bool force_iterative) {
  Eigen::MatrixXcd B = weighted_similarity(A);
  double sigma_min;
  if (A.size() <= 4096 && !force_iterative) {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(B);
    sigma_min = svd.singularValues().minCoeff();
  } else {
    sigma_min = lu_sigma_min(std::move(B));
  }
  if (!(sigma_min > 1e-300))
    throw SolverError("sigma_min below machine-epsilon guard");
  return 1.0 / sigma_min;
}

double operator_norm(const DenseOperator& A) {
  return power_sigma_max(weighted_similarity(A));
}

void SweepResult::validate() const {
  const size_t m = omegas.size();
  if (resolvent_norms.size() != m || rhs_norms.size() != m ||
      solve_residuals.size() != m || static_cast<size_t>(densities.cols()) != m)
    throw SolverError("SweepResult: inconsistent lengths");
  for (size_t i = 0; i < m; ++i) {
    if (omegas[i] < 0.0) throw SolverError("SweepResult: negative frequency");
    if (i > 0 && !(omegas[i] > omegas[i - 1]))
      throw SolverError("SweepResult: grid not strictly increasing");
    if (omegas[i] == omega0) throw SolverError("SweepResult: grid contains omega0");
  }
}

QGrowthFit q_fit(const std::vector<double>& omegas, const std::vector<double>& norms,
                 double omega0) {
  if (omegas.size() != norms.size()) throw SolverError("q_fit: size mismatch");
  QGrowthFit fit;
  fit.omega0 = omega0;

  double c1 = 0.0;
  bool has_low = false;
  std::vector<double> lx, ly;
  for (size_t i = 0; i < omegas.size(); ++i) {
    if (omegas[i] <= omega0) {
      has_low = true;
      c1 = std::max(c1, norms[i]);
    } else {
      lx.push_back(std::log(omegas[i]));
      ly.push_back(std::log(norms[i]));
    }
  }
  if (lx.size() < 8)
    throw SolverError("q_fit: need at least 8 grid points above omega0");
  if (has_low) fit.c1_hat = c1;

  const double n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  double denom = n * sxx - sx * sx;
  fit.q_hat = (n * sxy - sx * sy) / denom;
  double intercept = (sy - fit.q_hat * sx) / n;
  fit.c2_hat = std::exp(intercept);
  double ss = 0.0;
  for (size_t i = 0; i < lx.size(); ++i) {
    double e = ly[i] - (intercept + fit.q_hat * lx[i]);
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

QGrowthFit q_fit(const SweepResult& sweep, double omega0) {
  return q_fit(sweep.omegas, sweep.resolvent_norms, omega0);
}

LeibnizReport verify_leibniz_identity(const OperatorFamily& A_of, const OperatorDerivFamily& dA_of,
                                      const RhsFamily& rhs_of, const RhsDerivFamily& drhs_of,
                                      double omega, double omega0, int p, double fd_step) {
  if (p < 1 || p > 2) throw SolverError("verify_leibniz_identity supports p in {1,2}");
  if (!(fd_step > 0.0)) throw SolverError("fd_step must be positive");
  // The 5-point stencil must not straddle the eta switch.
  double lo = omega - 2.0 * fd_step, hi = omega + 2.0 * fd_step;
  if (lo < omega0 && hi > omega0)
    throw SolverError("FD stencil crosses omega0");
  if (lo <= 0.0) throw SolverError("FD stencil crosses omega = 0");

  Eigen::VectorXcd mu[5];
  Eigen::VectorXd weight;
  for (int i = -2; i <= 2; ++i) {
    DenseOperator Ai = A_of(omega + i * fd_step);
    if (i == 0) weight = Ai.weight;
    mu[i + 2] = solve_density(Ai, rhs_of(omega + i * fd_step));
  }

  // 4th-order central differences.
  Eigen::VectorXcd dmu1 = (-mu[4] + 8.0 * mu[3] - 8.0 * mu[1] + mu[0]) / (12.0 * fd_step);
  Eigen::VectorXcd dmu2 = (-mu[4] + 16.0 * mu[3] - 30.0 * mu[2] + 16.0 * mu[1] - mu[0]) /
                          (12.0 * fd_step * fd_step);
  Eigen::VectorXcd dpu = (p == 1) ? dmu1 : dmu2;

  DenseOperator A0 = A_of(omega);
  Eigen::VectorXcd lhs = A0.entries * dpu;

  Eigen::VectorXcd rhs = drhs_of(omega, p);
  // binomial coefficients C(p,k), k = 1..p
  for (int k = 1; k <= p; ++k) {
    double a = (p == 1) ? 1.0 : (k == 1 ? 2.0 : 1.0);
    DenseOperator dAk = dA_of(omega, k);
    const Eigen::VectorXcd& mu_lower = (p - k == 0) ? mu[2] : dmu1;
    rhs -= a * (dAk.entries * mu_lower);
  }

  LeibnizReport rep;
  rep.p = p;
  rep.fd_step = fd_step;
  rep.omega = omega;
  // Normalize against the larger of the two identity sides and the base
  // equation A mu = R, so an identically-zero derivative family reports the
  // rounding floor instead of 0/0.
  double base = weighted_norm(Eigen::VectorXcd(A0.entries * mu[2]), weight);
  double scale = std::max({weighted_norm(lhs, weight), weighted_norm(rhs, weight), base});
  rep.residual_rel = scale > 0.0 ? weighted_norm(Eigen::VectorXcd(lhs - rhs), weight) / scale : 0.0;
  return rep;
}

}  // namespace bdod
