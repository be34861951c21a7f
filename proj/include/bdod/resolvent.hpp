// Copyright (c) the bdod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef BDOD_RESOLVENT_HPP
#define BDOD_RESOLVENT_HPP

#include <functional>
#include <optional>
#include <vector>

#include "bdod/operators.hpp"

namespace bdod {

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dense LU solve with one step of iterative refinement. The relative
// residual (discrete L2(Gamma)) is written to *residual_out when given and
// must come out <= 1e-10 for well-conditioned systems.
Eigen::VectorXcd solve_density(const DenseOperator& A, const Eigen::VectorXcd& rhs,
                               double* residual_out = nullptr);

// L2(Gamma)-weighted spectral norm of A^{-1}: 1/sigma_min(W^1/2 A W^-1/2).
// Full SVD for N <= 4096; LU-based inverse power iteration above that (or
// when forced, which the tests use to cross-check the two paths).
double resolvent_norm(const DenseOperator& A, bool force_iterative = false);
// Weighted spectral norm of A (power iteration).
double operator_norm(const DenseOperator& A);

struct SweepResult {
  std::vector<double> omegas;
  Eigen::MatrixXcd densities;  // panels x frequencies
  std::vector<double> resolvent_norms;
  std::vector<double> rhs_norms;
  std::vector<double> solve_residuals;
  Eigen::VectorXd weight;  // panel areas
  double omega0 = 1.0;
  double c = 1.0;
  double signal_duration = 0.0;  // temporal footprint of the incident trace on Gamma

  int n_freq() const { return static_cast<int>(omegas.size()); }
  void validate() const;  // grid ascending, omega0 excluded, sizes equal
};

struct QGrowthFit {
  double q_hat = 0.0;
  double c2_hat = 0.0;
  std::optional<double> c1_hat;  // max resolvent norm on [0, omega0); empty if no such point
  double residual = 0.0;         // RMS log-log misfit on the high band
  double omega0 = 1.0;
};

// Fits ||A^-1|| ~ C2 omega^q on the grid points above omega0 by least
// squares in log-log coordinates; needs at least 8 such points.
QGrowthFit q_fit(const std::vector<double>& omegas, const std::vector<double>& norms,
                 double omega0);
QGrowthFit q_fit(const SweepResult& sweep, double omega0);

// Residual report for the frequency-derivative identity
//   A_w (d^p mu) = d^p R - sum_k C(p,k) (d^k A)(d^{p-k} mu).
// Families map omega to the operator / rhs and their analytic derivatives;
// mu-derivatives come from a 5-point central FD stencil of solves.
struct LeibnizReport {
  double residual_rel = 0.0;
  int p = 0;
  double fd_step = 0.0;
  double omega = 0.0;
};

using OperatorFamily = std::function<DenseOperator(double)>;
using OperatorDerivFamily = std::function<DenseOperator(double, int)>;
using RhsFamily = std::function<Eigen::VectorXcd(double)>;
using RhsDerivFamily = std::function<Eigen::VectorXcd(double, int)>;

LeibnizReport verify_leibniz_identity(const OperatorFamily& A, const OperatorDerivFamily& dA,
                                      const RhsFamily& rhs, const RhsDerivFamily& drhs,
                                      double omega, double omega0, int p, double fd_step);

}  // namespace bdod

#endif
