#pragma once

#include "ecbc/conditional.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace ecbc {

//! Bernstein coefficients eta[h1][h2] of C^{#(1)}(., . | v) at one v;
//! (l1 + 1) x (l2 + 1), zero first row and column, eta[l1][l2] = 1.
struct EtaMatrix
{
  Eigen::MatrixXd eta;
  double v = 0.0;

  int l1() const { return static_cast<int>(eta.rows()) - 1; }
  int l2() const { return static_cast<int>(eta.cols()) - 1; }
};

EtaMatrix eta_matrix(const EcbcCoefficients& stage2, double v);
EtaMatrix eta_matrix(const ConditionalCopulaFit& fit, double v);

// l x l matrix with entry (h - 1, g) = l C(l,h) C(l-1,g) B(h+g+1, 2l-h-g),
// h = 1..l, g = 0..l-1: the integral of P_{l,h} against l P_{l-1,g}.
Eigen::MatrixXd beta_weights(int l);

// 4 Tr(H^T G) - 1 with G = A D B^T.
double kendall_tau(const EtaMatrix& eta);
// 12 Tr(R^T J) with J = A (p q^T) B^T.
double spearman_rho(const EtaMatrix& eta);

double kendall_tau(const ConditionalCopulaFit& fit, double v);
double spearman_rho(const ConditionalCopulaFit& fit, double v);
double kendall_tau(const ConditionalCopulaEnsemble& model, double v);
double spearman_rho(const ConditionalCopulaEnsemble& model, double v);

// 12 * integral of the normalized copula C^#(., . | v) minus 3, by
// tensor-product Gauss-Legendre quadrature. Diagnostic for spearman_rho,
// which it matches up to the inversion tolerance.
double spearman_rho_normalized(const ConditionalCopulaFit& fit, double v, int order = 64);

struct DependencePoint
{
  double x = 0.0;
  double v = 0.0;
  double tau = 0.0;
  double rho = 0.0;
};

using DependenceCurve = std::vector<DependencePoint>;

// v_grid must be nonempty and strictly increasing in [0,1]. x is labelled by
// the empirical covariate quantile of v.
DependenceCurve dependence_curve(const ConditionalCopulaEnsemble& model, std::span<const double> v_grid);

// Maps raw covariate values through F_nX and evaluates the curve there,
// keeping the raw x as the label.
DependenceCurve dependence_curve_at_x(const ConditionalCopulaEnsemble& model, std::span<const double> x_grid);

} // namespace ecbc
