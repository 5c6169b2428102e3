#include "ecbc/depmeasures.hpp"

#include "ecbc/errors.hpp"
#include "ecbc/quadrature.hpp"

#include <cmath>
#include <string>

namespace ecbc {

namespace {

Eigen::MatrixXd second_differences(const Eigen::MatrixXd& eta)
{
  const Eigen::Index r = eta.rows() - 1;
  const Eigen::Index c = eta.cols() - 1;
  return eta.bottomRightCorner(r, c) - eta.bottomLeftCorner(r, c) - eta.topRightCorner(r, c) +
         eta.topLeftCorner(r, c);
}

template <class Fn>
double ensemble_mean(const ConditionalCopulaEnsemble& model, Fn&& fn)
{
  double total = 0.0;
  for (const auto& fit : model.members) {
    total += fn(fit);
  }
  return total / static_cast<double>(model.members.size());
}

} // namespace

EtaMatrix eta_matrix(const EcbcCoefficients& stage2, double v)
{
  if (stage2.dim() != 3) {
    throw ValidationError("eta matrix needs a trivariate coefficient tensor");
  }
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ValidationError("v outside [0,1]");
  }
  const auto values = ecbc_partial_v_coefficients(stage2, v);
  const int l1 = stage2.degrees()[0];
  const int l2 = stage2.degrees()[1];
  EtaMatrix out{Eigen::MatrixXd(l1 + 1, l2 + 1), v};
  for (int h1 = 0; h1 <= l1; ++h1) {
    for (int h2 = 0; h2 <= l2; ++h2) {
      out.eta(h1, h2) = values[static_cast<std::size_t>(h1) * (l2 + 1) + h2];
    }
  }
  return out;
}

EtaMatrix eta_matrix(const ConditionalCopulaFit& fit, double v) { return eta_matrix(fit.stage2, v); }

Eigen::MatrixXd beta_weights(int l)
{
  if (l < 1) {
    throw ValidationError("beta weights need degree >= 1");
  }
  Eigen::MatrixXd a(l, l);
  const double log_l = std::log(static_cast<double>(l));
  const double log_total = std::lgamma(2.0 * l + 1.0);
  for (int h = 1; h <= l; ++h) {
    for (int g = 0; g < l; ++g) {
      const double log_beta = std::lgamma(h + g + 1.0) + std::lgamma(2.0 * l - h - g) - log_total;
      a(h - 1, g) = std::exp(log_l + log_binomial(l, h) + log_binomial(l - 1, g) + log_beta);
    }
  }
  return a;
}

double kendall_tau(const EtaMatrix& eta)
{
  const int l1 = eta.l1();
  const int l2 = eta.l2();
  const Eigen::MatrixXd a = beta_weights(l1);
  const Eigen::MatrixXd b = beta_weights(l2);
  const Eigen::MatrixXd h = eta.eta.bottomRightCorner(l1, l2);
  const Eigen::MatrixXd g = a * second_differences(eta.eta) * b.transpose();
  return 4.0 * (h.transpose() * g).trace() - 1.0;
}

double spearman_rho(const EtaMatrix& eta)
{
  const int l1 = eta.l1();
  const int l2 = eta.l2();
  const Eigen::MatrixXd a = beta_weights(l1);
  const Eigen::MatrixXd b = beta_weights(l2);
  const Eigen::VectorXd last_col = eta.eta.col(l2);
  const Eigen::VectorXd last_row = eta.eta.row(l1).transpose();
  const Eigen::VectorXd p = last_col.tail(l1) - last_col.head(l1);
  const Eigen::VectorXd q = last_row.tail(l2) - last_row.head(l2);
  const Eigen::MatrixXd r = eta.eta.bottomRightCorner(l1, l2) - last_col.tail(l1) * last_row.tail(l2).transpose();
  const Eigen::MatrixXd j = (a * p) * (b * q).transpose();
  return 12.0 * (r.transpose() * j).trace();
}

double kendall_tau(const ConditionalCopulaFit& fit, double v) { return kendall_tau(eta_matrix(fit, v)); }
double spearman_rho(const ConditionalCopulaFit& fit, double v) { return spearman_rho(eta_matrix(fit, v)); }

double kendall_tau(const ConditionalCopulaEnsemble& model, double v)
{
  return ensemble_mean(model, [v](const ConditionalCopulaFit& fit) { return kendall_tau(fit, v); });
}

double spearman_rho(const ConditionalCopulaEnsemble& model, double v)
{
  return ensemble_mean(model, [v](const ConditionalCopulaFit& fit) { return spearman_rho(fit, v); });
}

double spearman_rho_normalized(const ConditionalCopulaFit& fit, double v, int order)
{
  const auto rule = gauss_legendre_unit(order);
  const auto grid = conditional_copula_grid(fit, rule.nodes, rule.nodes, v);
  double total = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      total += rule.weights[i] * rule.weights[j] * grid[i][j];
    }
  }
  return 12.0 * total - 3.0;
}

DependenceCurve dependence_curve(const ConditionalCopulaEnsemble& model, std::span<const double> v_grid)
{
  if (v_grid.empty()) {
    throw ValidationError("dependence curve grid is empty");
  }
  for (std::size_t i = 0; i < v_grid.size(); ++i) {
    if (!(v_grid[i] >= 0.0 && v_grid[i] <= 1.0)) {
      throw ValidationError("v grid value outside [0,1]");
    }
    if (i > 0 && !(v_grid[i] > v_grid[i - 1])) {
      throw ValidationError("v grid is not strictly increasing");
    }
  }
  DependenceCurve curve;
  curve.reserve(v_grid.size());
  for (double v : v_grid) {
    curve.push_back({model.covariate_cdf().quantile(v), v, kendall_tau(model, v), spearman_rho(model, v)});
  }
  return curve;
}

DependenceCurve dependence_curve_at_x(const ConditionalCopulaEnsemble& model, std::span<const double> x_grid)
{
  if (x_grid.empty()) {
    throw ValidationError("dependence curve grid is empty");
  }
  DependenceCurve curve;
  curve.reserve(x_grid.size());
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    if (i > 0 && !(x_grid[i] > x_grid[i - 1])) {
      throw ValidationError("x grid is not strictly increasing");
    }
    const double v = model.covariate_cdf()(x_grid[i]);
    curve.push_back({x_grid[i], v, kendall_tau(model, v), spearman_rho(model, v)});
  }
  return curve;
}

} // namespace ecbc
