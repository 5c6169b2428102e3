#include "ecbc/conditional.hpp"

#include "ecbc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ecbc {

namespace {

void check_unit(double u, const char* what)
{
  if (!(u >= 0.0 && u <= 1.0)) {
    throw ValidationError(std::string(what) + " outside [0,1]");
  }
}

void check_axis(int axis)
{
  if (axis != 1 && axis != 2) {
    throw ValidationError("axis must be 1 or 2, got " + std::to_string(axis));
  }
}

void require_nondegenerate(const std::vector<double>& column, const char* name)
{
  const auto [lo, hi] = std::minmax_element(column.begin(), column.end());
  if (*lo == *hi) {
    throw ValidationError(std::string("column ") + name + " is constant");
  }
}

double clamp_unit(double x) { return std::clamp(x, 0.0, 1.0); }

MarginalStage fit_marginal_stage(const std::vector<double>& y, const std::vector<double>& x, int g, int m)
{
  const std::vector<int> degs{g, m};
  return MarginalStage{fit_ecbc(CheckerboardFit::from_sample({y, x}), degs), EmpiricalCdf(y)};
}

} // namespace

double conditional_marginal_cdf(const ConditionalCopulaFit& fit, int j, double y, double x)
{
  check_axis(j);
  const auto& stage = fit.stage1[static_cast<std::size_t>(j - 1)];
  const double w = stage.response_cdf(y);
  const double v = fit.covariate_cdf(x);
  const double resp[1] = {w};
  return clamp_unit(ecbc_partial_v(stage.coeffs, resp, v));
}

AdjustedSample covariate_adjust(const Dataset& data, const DegreeDraw& degrees)
{
  data.validate();
  require_nondegenerate(data.y1, "y1");
  require_nondegenerate(data.y2, "y2");
  require_nondegenerate(data.x, "x");

  AdjustedSample out{
    {fit_marginal_stage(data.y1, data.x, degrees.g1, degrees.m1),
     fit_marginal_stage(data.y2, data.x, degrees.g2, degrees.m2)},
    PseudoSample{},
    EmpiricalCdf(data.x),
  };

  const std::size_t n = data.size();
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = out.covariate_cdf(data.x[i]);
  }
  auto adjust = [&](const MarginalStage& stage, const std::vector<double>& y) {
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double resp[1] = {stage.response_cdf(y[i])};
      const double raw = ecbc_partial_v(stage.coeffs, resp, v[i]);
      const double snapped = std::ldexp(std::nearbyint(std::ldexp(raw, kAdjustBits)), -kAdjustBits);
      u[i] = std::clamp(snapped, kAdjustClamp, 1.0 - kAdjustClamp);
    }
    return u;
  };
  out.sample.columns = {adjust(out.stage1[0], data.y1), adjust(out.stage1[1], data.y2), std::move(v)};
  out.sample.roles = {ColumnRole::response1, ColumnRole::response2, ColumnRole::covariate};
  return out;
}

ConditionalCopulaFit fit_conditional_copula(const Dataset& data, const DegreeDraw& degrees)
{
  if (data.size() < 4) {
    throw ValidationError("conditional copula fit needs n >= 4, got n = " + std::to_string(data.size()));
  }
  degrees.joint.validate();
  if (degrees.g1 < 1 || degrees.g2 < 1 || degrees.m1 < 2 || degrees.m2 < 2) {
    throw ValidationError("stage-1 degrees need g >= 1 and m >= 2");
  }

  auto adjusted = covariate_adjust(data, degrees);
  const std::vector<int> degs{degrees.joint.l1, degrees.joint.l2, degrees.joint.m};
  auto stage2 = fit_ecbc(adjusted.sample, degs);
  return ConditionalCopulaFit{
    std::move(adjusted.stage1),
    std::move(adjusted.sample),
    std::move(stage2),
    degrees,
    std::move(adjusted.covariate_cdf),
  };
}

double cond_copula_derivative(const ConditionalCopulaFit& fit, double u1, double u2, double v)
{
  check_unit(u1, "u1");
  check_unit(u2, "u2");
  check_unit(v, "v");
  const double resp[2] = {u1, u2};
  return clamp_unit(ecbc_partial_v(fit.stage2, resp, v));
}

ConditionalMargin::ConditionalMargin(const ConditionalCopulaFit& fit, int axis, double v)
{
  check_axis(axis);
  check_unit(v, "v");
  const auto eta = ecbc_partial_v_coefficients(fit.stage2, v);
  const auto l1 = static_cast<std::size_t>(fit.stage2.degrees()[0]);
  const auto l2 = static_cast<std::size_t>(fit.stage2.degrees()[1]);
  if (axis == 1) {
    coeffs_.resize(l1 + 1);
    for (std::size_t h = 0; h <= l1; ++h) {
      coeffs_[h] = eta[h * (l2 + 1) + l2];
    }
  } else {
    coeffs_.resize(l2 + 1);
    for (std::size_t h = 0; h <= l2; ++h) {
      coeffs_[h] = eta[l1 * (l2 + 1) + h];
    }
  }
}

double ConditionalMargin::operator()(double u) const
{
  const auto basis = bernstein_basis(static_cast<int>(coeffs_.size()) - 1, u);
  double total = 0.0;
  for (std::size_t h = 0; h < basis.size(); ++h) {
    total += coeffs_[h] * basis[h];
  }
  return total;
}

double ConditionalMargin::inverse(double p, double tol) const
{
  check_unit(p, "probability");
  if (!(tol > 0.0)) {
    throw ValidationError("inversion tolerance must be positive");
  }
  if (p == 0.0) {
    return 0.0;
  }
  if (p == 1.0) {
    return 1.0;
  }

  double lo = 0.0;
  double hi = 1.0;
  double f_lo = (*this)(lo);
  double f_hi = (*this)(hi);
  for (int iter = 0; iter < kInversionMaxIter; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double f = (*this)(mid);
    if (f < f_lo - 1e-12 || f > f_hi + 1e-12) {
      throw InternalError("conditional margin is not monotone on the bisection bracket");
    }
    if (f < p) {
      lo = mid;
      f_lo = f;
    } else {
      hi = mid;
      f_hi = f;
    }
    if (hi - lo <= tol && std::abs(f_hi - p) <= tol) {
      break;
    }
  }
  return hi;
}

double cond_margin(const ConditionalCopulaFit& fit, int axis, double u, double v)
{
  check_unit(u, "u");
  return clamp_unit(ConditionalMargin(fit, axis, v)(u));
}

double invert_cond_margin(const ConditionalCopulaFit& fit, int axis, double p, double v, double tol)
{
  return ConditionalMargin(fit, axis, v).inverse(p, tol);
}

double conditional_copula_cdf(const ConditionalCopulaFit& fit, double u1, double u2, double v, double tol)
{
  check_unit(u1, "u1");
  check_unit(u2, "u2");
  check_unit(v, "v");
  const double x1 = ConditionalMargin(fit, 1, v).inverse(u1, tol);
  const double x2 = ConditionalMargin(fit, 2, v).inverse(u2, tol);
  const double resp[2] = {x1, x2};
  return clamp_unit(ecbc_partial_v(fit.stage2, resp, v));
}

double covariate_to_v(const ConditionalCopulaFit& fit, double x) { return fit.covariate_cdf(x); }

double conditional_copula_at_x(const ConditionalCopulaFit& fit, double u1, double u2, double x, double tol)
{
  return conditional_copula_cdf(fit, u1, u2, covariate_to_v(fit, x), tol);
}

std::vector<std::vector<double>> conditional_copula_grid(const ConditionalCopulaFit& fit,
                                                         std::span<const double> u1_grid,
                                                         std::span<const double> u2_grid, double v,
                                                         double tol)
{
  check_unit(v, "v");
  const ConditionalMargin f1(fit, 1, v);
  const ConditionalMargin f2(fit, 2, v);
  std::vector<double> x2(u2_grid.size());
  for (std::size_t j = 0; j < u2_grid.size(); ++j) {
    x2[j] = f2.inverse(u2_grid[j], tol);
  }
  std::vector<std::vector<double>> out(u1_grid.size(), std::vector<double>(u2_grid.size()));
  for (std::size_t i = 0; i < u1_grid.size(); ++i) {
    const double x1 = f1.inverse(u1_grid[i], tol);
    for (std::size_t j = 0; j < u2_grid.size(); ++j) {
      const double resp[2] = {x1, x2[j]};
      out[i][j] = clamp_unit(ecbc_partial_v(fit.stage2, resp, v));
    }
  }
  return out;
}

ConditionalCopulaEnsemble fit_conditional_copula(const Dataset& data, const DegreeConfig& config)
{
  data.validate();
  ConditionalCopulaEnsemble model;
  model.config = config;
  model.tie_groups = count_tie_groups(data.y1) + count_tie_groups(data.y2) + count_tie_groups(data.x);
  for (const auto& draw : select_degrees(data.size(), config)) {
    model.members.push_back(fit_conditional_copula(data, draw));
  }
  return model;
}

double conditional_copula_cdf(const ConditionalCopulaEnsemble& model, double u1, double u2, double v, double tol)
{
  double total = 0.0;
  for (const auto& fit : model.members) {
    total += conditional_copula_cdf(fit, u1, u2, v, tol);
  }
  return total / static_cast<double>(model.members.size());
}

double cond_copula_derivative(const ConditionalCopulaEnsemble& model, double u1, double u2, double v)
{
  double total = 0.0;
  for (const auto& fit : model.members) {
    total += cond_copula_derivative(fit, u1, u2, v);
  }
  return total / static_cast<double>(model.members.size());
}

} // namespace ecbc
