#pragma once

#include "ecbc/bernstein.hpp"
#include "ecbc/data.hpp"

#include <array>
#include <cstddef>
#include <vector>

namespace ecbc {

inline constexpr double kAdjustClamp = 1e-10;
// Adjusted values are rounded to multiples of 2^-kAdjustBits before ranking so
// that floating-point noise cannot split ties.
inline constexpr int kAdjustBits = 40;
inline constexpr double kInversionTol = 1e-10;
inline constexpr int kInversionMaxIter = 60;

//! Stage-1 sieve for one response: bivariate ECBC of (F_nY(y), F_nX(x)).
struct MarginalStage
{
  EcbcCoefficients coeffs;
  EmpiricalCdf response_cdf;
};

//! One complete two-stage fit for a single degree draw.
struct ConditionalCopulaFit
{
  std::array<MarginalStage, 2> stage1;
  PseudoSample adjusted; // (U1, U2, V) after covariate adjustment
  EcbcCoefficients stage2;
  DegreeDraw degrees;
  EmpiricalCdf covariate_cdf;
};

// F_j(y | x) = C_j^{#(1)}(F_nYj(y), F_nX(x)); j is 1 or 2.
double conditional_marginal_cdf(const ConditionalCopulaFit& fit, int j, double y, double x);

// Stage-1 fits plus the covariate-adjusted pseudo-sample (U1, U2, V), with
// U clamped into [kAdjustClamp, 1 - kAdjustClamp].
struct AdjustedSample
{
  std::array<MarginalStage, 2> stage1;
  PseudoSample sample;
  EmpiricalCdf covariate_cdf;
};
AdjustedSample covariate_adjust(const Dataset& data, const DegreeDraw& degrees);

// Requires n >= 4. The trivariate stage ranks (U1, U2, V) afresh.
ConditionalCopulaFit fit_conditional_copula(const Dataset& data, const DegreeDraw& degrees);

// C^{#(1)}(u1, u2 | v)
double cond_copula_derivative(const ConditionalCopulaFit& fit, double u1, double u2, double v);

// F_1(u | v) = C^{#(1)}(u, 1 | v) for axis 1, F_2(u | v) = C^{#(1)}(1, u | v) for axis 2.
double cond_margin(const ConditionalCopulaFit& fit, int axis, double u, double v);

//! The conditional margins at fixed v as 1-D Bernstein polynomials, for
//! repeated evaluation and inversion.
class ConditionalMargin
{
public:
  ConditionalMargin(const ConditionalCopulaFit& fit, int axis, double v);

  double operator()(double u) const;

  // Smallest-bracket bisection root of F(u) = p on [0, 1].
  double inverse(double p, double tol = kInversionTol) const;

  const std::vector<double>& coefficients() const { return coeffs_; }

private:
  std::vector<double> coeffs_; // eta row / column along this axis
};

double invert_cond_margin(const ConditionalCopulaFit& fit, int axis, double p, double v,
                          double tol = kInversionTol);

// C^#(u1, u2 | v) = C^{#(1)}(F_1^{-1}(u1|v), F_2^{-1}(u2|v) | v)
double conditional_copula_cdf(const ConditionalCopulaFit& fit, double u1, double u2, double v,
                              double tol = kInversionTol);

// v = F_nX(x) from the stored covariate sample.
double covariate_to_v(const ConditionalCopulaFit& fit, double x);

double conditional_copula_at_x(const ConditionalCopulaFit& fit, double u1, double u2, double x,
                               double tol = kInversionTol);

//! Normalized conditional copula on a u1 x u2 grid at one v, reusing the
//! 2 * grid-size margin inversions.
std::vector<std::vector<double>> conditional_copula_grid(const ConditionalCopulaFit& fit,
                                                         std::span<const double> u1_grid,
                                                         std::span<const double> u2_grid, double v,
                                                         double tol = kInversionTol);

//! Average over degree draws: one member for fixed / plugin degrees, `draws`
//! members under the prior-sample policy.
struct ConditionalCopulaEnsemble
{
  std::vector<ConditionalCopulaFit> members;
  DegreeConfig config;
  std::size_t tie_groups = 0;

  std::size_t sample_size() const { return members.front().covariate_cdf.size(); }
  const EmpiricalCdf& covariate_cdf() const { return members.front().covariate_cdf; }
};

ConditionalCopulaEnsemble fit_conditional_copula(const Dataset& data, const DegreeConfig& config);

double conditional_copula_cdf(const ConditionalCopulaEnsemble& model, double u1, double u2, double v,
                              double tol = kInversionTol);
double cond_copula_derivative(const ConditionalCopulaEnsemble& model, double u1, double u2, double v);

} // namespace ecbc
