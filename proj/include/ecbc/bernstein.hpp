#pragma once

#include "ecbc/checkerboard.hpp"
#include "ecbc/data.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace ecbc {

// log C(n, k) via log-gamma.
double log_binomial(int n, int k);

// C(l,h) u^h (1-u)^(l-h), with 0^0 = 1 at the endpoints.
double bernstein_pmf(int l, int h, double u);

// All l + 1 values of bernstein_pmf(l, ., u).
std::vector<double> bernstein_basis(int l, double u);

//! Degrees of one trivariate sieve: l1, l2 on the response axes, m on the
//! covariate axis.
struct Degrees
{
  int l1 = 1;
  int l2 = 1;
  int m = 2;

  void validate() const;
  friend bool operator==(const Degrees&, const Degrees&) = default;
};

enum class DegreePolicy
{
  fixed,
  plugin,
  prior_sample
};

struct DegreeConfig
{
  DegreePolicy policy = DegreePolicy::plugin;
  Degrees degrees;    // used by the fixed policy
  int draws = 25;     // used by the prior_sample policy
  std::uint64_t seed = 0;

  void validate() const;
};

//! Degrees for one complete two-stage fit. Stage 1 uses (g_j, m_j) for the
//! bivariate (response j, covariate) sieve; stage 2 uses the trivariate triple.
struct DegreeDraw
{
  int g1 = 1;
  int m1 = 2;
  int g2 = 1;
  int m2 = 2;
  Degrees joint;

  friend bool operator==(const DegreeDraw&, const DegreeDraw&) = default;
};

// l_j = round(sqrt(n)) + 1, m = round(sqrt(n)) + 2.
Degrees plugin_degrees(std::size_t n);

// fixed / plugin give a single draw with both stages sharing the triple.
// prior_sample gives `draws` draws from the shifted Poisson hierarchy
//   l | a ~ Poisson(n^a) + 1, m | a ~ Poisson(n^a) + 2, a ~ Unif(1/3, 2/3),
// every degree drawn independently, draw b using its own seed-derived stream.
std::vector<DegreeDraw> select_degrees(std::size_t n, const DegreeConfig& config);

//! Grid tensor of checkerboard evaluations theta[h_1, ..., h_d] =
//! C_n^#(h_1/deg_1, ..., h_d/deg_d), row-major, covariate axis last.
class EcbcCoefficients
{
public:
  EcbcCoefficients() = default;
  EcbcCoefficients(std::vector<int> degrees, std::vector<double> theta);

  // Coefficients of the independence copula, (h_1/deg_1) * ... * (h_d/deg_d).
  static EcbcCoefficients product(std::vector<int> degrees);

  std::size_t dim() const { return degrees_.size(); }
  const std::vector<int>& degrees() const { return degrees_; }
  const std::vector<double>& theta() const { return theta_; }
  int covariate_degree() const { return degrees_.back(); }

  double at(int h, int k) const { return theta_[static_cast<std::size_t>(h) * stride0_ + k]; }
  double at(int h1, int h2, int k) const
  {
    return theta_[static_cast<std::size_t>(h1) * stride0_ + static_cast<std::size_t>(h2) * stride1_ + k];
  }

private:
  std::vector<int> degrees_;
  std::vector<double> theta_;
  std::size_t stride0_ = 0;
  std::size_t stride1_ = 0;
};

// degrees.size() must equal fit.dim().
EcbcCoefficients fit_ecbc(const CheckerboardFit& fit, std::span<const int> degrees);
EcbcCoefficients fit_ecbc(const PseudoSample& pseudo, std::span<const int> degrees);

// Bernstein smoothing of the coefficient grid at u (full point, covariate last).
double ecbc_cdf(const EcbcCoefficients& coeffs, std::span<const double> u);

// Derivative of ecbc_cdf in the covariate coordinate. `responses` holds the
// d - 1 response coordinates.
double ecbc_partial_v(const EcbcCoefficients& coeffs, std::span<const double> responses, double v);

// Bernstein coefficients of the covariate derivative at fixed v over the
// response grid, m * sum_k (theta[.., k+1] - theta[.., k]) P_{m-1,k}(v),
// row-major over the response axes.
std::vector<double> ecbc_partial_v_coefficients(const EcbcCoefficients& coeffs, double v);

} // namespace ecbc
