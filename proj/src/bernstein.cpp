#include "ecbc/bernstein.hpp"

#include "ecbc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace ecbc {

namespace {

void check_unit(double u)
{
  if (!(u >= 0.0 && u <= 1.0)) {
    throw ValidationError("coordinate outside [0,1]");
  }
}

std::mt19937_64 stream_for(std::uint64_t seed, std::uint64_t index)
{
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

int draw_shifted_poisson(double n, int shift, std::mt19937_64& rng)
{
  std::uniform_real_distribution<double> alpha(1.0 / 3.0, 2.0 / 3.0);
  std::poisson_distribution<int> count(std::pow(n, alpha(rng)));
  return count(rng) + shift;
}

} // namespace

double log_binomial(int n, int k)
{
  if (k < 0 || k > n) {
    throw ValidationError("binomial index out of range");
  }
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double bernstein_pmf(int l, int h, double u)
{
  if (l < 0 || h < 0 || h > l) {
    throw ValidationError("Bernstein index h=" + std::to_string(h) + " outside 0.." + std::to_string(l));
  }
  check_unit(u);
  if (u == 0.0) {
    return h == 0 ? 1.0 : 0.0;
  }
  if (u == 1.0) {
    return h == l ? 1.0 : 0.0;
  }
  return std::exp(log_binomial(l, h) + h * std::log(u) + (l - h) * std::log1p(-u));
}

std::vector<double> bernstein_basis(int l, double u)
{
  if (l < 0) {
    throw ValidationError("negative Bernstein degree");
  }
  check_unit(u);
  std::vector<double> out(static_cast<std::size_t>(l) + 1, 0.0);
  if (u == 0.0) {
    out.front() = 1.0;
    return out;
  }
  if (u == 1.0) {
    out.back() = 1.0;
    return out;
  }
  const double log_u = std::log(u);
  const double log_1mu = std::log1p(-u);
  const double log_l_fact = std::lgamma(l + 1.0);
  for (int h = 0; h <= l; ++h) {
    out[static_cast<std::size_t>(h)] =
      std::exp(log_l_fact - std::lgamma(h + 1.0) - std::lgamma(l - h + 1.0) + h * log_u + (l - h) * log_1mu);
  }
  return out;
}

void Degrees::validate() const
{
  if (l1 < 1 || l2 < 1) {
    throw ValidationError("response degrees must be >= 1");
  }
  if (m < 2) {
    throw ValidationError("covariate degree must be >= 2");
  }
}

void DegreeConfig::validate() const
{
  if (policy == DegreePolicy::fixed) {
    degrees.validate();
  }
  if (draws < 1) {
    throw ValidationError("prior-sample draws must be >= 1");
  }
}

Degrees plugin_degrees(std::size_t n)
{
  const int root = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
  return Degrees{root + 1, root + 1, root + 2};
}

std::vector<DegreeDraw> select_degrees(std::size_t n, const DegreeConfig& config)
{
  if (n < 2) {
    throw ValidationError("degree selection needs n >= 2");
  }
  config.validate();
  auto single = [](const Degrees& d) {
    return std::vector<DegreeDraw>{DegreeDraw{d.l1, d.m, d.l2, d.m, d}};
  };
  switch (config.policy) {
    case DegreePolicy::fixed:
      return single(config.degrees);
    case DegreePolicy::plugin:
      return single(plugin_degrees(n));
    case DegreePolicy::prior_sample:
      break;
  }

  const double nd = static_cast<double>(n);
  std::vector<DegreeDraw> draws;
  draws.reserve(static_cast<std::size_t>(config.draws));
  for (int b = 0; b < config.draws; ++b) {
    auto rng = stream_for(config.seed, static_cast<std::uint64_t>(b));
    DegreeDraw d;
    d.joint.l1 = draw_shifted_poisson(nd, 1, rng);
    d.joint.l2 = draw_shifted_poisson(nd, 1, rng);
    d.joint.m = draw_shifted_poisson(nd, 2, rng);
    d.g1 = draw_shifted_poisson(nd, 1, rng);
    d.m1 = draw_shifted_poisson(nd, 2, rng);
    d.g2 = draw_shifted_poisson(nd, 1, rng);
    d.m2 = draw_shifted_poisson(nd, 2, rng);
    draws.push_back(d);
  }
  return draws;
}

EcbcCoefficients::EcbcCoefficients(std::vector<int> degrees, std::vector<double> theta)
  : degrees_(std::move(degrees))
  , theta_(std::move(theta))
{
  if (degrees_.size() != 2 && degrees_.size() != 3) {
    throw ValidationError("ECBC coefficients must be 2- or 3-dimensional");
  }
  std::size_t expected = 1;
  for (int deg : degrees_) {
    if (deg < 1) {
      throw ValidationError("ECBC degrees must be >= 1");
    }
    expected *= static_cast<std::size_t>(deg) + 1;
  }
  if (theta_.size() != expected) {
    throw ValidationError("coefficient tensor size does not match degrees");
  }
  if (degrees_.size() == 2) {
    stride0_ = static_cast<std::size_t>(degrees_[1]) + 1;
  } else {
    stride1_ = static_cast<std::size_t>(degrees_[2]) + 1;
    stride0_ = (static_cast<std::size_t>(degrees_[1]) + 1) * stride1_;
  }
}

EcbcCoefficients EcbcCoefficients::product(std::vector<int> degrees)
{
  std::size_t total = 1;
  for (int deg : degrees) {
    total *= static_cast<std::size_t>(std::max(deg, 0)) + 1;
  }
  std::vector<double> theta(total, 1.0);
  std::size_t inner = total;
  for (int deg : degrees) {
    const std::size_t len = static_cast<std::size_t>(deg) + 1;
    inner /= len;
    for (std::size_t idx = 0; idx < total; ++idx) {
      const auto h = (idx / inner) % len;
      theta[idx] *= static_cast<double>(h) / deg;
    }
  }
  return EcbcCoefficients(std::move(degrees), std::move(theta));
}

EcbcCoefficients fit_ecbc(const CheckerboardFit& fit, std::span<const int> degrees)
{
  const std::size_t d = fit.dim();
  if (degrees.size() != d) {
    throw ValidationError("degree count does not match checkerboard dimension");
  }
  for (int deg : degrees) {
    if (deg < 1) {
      throw ValidationError("ECBC degrees must be >= 1");
    }
  }

  std::vector<int> degs(degrees.begin(), degrees.end());
  std::size_t total = 1;
  for (int deg : degs) {
    total *= static_cast<std::size_t>(deg) + 1;
  }
  std::vector<double> theta(total);
  std::vector<double> u(d);
  std::vector<std::size_t> idx(d, 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (std::size_t j = d; j-- > 0;) {
      const std::size_t len = static_cast<std::size_t>(degs[j]) + 1;
      idx[j] = rem % len;
      rem /= len;
      u[j] = static_cast<double>(idx[j]) / degs[j];
    }
    theta[flat] = fit.cdf(u);
  }
  return EcbcCoefficients(std::move(degs), std::move(theta));
}

EcbcCoefficients fit_ecbc(const PseudoSample& pseudo, std::span<const int> degrees)
{
  if (pseudo.dim() != degrees.size()) {
    throw ValidationError("pseudo-sample dimension does not match degree count");
  }
  return fit_ecbc(CheckerboardFit::from_sample(pseudo.columns), degrees);
}

double ecbc_cdf(const EcbcCoefficients& coeffs, std::span<const double> u)
{
  const auto& degs = coeffs.degrees();
  if (u.size() != degs.size()) {
    throw ValidationError("point dimension does not match coefficient tensor");
  }
  std::vector<std::vector<double>> basis;
  basis.reserve(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    basis.push_back(bernstein_basis(degs[j], u[j]));
  }

  const auto& theta = coeffs.theta();
  double total = 0.0;
  if (degs.size() == 2) {
    const std::size_t len1 = basis[1].size();
    for (std::size_t h = 0; h < basis[0].size(); ++h) {
      if (basis[0][h] == 0.0) {
        continue;
      }
      double inner = 0.0;
      for (std::size_t k = 0; k < len1; ++k) {
        inner += theta[h * len1 + k] * basis[1][k];
      }
      total += basis[0][h] * inner;
    }
    return total;
  }

  const std::size_t len1 = basis[1].size();
  const std::size_t len2 = basis[2].size();
  for (std::size_t h1 = 0; h1 < basis[0].size(); ++h1) {
    if (basis[0][h1] == 0.0) {
      continue;
    }
    double mid = 0.0;
    for (std::size_t h2 = 0; h2 < len1; ++h2) {
      if (basis[1][h2] == 0.0) {
        continue;
      }
      const double* row = &theta[(h1 * len1 + h2) * len2];
      double inner = 0.0;
      for (std::size_t k = 0; k < len2; ++k) {
        inner += row[k] * basis[2][k];
      }
      mid += basis[1][h2] * inner;
    }
    total += basis[0][h1] * mid;
  }
  return total;
}

double ecbc_partial_v(const EcbcCoefficients& coeffs, std::span<const double> responses, double v)
{
  const auto& degs = coeffs.degrees();
  if (responses.size() + 1 != degs.size()) {
    throw ValidationError("response coordinate count does not match coefficient tensor");
  }
  const int m = degs.back();
  if (m < 2) {
    throw ValidationError("covariate degree must be >= 2 for the derivative");
  }
  std::vector<double> dv = bernstein_basis(m - 1, v);
  for (auto& w : dv) {
    w *= m;
  }
  const auto& theta = coeffs.theta();
  const std::size_t lenk = static_cast<std::size_t>(m) + 1;

  // sum over response grid of (first difference along k) * basis * m P_{m-1,k}(v)
  auto diff_row = [&](std::size_t row_offset) {
    const double* row = &theta[row_offset];
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < lenk; ++k) {
      acc += (row[k + 1] - row[k]) * dv[k];
    }
    return acc;
  };

  if (degs.size() == 2) {
    const auto b = bernstein_basis(degs[0], responses[0]);
    double total = 0.0;
    for (std::size_t h = 0; h < b.size(); ++h) {
      if (b[h] != 0.0) {
        total += b[h] * diff_row(h * lenk);
      }
    }
    return total;
  }

  const auto b1 = bernstein_basis(degs[0], responses[0]);
  const auto b2 = bernstein_basis(degs[1], responses[1]);
  double total = 0.0;
  for (std::size_t h1 = 0; h1 < b1.size(); ++h1) {
    if (b1[h1] == 0.0) {
      continue;
    }
    double mid = 0.0;
    for (std::size_t h2 = 0; h2 < b2.size(); ++h2) {
      if (b2[h2] != 0.0) {
        mid += b2[h2] * diff_row((h1 * b2.size() + h2) * lenk);
      }
    }
    total += b1[h1] * mid;
  }
  return total;
}

std::vector<double> ecbc_partial_v_coefficients(const EcbcCoefficients& coeffs, double v)
{
  const int m = coeffs.covariate_degree();
  if (m < 2) {
    throw ValidationError("covariate degree must be >= 2 for the derivative");
  }
  std::vector<double> dv = bernstein_basis(m - 1, v);
  const auto& theta = coeffs.theta();
  const std::size_t lenk = static_cast<std::size_t>(m) + 1;
  const std::size_t rows = theta.size() / lenk;
  std::vector<double> out(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = &theta[r * lenk];
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < lenk; ++k) {
      acc += (row[k + 1] - row[k]) * dv[k];
    }
    out[r] = m * acc;
  }
  return out;
}

} // namespace ecbc
