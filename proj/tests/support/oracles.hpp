#pragma once

// Reference computations used only by the tests. Each one takes a different
// route from the library code it checks: direct summation instead of tensor
// contraction, quadruple sums instead of the trace form, quadrature of the
// integral definitions instead of the Beta-weight closed form.

#include "ecbc/conditional.hpp"
#include "ecbc/depmeasures.hpp"
#include "ecbc/quadrature.hpp"
#include "ecbc/simbench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace ecbc::oracle {

// Binomial coefficient by the multiplicative formula in long double.
inline long double binomial(int n, int k)
{
  if (k < 0 || k > n) {
    return 0.0L;
  }
  long double c = 1.0L;
  for (int i = 1; i <= k; ++i) {
    c = c * static_cast<long double>(n - k + i) / static_cast<long double>(i);
  }
  return c;
}

// C(l,h) u^h (1-u)^(l-h) with std::pow, 0 outside 0..l.
inline double pmf(int l, int h, double u)
{
  if (h < 0 || h > l) {
    return 0.0;
  }
  return static_cast<double>(binomial(l, h) * std::pow(static_cast<long double>(u), h) *
                             std::pow(static_cast<long double>(1.0 - u), l - h));
}

// d/du P_{l,h}(u) = l (P_{l-1,h-1}(u) - P_{l-1,h}(u))
inline double pmf_derivative(int l, int h, double u)
{
  return l * (pmf(l - 1, h - 1, u) - pmf(l - 1, h, u));
}

// Naive sum over the whole coefficient grid.
inline double ecbc_cdf(const EcbcCoefficients& c, const std::vector<double>& u)
{
  const auto& d = c.degrees();
  double total = 0.0;
  if (d.size() == 2) {
    for (int h = 0; h <= d[0]; ++h) {
      for (int k = 0; k <= d[1]; ++k) {
        total += c.at(h, k) * pmf(d[0], h, u[0]) * pmf(d[1], k, u[1]);
      }
    }
    return total;
  }
  for (int h1 = 0; h1 <= d[0]; ++h1) {
    for (int h2 = 0; h2 <= d[1]; ++h2) {
      for (int k = 0; k <= d[2]; ++k) {
        total += c.at(h1, h2, k) * pmf(d[0], h1, u[0]) * pmf(d[1], h2, u[1]) * pmf(d[2], k, u[2]);
      }
    }
  }
  return total;
}

inline double central_difference_v(const EcbcCoefficients& c, std::vector<double> u, double eps = 1e-5)
{
  auto plus = u;
  auto minus = u;
  plus.back() += eps;
  minus.back() -= eps;
  return (ecbc::ecbc_cdf(c, plus) - ecbc::ecbc_cdf(c, minus)) / (2.0 * eps);
}

// Closed forms as quadruple sums with h from 0 and explicit Beta functions.
inline double beta_weight(int l, int h, int g)
{
  const double beta = std::exp(std::lgamma(h + g + 1.0) + std::lgamma(2.0 * l - h - g) - std::lgamma(2.0 * l + 1.0));
  return static_cast<double>(l * binomial(l, h) * binomial(l - 1, g)) * beta;
}

inline double kendall_quadruple_sum(const Eigen::MatrixXd& eta)
{
  const int l1 = static_cast<int>(eta.rows()) - 1;
  const int l2 = static_cast<int>(eta.cols()) - 1;
  long double total = 0.0L;
  for (int h1 = 0; h1 <= l1; ++h1) {
    for (int h2 = 0; h2 <= l2; ++h2) {
      for (int g1 = 0; g1 < l1; ++g1) {
        for (int g2 = 0; g2 < l2; ++g2) {
          const double d = eta(g1 + 1, g2 + 1) - eta(g1 + 1, g2) - eta(g1, g2 + 1) + eta(g1, g2);
          total += static_cast<long double>(eta(h1, h2)) * d * beta_weight(l1, h1, g1) * beta_weight(l2, h2, g2);
        }
      }
    }
  }
  return static_cast<double>(4.0L * total - 1.0L);
}

inline double spearman_quadruple_sum(const Eigen::MatrixXd& eta)
{
  const int l1 = static_cast<int>(eta.rows()) - 1;
  const int l2 = static_cast<int>(eta.cols()) - 1;
  long double total = 0.0L;
  for (int h1 = 0; h1 <= l1; ++h1) {
    for (int h2 = 0; h2 <= l2; ++h2) {
      const double r = eta(h1, h2) - eta(h1, l2) * eta(l1, h2);
      for (int g1 = 0; g1 < l1; ++g1) {
        for (int g2 = 0; g2 < l2; ++g2) {
          const double p = eta(g1 + 1, l2) - eta(g1, l2);
          const double q = eta(l1, g2 + 1) - eta(l1, g2);
          total += static_cast<long double>(r) * p * q * beta_weight(l1, h1, g1) * beta_weight(l2, h2, g2);
        }
      }
    }
  }
  return static_cast<double>(12.0L * total);
}

// Values and first derivatives of the Bernstein basis at quadrature nodes.
struct BasisTable
{
  std::vector<std::vector<double>> value; // [node][h]
  std::vector<std::vector<double>> slope;
};

inline BasisTable basis_table(int l, const std::vector<double>& nodes)
{
  BasisTable t;
  for (double x : nodes) {
    std::vector<double> v(l + 1), s(l + 1);
    for (int h = 0; h <= l; ++h) {
      v[h] = pmf(l, h, x);
      s[h] = pmf_derivative(l, h, x);
    }
    t.value.push_back(std::move(v));
    t.slope.push_back(std::move(s));
  }
  return t;
}

// 4 * integral of C c over the unit square minus 1, with C = sum eta P P and
// c its mixed second derivative.
inline double kendall_quadrature(const Eigen::MatrixXd& eta, int order = 64)
{
  const int l1 = static_cast<int>(eta.rows()) - 1;
  const int l2 = static_cast<int>(eta.cols()) - 1;
  const auto rule = gauss_legendre_unit(order);
  const auto b1 = basis_table(l1, rule.nodes);
  const auto b2 = basis_table(l2, rule.nodes);
  double total = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      double c = 0.0;
      double dens = 0.0;
      for (int h1 = 0; h1 <= l1; ++h1) {
        for (int h2 = 0; h2 <= l2; ++h2) {
          c += eta(h1, h2) * b1.value[i][h1] * b2.value[j][h2];
          dens += eta(h1, h2) * b1.slope[i][h1] * b2.slope[j][h2];
        }
      }
      total += rule.weights[i] * rule.weights[j] * c * dens;
    }
  }
  return 4.0 * total - 1.0;
}

// 12 * integral of (C - F1 F2) dF1 dF2.
inline double spearman_quadrature(const Eigen::MatrixXd& eta, int order = 64)
{
  const int l1 = static_cast<int>(eta.rows()) - 1;
  const int l2 = static_cast<int>(eta.cols()) - 1;
  const auto rule = gauss_legendre_unit(order);
  const auto b1 = basis_table(l1, rule.nodes);
  const auto b2 = basis_table(l2, rule.nodes);
  const std::size_t nn = rule.nodes.size();
  std::vector<double> f1(nn), d1(nn), f2(nn), d2(nn);
  for (std::size_t i = 0; i < nn; ++i) {
    for (int h = 0; h <= l1; ++h) {
      f1[i] += eta(h, l2) * b1.value[i][h];
      d1[i] += eta(h, l2) * b1.slope[i][h];
    }
    for (int h = 0; h <= l2; ++h) {
      f2[i] += eta(l1, h) * b2.value[i][h];
      d2[i] += eta(l1, h) * b2.slope[i][h];
    }
  }
  double total = 0.0;
  for (std::size_t i = 0; i < nn; ++i) {
    for (std::size_t j = 0; j < nn; ++j) {
      double c = 0.0;
      for (int h1 = 0; h1 <= l1; ++h1) {
        for (int h2 = 0; h2 <= l2; ++h2) {
          c += eta(h1, h2) * b1.value[i][h1] * b2.value[j][h2];
        }
      }
      total += rule.weights[i] * rule.weights[j] * (c - f1[i] * f2[j]) * d1[i] * d2[j];
    }
  }
  return 12.0 * total;
}

// Sample Kendall tau by merge-sort discordance counting (Knight), no ties.
inline double sample_kendall_tau(std::vector<std::pair<double, double>> pairs)
{
  std::sort(pairs.begin(), pairs.end());
  std::vector<double> y(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    y[i] = pairs[i].second;
  }
  std::vector<double> buf(y.size());
  std::uint64_t swaps = 0;
  for (std::size_t width = 1; width < y.size(); width *= 2) {
    for (std::size_t lo = 0; lo < y.size(); lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, y.size());
      const std::size_t hi = std::min(lo + 2 * width, y.size());
      std::size_t i = lo, j = mid, k = lo;
      while (i < mid && j < hi) {
        if (y[j] < y[i]) {
          swaps += mid - i;
          buf[k++] = y[j++];
        } else {
          buf[k++] = y[i++];
        }
      }
      while (i < mid) {
        buf[k++] = y[i++];
      }
      while (j < hi) {
        buf[k++] = y[j++];
      }
    }
    std::swap(y, buf);
  }
  const double n = static_cast<double>(pairs.size());
  const double total = n * (n - 1.0) / 2.0;
  return (total - 2.0 * static_cast<double>(swaps)) / total;
}

// Clayton data with covariate-dependent parameter exp(0.8 x - 2), x ~ Unif(0,3).
inline Dataset clayton_dataset(std::size_t n, std::uint64_t seed)
{
  SimModel model;
  model.x_lo = 0.0;
  model.x_hi = 3.0;
  model.n = n;
  auto rng = replicate_stream(seed, 0);
  return simulate_dataset(model, rng);
}

inline ConditionalCopulaFit random_fit(std::size_t n, std::uint64_t seed)
{
  const auto draw = select_degrees(n, DegreeConfig{})[0];
  return fit_conditional_copula(clayton_dataset(n, seed), draw);
}

// Independent (x unrelated to y) data for product-like fits.
inline Dataset uniform_dataset(std::size_t n, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Dataset d;
  for (std::size_t i = 0; i < n; ++i) {
    d.y1.push_back(unif(rng));
    d.y2.push_back(unif(rng));
    d.x.push_back(unif(rng));
  }
  return d;
}

// A fit whose stage-2 tensor is the independence copula; stage 1 likewise.
inline ConditionalCopulaFit product_fit(int l1, int l2, int m, std::size_t n = 20)
{
  ConditionalCopulaFit fit;
  fit.degrees = DegreeDraw{l1, m, l2, m, Degrees{l1, l2, m}};
  const auto data = uniform_dataset(n, 99);
  fit.stage1[0] = MarginalStage{EcbcCoefficients::product({l1, m}), EmpiricalCdf(data.y1)};
  fit.stage1[1] = MarginalStage{EcbcCoefficients::product({l2, m}), EmpiricalCdf(data.y2)};
  fit.stage2 = EcbcCoefficients::product({l1, l2, m});
  fit.covariate_cdf = EmpiricalCdf(data.x);
  fit.adjusted.columns = {pseudo_observations(data.y1), pseudo_observations(data.y2), pseudo_observations(data.x)};
  fit.adjusted.roles = {ColumnRole::response1, ColumnRole::response2, ColumnRole::covariate};
  return fit;
}

} // namespace ecbc::oracle
