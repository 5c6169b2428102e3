#include "ecbc/conditional.hpp"
#include "ecbc/errors.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace ecbc;

namespace {

const double kInteriorV[] = {0.1, 0.25, 0.5, 0.75, 0.9};

std::vector<double> unit_grid(int points)
{
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i) {
    g[i] = (i + 1.0) / (points + 1.0);
  }
  return g;
}

// Kolmogorov distance of a sample from Unif(0,1).
double ks_uniform(std::vector<double> x)
{
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    d = std::max({d, (i + 1.0) / n - x[i], x[i] - i / n});
  }
  return d;
}

} // namespace

TEST_CASE("fit shape and determinism")
{
  const Dataset toy{{0.3, 1.2, 0.7, 2.0}, {5.0, 4.0, 6.5, 7.0}, {1.0, 2.0, 3.0, 4.0}};
  const auto draw = select_degrees(4, DegreeConfig{})[0];
  const auto a = fit_conditional_copula(toy, draw);
  const auto b = fit_conditional_copula(toy, draw);
  CHECK(a.stage2.degrees() == std::vector<int>{3, 3, 4});
  CHECK(a.stage2.theta().size() == 4u * 4u * 5u);
  CHECK(a.stage2.theta() == b.stage2.theta());
  CHECK(a.stage1[0].coeffs.theta() == b.stage1[0].coeffs.theta());

  const Dataset three{{0.3, 1.2, 0.7}, {5.0, 4.0, 6.5}, {1.0, 2.0, 3.0}};
  CHECK_THROWS_AS(fit_conditional_copula(three, draw), ValidationError);

  const Dataset constant{{0.3, 1.2, 0.7, 2.0}, {5.0, 4.0, 6.5, 7.0}, {1.0, 1.0, 1.0, 1.0}};
  CHECK_THROWS_AS(fit_conditional_copula(constant, draw), ValidationError);
}

TEST_CASE("ensemble fits are deterministic")
{
  const auto data = oracle::clayton_dataset(80, 3);
  DegreeConfig config;
  config.policy = DegreePolicy::prior_sample;
  config.draws = 4;
  config.seed = 17;
  const auto a = fit_conditional_copula(data, config);
  const auto b = fit_conditional_copula(data, config);
  REQUIRE(a.members.size() == 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(a.members[i].stage2.theta() == b.members[i].stage2.theta());
    CHECK(a.members[i].degrees == b.members[i].degrees);
  }
  CHECK(conditional_copula_cdf(a, 0.3, 0.6, 0.5) == conditional_copula_cdf(b, 0.3, 0.6, 0.5));
}

TEST_CASE("conditional marginal CDF is monotone in y")
{
  const auto data = oracle::clayton_dataset(50, 8);
  const auto fit = oracle::random_fit(50, 8);
  const auto [ymin, ymax] = std::minmax_element(data.y1.begin(), data.y1.end());
  for (double x : {0.2, 0.9, 1.5, 2.2, 2.8}) {
    for (int j : {1, 2}) {
      double prev = -1.0;
      for (int k = 0; k <= 100; ++k) {
        const double y = *ymin - 0.05 + (*ymax - *ymin + 0.1) * k / 100.0;
        const double f = conditional_marginal_cdf(fit, j, y, x);
        CHECK(f >= prev - 1e-12);
        CHECK(f >= 0.0);
        CHECK(f <= 1.0 + 1e-12);
        prev = f;
      }
    }
    CHECK(conditional_marginal_cdf(fit, 1, *ymin - 1.0, x) == 0.0);
  }
}

TEST_CASE("adjusted pseudo-observations are strictly inside the unit interval")
{
  const auto data = oracle::clayton_dataset(60, 12);
  const auto adj = covariate_adjust(data, select_degrees(60, DegreeConfig{})[0]);
  REQUIRE(adj.sample.columns.size() == 3u);
  for (std::size_t j = 0; j < 2; ++j) {
    for (double u : adj.sample.columns[j]) {
      CHECK(u >= kAdjustClamp);
      CHECK(u <= 1.0 - kAdjustClamp);
    }
  }
}

TEST_CASE("covariate adjustment gives roughly uniform margins")
{
  const std::size_t n = 200;
  const auto draw = select_degrees(n, DegreeConfig{})[0];
  const double bound = 1.36 / std::sqrt(static_cast<double>(n)) * 1.5;
  int good[2] = {0, 0};
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    SimModel model;
    model.x_lo = 0.0;
    model.x_hi = 3.0;
    model.n = n;
    auto rng = replicate_stream(1000 + seed, 0);
    const auto adj = covariate_adjust(simulate_dataset(model, rng), draw);
    for (int j = 0; j < 2; ++j) {
      if (ks_uniform(adj.sample.columns[j]) <= bound) {
        ++good[j];
      }
    }
  }
  CHECK(good[0] >= 90);
  CHECK(good[1] >= 90);
}

TEST_CASE("conditional margins and their inverses")
{
  const auto fit = oracle::random_fit(120, 4);
  for (double v : {0.1, 0.5, 0.9}) {
    for (int axis : {1, 2}) {
      CHECK(cond_margin(fit, axis, 0.0, v) == 0.0);
      CHECK(cond_margin(fit, axis, 1.0, v) == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(invert_cond_margin(fit, axis, 0.0, v) == 0.0);
      CHECK(invert_cond_margin(fit, axis, 1.0, v) == 1.0);

      const ConditionalMargin margin(fit, axis, v);
      double prev = 0.0;
      for (int k = 0; k <= 200; ++k) {
        const double f = margin(k / 200.0);
        CHECK(f >= prev - 1e-12);
        prev = f;
      }
      for (int k = 1; k <= 99; ++k) {
        const double p = k / 100.0;
        const double u = margin.inverse(p);
        CHECK(std::abs(margin(u) - p) <= 1e-9);
        CHECK(std::abs(cond_margin(fit, axis, u, v) - p) <= 1e-9);
      }
    }
  }
  CHECK_THROWS_AS(invert_cond_margin(fit, 1, 0.5, 0.5, 0.0), ValidationError);
}

TEST_CASE("product fit is the independence copula")
{
  const auto fit = oracle::product_fit(6, 7, 8);
  for (double v : {0.0, 0.3, 0.8}) {
    for (double p : {0.05, 0.4, 0.95}) {
      CHECK(cond_margin(fit, 1, p, v) == doctest::Approx(p).epsilon(1e-13));
      CHECK(invert_cond_margin(fit, 2, p, v) == doctest::Approx(p).epsilon(1e-9));
      CHECK(cond_copula_derivative(fit, p, 0.5, v) == doctest::Approx(0.5 * p).epsilon(1e-13));
      CHECK(conditional_copula_cdf(fit, p, 0.5, v) == doctest::Approx(0.5 * p).epsilon(1e-9));
    }
  }
}

TEST_CASE("normalized conditional copula is a genuine copula")
{
  const auto u = unit_grid(15);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto fit = oracle::random_fit(seed % 2 ? 80 : 200, 500 + seed);
    for (double v : kInteriorV) {
      const auto grid = conditional_copula_grid(fit, u, u, v);
      for (std::size_t i = 0; i < u.size(); ++i) {
        CHECK(std::abs(conditional_copula_cdf(fit, u[i], 1.0, v) - u[i]) <= 1e-8);
        CHECK(std::abs(conditional_copula_cdf(fit, 1.0, u[i], v) - u[i]) <= 1e-8);
        CHECK(std::abs(conditional_copula_cdf(fit, 0.0, u[i], v)) <= 1e-8);
        for (std::size_t j = 0; j < u.size(); ++j) {
          const double c = grid[i][j];
          CHECK(c >= std::max(u[i] + u[j] - 1.0, 0.0) - 1e-8);
          CHECK(c <= std::min(u[i], u[j]) + 1e-8);
          if (i > 0 && j > 0) {
            CHECK(c - grid[i - 1][j] - grid[i][j - 1] + grid[i - 1][j - 1] >= -1e-10);
          }
        }
      }
    }
  }
}

TEST_CASE("grid evaluation matches pointwise evaluation")
{
  const auto fit = oracle::random_fit(100, 31);
  const std::vector<double> u1{0.1, 0.5, 0.9};
  const std::vector<double> u2{0.2, 0.7};
  const auto grid = conditional_copula_grid(fit, u1, u2, 0.4);
  for (std::size_t i = 0; i < u1.size(); ++i) {
    for (std::size_t j = 0; j < u2.size(); ++j) {
      CHECK(grid[i][j] == conditional_copula_cdf(fit, u1[i], u2[j], 0.4));
    }
  }
}

TEST_CASE("covariate mapping")
{
  const auto data = oracle::clayton_dataset(101, 6);
  const auto fit = oracle::random_fit(101, 6);
  auto sorted = data.x;
  std::sort(sorted.begin(), sorted.end());
  CHECK(covariate_to_v(fit, sorted.front() - 1.0) == 0.0);
  CHECK(covariate_to_v(fit, sorted[50]) == doctest::Approx(51.0 / 102.0));
  CHECK(covariate_to_v(fit, sorted.back() + 1.0) == doctest::Approx(101.0 / 102.0));
  CHECK(conditional_copula_at_x(fit, 0.3, 0.4, sorted[50]) ==
        conditional_copula_cdf(fit, 0.3, 0.4, covariate_to_v(fit, sorted[50])));
}

TEST_CASE("argument checks")
{
  const auto fit = oracle::random_fit(40, 2);
  CHECK_THROWS_AS(cond_copula_derivative(fit, 1.5, 0.5, 0.5), ValidationError);
  CHECK_THROWS_AS(cond_margin(fit, 3, 0.5, 0.5), ValidationError);
  CHECK_THROWS_AS(conditional_copula_cdf(fit, 0.5, 0.5, -0.1), ValidationError);
}

TEST_CASE("replicate-mean copula surface is close to the Clayton truth")
{
  // model A on (0,3), n = 200, 100 replicates, 15 x 15 grid
  SimModel model;
  model.x_lo = 0.0;
  model.x_hi = 3.0;
  const auto draw = select_degrees(model.n, DegreeConfig{})[0];
  std::vector<double> grid(15);
  for (int i = 0; i < 15; ++i) {
    grid[i] = (i + 1.0) / 16.0;
  }
  const double xs[] = {0.5, 1.0, 1.5, 2.0};
  std::vector<std::vector<double>> mean(4, std::vector<double>(225, 0.0));
  const int replicates = 100;
  for (int r = 0; r < replicates; ++r) {
    auto rng = replicate_stream(77, r);
    const auto fit = fit_conditional_copula(simulate_dataset(model, rng), draw);
    for (int k = 0; k < 4; ++k) {
      const auto c = conditional_copula_grid(fit, grid, grid, xs[k] / 3.0);
      for (int i = 0; i < 15; ++i) {
        for (int j = 0; j < 15; ++j) {
          mean[k][i * 15 + j] += c[i][j] / replicates;
        }
      }
    }
  }
  for (int k = 0; k < 4; ++k) {
    const double theta = model.theta(xs[k]);
    double worst = 0.0;
    for (int i = 0; i < 15; ++i) {
      for (int j = 0; j < 15; ++j) {
        const double truth =
          std::pow(std::pow(grid[i], -theta) + std::pow(grid[j], -theta) - 1.0, -1.0 / theta);
        worst = std::max(worst, std::abs(mean[k][i * 15 + j] - truth));
      }
    }
    CAPTURE(xs[k]);
    CHECK(worst <= 0.03);
  }
}
