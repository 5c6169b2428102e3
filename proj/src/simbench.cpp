#include "ecbc/simbench.hpp"

#include "ecbc/conditional.hpp"
#include "ecbc/depmeasures.hpp"
#include "ecbc/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>

namespace ecbc {

namespace {

double open_uniform(std::mt19937_64& rng)
{
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u = 0.0;
  do {
    u = unif(rng);
  } while (u <= 0.0 || u >= 1.0);
  return u;
}

// Linear interpolation between order statistics (R type 7).
double percentile(std::vector<double> values, double p)
{
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double trapezoid(std::span<const double> x, std::span<const double> y)
{
  double total = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    total += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  }
  return total;
}

} // namespace

void SimModel::validate() const
{
  if (n < 10) {
    throw ValidationError("simulation sample size must be >= 10");
  }
  if (replicates < 1) {
    throw ValidationError("simulation needs at least one replicate");
  }
  if (!(x_hi > x_lo)) {
    throw ValidationError("covariate range must have x_hi > x_lo");
  }
  degrees.validate();
  for (std::size_t i = 0; i < v_grid.size(); ++i) {
    if (!(v_grid[i] > 0.0 && v_grid[i] < 1.0) || (i > 0 && !(v_grid[i] > v_grid[i - 1]))) {
      throw ValidationError("v grid must be strictly increasing within (0,1)");
    }
  }
}

double SimModel::theta(double x) const
{
  switch (link) {
    case LinkModel::model_a:
      return std::exp(0.8 * x - 2.0);
    case LinkModel::model_b:
      return std::exp(2.0 - 0.3 * (x - model_b_center) * (x - model_b_center));
  }
  return 0.0;
}

std::string SimModel::label() const
{
  if (link == LinkModel::model_a) {
    return "clayton theta(x)=exp(0.8x-2)";
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "clayton theta(x)=exp(2-0.3(x-%g)^2)", model_b_center);
  return buf;
}

std::vector<double> default_v_grid()
{
  std::vector<double> grid(21);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid[i] = 0.025 + 0.95 * static_cast<double>(i) / 20.0;
  }
  return grid;
}

std::pair<double, double> sample_clayton_pair(double theta, std::mt19937_64& rng)
{
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw ValidationError("Clayton parameter must be positive and finite");
  }
  const double u1 = open_uniform(rng);
  const double t = open_uniform(rng);
  // u2 = (u1^-theta (t^(-theta/(1+theta)) - 1) + 1)^(-1/theta), in log form
  const double a = std::exp(-theta * std::log(u1)) * std::expm1(-theta / (1.0 + theta) * std::log(t));
  const double u2 = std::exp(-std::log1p(a) / theta);
  return {u1, std::clamp(u2, std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0))};
}

double true_clayton_tau(double theta)
{
  if (!(theta > 0.0)) {
    throw ValidationError("Clayton parameter must be positive");
  }
  return theta / (theta + 2.0);
}

std::mt19937_64 replicate_stream(std::uint64_t seed, std::uint64_t replicate)
{
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(replicate), static_cast<std::uint32_t>(replicate >> 32),
                    0x5eedu};
  return std::mt19937_64(seq);
}

Dataset simulate_dataset(const SimModel& model, std::mt19937_64& rng)
{
  Dataset data;
  data.y1.resize(model.n);
  data.y2.resize(model.n);
  data.x.resize(model.n);
  for (std::size_t i = 0; i < model.n; ++i) {
    const double x = model.x_lo + (model.x_hi - model.x_lo) * open_uniform(rng);
    const auto [u1, u2] = sample_clayton_pair(model.theta(x), rng);
    data.x[i] = x;
    data.y1[i] = u1;
    data.y2[i] = u2;
  }
  return data;
}

std::vector<double> true_tau_curve(const SimModel& model, std::span<const double> v_grid)
{
  std::vector<double> out;
  out.reserve(v_grid.size());
  for (double v : v_grid) {
    out.push_back(true_clayton_tau(model.theta(model.x_lo + v * (model.x_hi - model.x_lo))));
  }
  return out;
}

ReplicateSet simulate_replicates(const SimModel& model, unsigned workers)
{
  model.validate();
  const auto grid = model.v_grid.empty() ? default_v_grid() : model.v_grid;
  const std::size_t total = model.replicates;

  std::vector<std::vector<double>> rows(total);
  std::vector<std::string> errors(total);
  std::vector<char> ok(total, 0);

  auto run_one = [&](std::size_t r) {
    try {
      auto rng = replicate_stream(model.seed, r);
      const auto data = simulate_dataset(model, rng);
      auto config = model.degrees;
      config.seed = model.seed ^ (0x9e3779b97f4a7c15ULL * (r + 1));
      const auto fit = fit_conditional_copula(data, config);
      std::vector<double> taus;
      taus.reserve(grid.size());
      for (double v : grid) {
        taus.push_back(kendall_tau(fit, v));
      }
      rows[r] = std::move(taus);
      ok[r] = 1;
    } catch (const std::exception& e) {
      errors[r] = e.what();
    }
  };

  if (workers == 0) {
    workers = std::max(1u, std::thread::hardware_concurrency());
  }
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, total));
  if (workers <= 1) {
    for (std::size_t r = 0; r < total; ++r) {
      run_one(r);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t r = next++; r < total; r = next++) {
          run_one(r);
        }
      });
    }
    for (auto& t : pool) {
      t.join();
    }
  }

  ReplicateSet out;
  out.v_grid = grid;
  for (std::size_t r = 0; r < total; ++r) {
    if (ok[r]) {
      out.tau.push_back(std::move(rows[r]));
      out.replicate_index.push_back(r);
    } else {
      out.failures.emplace_back(r, errors[r]);
    }
  }
  return out;
}

BenchResult performance_metrics(const ReplicateSet& replicates, std::span<const double> truth, double range_length)
{
  const std::size_t g = replicates.v_grid.size();
  if (truth.size() != g) {
    throw ValidationError("truth curve length does not match the v grid");
  }
  if (replicates.tau.empty()) {
    throw ValidationError("no successful replicates to summarize");
  }
  for (const auto& row : replicates.tau) {
    if (row.size() != g) {
      throw ValidationError("replicate row length does not match the v grid");
    }
  }
  if (!(range_length > 0.0)) {
    throw ValidationError("covariate range length must be positive");
  }

  const double count = static_cast<double>(replicates.tau.size());
  BenchResult out;
  out.v_grid = replicates.v_grid;
  out.truth.assign(truth.begin(), truth.end());
  out.mean.assign(g, 0.0);
  out.p05.resize(g);
  out.p95.resize(g);
  std::vector<double> bias2(g), var(g), mse(g);
  for (std::size_t k = 0; k < g; ++k) {
    std::vector<double> column;
    column.reserve(replicates.tau.size());
    for (const auto& row : replicates.tau) {
      column.push_back(row[k]);
    }
    // shifted sum, exact when all replicates agree
    double shifted = 0.0;
    for (double t : column) {
      shifted += t - column.front();
    }
    const double mean = column.front() + shifted / count;
    double ss = 0.0;
    double se = 0.0;
    for (double t : column) {
      ss += (t - mean) * (t - mean);
      se += (t - truth[k]) * (t - truth[k]);
    }
    out.mean[k] = mean;
    bias2[k] = (mean - truth[k]) * (mean - truth[k]);
    var[k] = ss / count;
    mse[k] = se / count;
    out.p05[k] = percentile(column, 0.05);
    out.p95[k] = percentile(column, 0.95);
  }
  out.ibias2 = range_length * trapezoid(out.v_grid, bias2);
  out.ivar = range_length * trapezoid(out.v_grid, var);
  out.imse = range_length * trapezoid(out.v_grid, mse);
  return out;
}

} // namespace ecbc
