#pragma once

#include "ecbc/bernstein.hpp"
#include "ecbc/data.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ecbc {

//! Covariate link for the Clayton parameter.
//!   model_a: theta(x) = exp(0.8 x - 2)
//!   model_b: theta(x) = exp(2 - 0.3 (x - center)^2)
enum class LinkModel
{
  model_a,
  model_b
};

struct SimModel
{
  LinkModel link = LinkModel::model_a;
  double model_b_center = 4.0;
  double x_lo = 2.0;
  double x_hi = 5.0;
  std::size_t n = 200;
  std::size_t replicates = 100;
  std::uint64_t seed = 1;
  DegreeConfig degrees;
  std::vector<double> v_grid; // empty means default_v_grid()

  void validate() const;
  double theta(double x) const;
  std::string label() const;
};

// 21 equally spaced points on [0.025, 0.975].
std::vector<double> default_v_grid();

// Conditional inversion sampler; theta > 0.
std::pair<double, double> sample_clayton_pair(double theta, std::mt19937_64& rng);

double true_clayton_tau(double theta);

// Stream for replicate r of a seeded run, independent of execution order.
std::mt19937_64 replicate_stream(std::uint64_t seed, std::uint64_t replicate);

// X ~ Unif(x_lo, x_hi), (U1, U2) | X ~ Clayton(theta(X)).
Dataset simulate_dataset(const SimModel& model, std::mt19937_64& rng);

// tau(v) = theta-to-tau at the exact uniform covariate quantile x_lo + v (x_hi - x_lo).
std::vector<double> true_tau_curve(const SimModel& model, std::span<const double> v_grid);

struct ReplicateSet
{
  std::vector<double> v_grid;
  std::vector<std::vector<double>> tau; // successful replicates only, in replicate order
  std::vector<std::size_t> replicate_index;
  std::vector<std::pair<std::size_t, std::string>> failures;
};

// workers = 0 uses the hardware concurrency. Results do not depend on the
// worker count.
ReplicateSet simulate_replicates(const SimModel& model, unsigned workers = 0);

struct BenchResult
{
  double ibias2 = 0.0;
  double ivar = 0.0;
  double imse = 0.0;
  std::vector<double> v_grid;
  std::vector<double> truth;
  std::vector<double> mean;
  std::vector<double> p05;
  std::vector<double> p95;
};

// Trapezoid-rule integrals over the v grid, scaled by the covariate range
// length. Variance uses the 1/N normalization so imse = ibias2 + ivar.
BenchResult performance_metrics(const ReplicateSet& replicates, std::span<const double> truth, double range_length);

} // namespace ecbc
