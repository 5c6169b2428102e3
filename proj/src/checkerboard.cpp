#include "ecbc/checkerboard.hpp"

#include "ecbc/data.hpp"
#include "ecbc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace ecbc {

CheckerboardFit::CheckerboardFit(std::vector<std::vector<double>> rank_columns)
{
  d_ = rank_columns.size();
  if (d_ != 2 && d_ != 3) {
    throw ValidationError("checkerboard copula supports d = 2 or 3, got d = " + std::to_string(d_));
  }
  n_ = rank_columns.front().size();
  if (n_ == 0) {
    throw ValidationError("checkerboard copula needs at least one observation");
  }
  for (const auto& col : rank_columns) {
    if (col.size() != n_) {
      throw ValidationError("rank columns have different lengths");
    }
  }

  ranks_.resize(n_ * d_);
  cell_lo_.resize(n_ * d_);
  cell_width_.resize(n_ * d_);
  const double n = static_cast<double>(n_);
  for (std::size_t j = 0; j < d_; ++j) {
    std::map<double, std::size_t> group_size;
    for (double r : rank_columns[j]) {
      if (!(r >= 1.0 && r <= n)) {
        throw ValidationError("rank outside [1, n] in column " + std::to_string(j));
      }
      ++group_size[r];
    }
    for (std::size_t i = 0; i < n_; ++i) {
      const double r = rank_columns[j][i];
      const double t = static_cast<double>(group_size[r]);
      const double lo = r - 0.5 * (t + 1.0);
      if (std::abs(lo - std::round(lo)) > 1e-9 || lo < -1e-9 || lo + t > n + 1e-9) {
        throw ValidationError("column " + std::to_string(j) + " is not a valid average-rank vector");
      }
      ranks_[i * d_ + j] = r;
      cell_lo_[i * d_ + j] = std::round(lo);
      cell_width_[i * d_ + j] = t;
    }
  }
}

CheckerboardFit CheckerboardFit::from_sample(const std::vector<std::vector<double>>& columns)
{
  std::vector<std::vector<double>> ranks;
  ranks.reserve(columns.size());
  for (const auto& col : columns) {
    ranks.push_back(average_ranks(col));
  }
  return CheckerboardFit(std::move(ranks));
}

void CheckerboardFit::check_point(std::span<const double> u) const
{
  if (u.size() != d_) {
    throw ValidationError("point dimension " + std::to_string(u.size()) +
                          " does not match copula dimension " + std::to_string(d_));
  }
  for (double x : u) {
    if (!(x >= 0.0 && x <= 1.0)) {
      throw ValidationError("point outside the unit cube");
    }
  }
}

double CheckerboardFit::cdf(std::span<const double> u) const
{
  check_point(u);
  const double n = static_cast<double>(n_);
  double total = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    double prod = 1.0;
    for (std::size_t j = 0; j < d_ && prod > 0.0; ++j) {
      const std::size_t at = i * d_ + j;
      const double frac = (n * u[j] - cell_lo_[at]) / cell_width_[at];
      prod *= std::clamp(frac, 0.0, 1.0);
    }
    total += prod;
  }
  return total / n;
}

double CheckerboardFit::empirical_cdf(std::span<const double> u) const
{
  check_point(u);
  const double n = static_cast<double>(n_);
  std::size_t count = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    bool inside = true;
    for (std::size_t j = 0; j < d_ && inside; ++j) {
      inside = ranks_[i * d_ + j] <= n * u[j];
    }
    count += inside ? 1 : 0;
  }
  return static_cast<double>(count) / n;
}

} // namespace ecbc
