#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ecbc {

//! Empirical checkerboard copula of an n x d rank matrix (d = 2 or 3).
//!
//! Observation i spreads mass 1/n uniformly over the cell
//! prod_j [(R_ij - 1)/n, R_ij/n]. A group of t tied observations with
//! average rank r shares the wider interval [(r - (t+1)/2)/n, (r + (t-1)/2)/n]
//! in that coordinate, so margins stay exactly uniform on the grid.
class CheckerboardFit
{
public:
  // rank_columns[j][i] is the (average) rank of observation i in column j.
  explicit CheckerboardFit(std::vector<std::vector<double>> rank_columns);

  // Ranks each column of a sample (values or pseudo-observations).
  static CheckerboardFit from_sample(const std::vector<std::vector<double>>& columns);

  std::size_t size() const { return n_; }
  std::size_t dim() const { return d_; }
  double rank(std::size_t i, std::size_t j) const { return ranks_[i * d_ + j]; }

  // C_n^#(u), exact in O(n d).
  double cdf(std::span<const double> u) const;

  // Classical empirical copula (1/n) sum_i 1{R_ij / n <= u_j for all j}.
  double empirical_cdf(std::span<const double> u) const;

private:
  void check_point(std::span<const double> u) const;

  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::vector<double> ranks_;      // row-major n x d
  std::vector<double> cell_lo_;    // lower cell edge in rank units
  std::vector<double> cell_width_; // tie-group size
};

inline double checkerboard_cdf(const CheckerboardFit& fit, std::span<const double> u)
{
  return fit.cdf(u);
}

inline double empirical_copula_cdf(const CheckerboardFit& fit, std::span<const double> u)
{
  return fit.empirical_cdf(u);
}

} // namespace ecbc
