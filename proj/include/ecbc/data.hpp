#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace ecbc {

//! Raw observations of two responses and one covariate, all of length n.
struct Dataset
{
  std::vector<double> y1;
  std::vector<double> y2;
  std::vector<double> x;

  std::size_t size() const { return x.size(); }

  // Throws ValidationError unless n >= 2, lengths agree and all entries are
  // finite.
  void validate() const;
};

enum class ColumnRole
{
  response1,
  response2,
  covariate
};

//! Rank-based pseudo-observations, one column per variable, values in (0,1).
struct PseudoSample
{
  std::vector<std::vector<double>> columns;
  std::vector<ColumnRole> roles;

  std::size_t size() const { return columns.empty() ? 0 : columns.front().size(); }
  std::size_t dim() const { return columns.size(); }
};

// Average ranks (1-based). Tied values share the mean of the ranks they
// occupy. Throws on non-finite input, naming the offending index.
std::vector<double> average_ranks(std::span<const double> values);

// rank_i / (n + 1) with average ranks for ties. Requires n >= 2.
std::vector<double> pseudo_observations(std::span<const double> values);

// Number of groups of two or more equal values.
std::size_t count_tie_groups(std::span<const double> values);

//! Right-continuous step CDF with the modified denominator n + 1.
class EmpiricalCdf
{
public:
  EmpiricalCdf() = default;
  explicit EmpiricalCdf(std::vector<double> sample);

  // #{i : sample_i <= q} / (n + 1)
  double operator()(double q) const;

  // Smallest sample value whose CDF reaches p; clamps to the sample range.
  double quantile(double p) const;

  std::size_t size() const { return sorted_.size(); }
  const std::vector<double>& sorted() const { return sorted_; }

private:
  std::vector<double> sorted_;
};

double empirical_cdf_at(std::span<const double> values, double q);

struct ColumnMapping
{
  std::string y1;
  std::string y2;
  std::string x;
};

struct LoadOptions
{
  ColumnMapping columns;
  std::vector<std::string> log10_columns;
  char delimiter = ',';
};

struct LoadedDataset
{
  Dataset data;
  std::size_t dropped_rows = 0;
};

// Reads a delimited text file with a header row. Rows with a missing,
// non-numeric or non-finite mapped field (after transforms) are dropped and
// counted.
LoadedDataset load_dataset(const std::filesystem::path& path, const LoadOptions& options);

} // namespace ecbc
