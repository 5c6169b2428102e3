#include "ecbc/data.hpp"

#include "ecbc/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>

namespace ecbc {

namespace {

void require_finite(std::span<const double> values)
{
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw ValidationError("non-finite value at index " + std::to_string(i));
    }
  }
}

std::string trim(std::string_view s)
{
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r\n");
  s = s.substr(first, last - first + 1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    s = s.substr(1, s.size() - 2);
  }
  return std::string(s);
}

std::vector<std::string> split_line(const std::string& line, char delimiter)
{
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
      current.push_back(c);
    } else if (c == delimiter && !quoted) {
      fields.push_back(trim(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(trim(current));
  return fields;
}

std::optional<double> parse_number(const std::string& field)
{
  if (field.empty()) {
    return std::nullopt;
  }
  double value = 0.0;
  const char* begin = field.data();
  const char* end = field.data() + field.size();
  if (*begin == '+') {
    ++begin;
  }
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

} // namespace

void Dataset::validate() const
{
  if (y1.size() != x.size() || y2.size() != x.size()) {
    throw ValidationError("dataset columns have different lengths");
  }
  if (x.size() < 2) {
    throw ValidationError("dataset needs at least 2 rows, got " + std::to_string(x.size()));
  }
  require_finite(y1);
  require_finite(y2);
  require_finite(x);
}

std::vector<double> average_ranks(std::span<const double> values)
{
  require_finite(values);
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) {
      ++j;
    }
    // positions i..j-1 hold ranks i+1..j
    const double rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      ranks[order[k]] = rank;
    }
    i = j;
  }
  return ranks;
}

std::vector<double> pseudo_observations(std::span<const double> values)
{
  if (values.size() < 2) {
    throw ValidationError("pseudo-observations need n >= 2, got " +
                          std::to_string(values.size()));
  }
  auto ranks = average_ranks(values);
  const double denom = static_cast<double>(values.size()) + 1.0;
  for (auto& r : ranks) {
    r /= denom;
  }
  return ranks;
}

std::size_t count_tie_groups(std::span<const double> values)
{
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::size_t groups = 0;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i] == sorted[i - 1] && (i == 1 || sorted[i - 1] != sorted[i - 2])) {
      ++groups;
    }
  }
  return groups;
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> sample)
  : sorted_(std::move(sample))
{
  if (sorted_.empty()) {
    throw ValidationError("empirical CDF needs a nonempty sample");
  }
  require_finite(sorted_);
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double q) const
{
  if (std::isnan(q)) {
    throw ValidationError("empirical CDF evaluated at NaN");
  }
  const auto count = std::upper_bound(sorted_.begin(), sorted_.end(), q) - sorted_.begin();
  return static_cast<double>(count) / (static_cast<double>(sorted_.size()) + 1.0);
}

double EmpiricalCdf::quantile(double p) const
{
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ValidationError("quantile level outside [0,1]");
  }
  const double n1 = static_cast<double>(sorted_.size()) + 1.0;
  // count needed so that count / (n+1) >= p
  auto count = static_cast<std::ptrdiff_t>(std::ceil(p * n1 - 1e-12));
  count = std::clamp<std::ptrdiff_t>(count, 1, static_cast<std::ptrdiff_t>(sorted_.size()));
  return sorted_[static_cast<std::size_t>(count - 1)];
}

double empirical_cdf_at(std::span<const double> values, double q)
{
  if (!std::isfinite(q)) {
    throw ValidationError("empirical CDF evaluated at a non-finite point");
  }
  require_finite(values);
  const auto count = std::count_if(values.begin(), values.end(), [q](double v) { return v <= q; });
  return static_cast<double>(count) / (static_cast<double>(values.size()) + 1.0);
}

LoadedDataset load_dataset(const std::filesystem::path& path, const LoadOptions& options)
{
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open input file " + path.string());
  }

  std::string line;
  if (!std::getline(in, line) || trim(line).empty()) {
    throw ValidationError("input file " + path.string() + " is empty");
  }
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
    line.erase(0, 3);
  }
  const auto header = split_line(line, options.delimiter);

  auto column_index = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw ValidationError("missing column '" + name + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t i_y1 = column_index(options.columns.y1);
  const std::size_t i_y2 = column_index(options.columns.y2);
  const std::size_t i_x = column_index(options.columns.x);

  std::vector<bool> take_log(header.size(), false);
  for (const auto& name : options.log10_columns) {
    take_log[column_index(name)] = true;
  }

  LoadedDataset result;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) {
      continue;
    }
    ++rows;
    const auto fields = split_line(line, options.delimiter);
    auto field = [&](std::size_t idx) -> std::optional<double> {
      if (idx >= fields.size()) {
        return std::nullopt;
      }
      auto value = parse_number(fields[idx]);
      if (value && take_log[idx]) {
        const double logged = std::log10(*value);
        if (!std::isfinite(logged)) {
          return std::nullopt;
        }
        return logged;
      }
      return value;
    };
    const auto y1 = field(i_y1);
    const auto y2 = field(i_y2);
    const auto x = field(i_x);
    if (!y1 || !y2 || !x) {
      ++result.dropped_rows;
      continue;
    }
    result.data.y1.push_back(*y1);
    result.data.y2.push_back(*y2);
    result.data.x.push_back(*x);
  }
  if (rows == 0) {
    throw ValidationError("input file " + path.string() + " has no data rows");
  }
  return result;
}

} // namespace ecbc
