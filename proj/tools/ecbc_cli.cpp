// ecbc: fit, evaluate and benchmark conditional copula estimates.

#include "ecbc/conditional.hpp"
#include "ecbc/data.hpp"
#include "ecbc/depmeasures.hpp"
#include "ecbc/errors.hpp"
#include "ecbc/serialize.hpp"
#include "ecbc/simbench.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>

using namespace ecbc;
using nlohmann::json;

namespace {

std::vector<std::string> split(const std::string& text, char sep)
{
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto end = text.find(sep, start);
    out.push_back(text.substr(start, end == std::string::npos ? std::string::npos : end - start));
    if (end == std::string::npos) {
      return out;
    }
    start = end + 1;
  }
}

double to_double(const std::string& s)
{
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) {
    throw ValidationError("invalid number '" + s + "'");
  }
  return value;
}

// "a,b,c" or "lo:hi:count".
std::vector<double> parse_grid(const std::string& spec)
{
  std::vector<double> grid;
  if (spec.find(':') != std::string::npos) {
    const auto parts = split(spec, ':');
    if (parts.size() != 3) {
      throw ValidationError("grid range must be lo:hi:count");
    }
    const double lo = to_double(parts[0]);
    const double hi = to_double(parts[1]);
    const double count = to_double(parts[2]);
    if (count < 1 || count != std::floor(count)) {
      throw ValidationError("grid count must be a positive integer");
    }
    const int k = static_cast<int>(count);
    for (int i = 0; i < k; ++i) {
      grid.push_back(k == 1 ? lo : lo + (hi - lo) * i / (k - 1));
    }
  } else {
    for (const auto& p : split(spec, ',')) {
      grid.push_back(to_double(p));
    }
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw ValidationError("grid must be strictly increasing");
    }
  }
  return grid;
}

void check_unit(double value, const char* name)
{
  if (!(value >= 0.0 && value <= 1.0)) {
    throw ValidationError(std::string(name) + " must lie in [0,1]");
  }
}

class Output
{
public:
  explicit Output(const std::string& path)
  {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) {
        throw ValidationError("cannot write " + path);
      }
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
  std::ofstream file_;
};

struct FitArgs
{
  std::string input;
  std::string cols = "y1,y2,x";
  std::vector<std::string> log10;
  std::string degrees = "plugin";
  std::uint64_t seed = 0;
  std::string delimiter = ",";
  std::string out;
};

int cmd_fit(const FitArgs& a)
{
  const auto names = split(a.cols, ',');
  if (names.size() != 3) {
    throw ValidationError("--cols needs three names: y1,y2,x");
  }
  if (a.delimiter.size() != 1 && a.delimiter != "\\t") {
    throw ValidationError("--delimiter must be a single character");
  }
  LoadOptions opts;
  opts.columns = {names[0], names[1], names[2]};
  opts.log10_columns = a.log10;
  opts.delimiter = a.delimiter == "\\t" ? '\t' : a.delimiter[0];
  const auto loaded = load_dataset(a.input, opts);
  const auto model = fit_conditional_copula(loaded.data, parse_degree_spec(a.degrees, a.seed));

  if (a.out.empty()) {
    std::cout << to_json(model).dump() << '\n';
  } else {
    save_model(model, a.out);
  }
  std::ostream& info = a.out.empty() ? std::cerr : std::cout;
  info << "n = " << model.sample_size() << " (" << loaded.dropped_rows << " rows dropped)\n";
  const auto& d = model.members.front().degrees.joint;
  if (model.members.size() == 1) {
    info << "degrees l1 = " << d.l1 << ", l2 = " << d.l2 << ", m = " << d.m << '\n';
  } else {
    info << "degrees: " << model.members.size() << " prior draws (seed " << a.seed << ")\n";
  }
  if (model.tie_groups > 0) {
    std::cerr << "warning: " << model.tie_groups
              << " groups of tied values; checkerboard cells are spread over each tie group\n";
  }
  return 0;
}

struct EvalArgs
{
  std::string fit;
  std::optional<double> u1, u2, x, v;
  bool raw = false;
  int grid = 0;
  double tol = kInversionTol;
  std::string format = "csv";
  std::string out;
};

double resolve_v(const ConditionalCopulaEnsemble& model, const std::optional<double>& x, const std::optional<double>& v)
{
  if (x.has_value() == v.has_value()) {
    throw ValidationError("give exactly one of --x and --v");
  }
  if (v) {
    check_unit(*v, "--v");
    return *v;
  }
  return model.covariate_cdf()(*x);
}

int cmd_eval(const EvalArgs& a)
{
  if (!(a.tol > 0.0)) {
    throw ValidationError("--tol must be positive");
  }
  const auto model = load_model(a.fit);
  const double v = resolve_v(model, a.x, a.v);
  auto value = [&](double u1, double u2) {
    return a.raw ? cond_copula_derivative(model, u1, u2, v) : conditional_copula_cdf(model, u1, u2, v, a.tol);
  };
  Output out(a.out);
  auto& os = out.stream();

  if (a.grid > 0) {
    if (a.grid < 2) {
      throw ValidationError("--grid needs at least 2 points per axis");
    }
    std::vector<double> g(a.grid);
    for (int i = 0; i < a.grid; ++i) {
      g[i] = static_cast<double>(i) / (a.grid - 1);
    }
    std::vector<std::vector<double>> c(g.size(), std::vector<double>(g.size()));
    if (model.members.size() == 1 && !a.raw) {
      c = conditional_copula_grid(model.members.front(), g, g, v, a.tol);
    } else {
      for (std::size_t i = 0; i < g.size(); ++i) {
        for (std::size_t j = 0; j < g.size(); ++j) {
          c[i][j] = value(g[i], g[j]);
        }
      }
    }
    if (a.format == "json") {
      os << json{{"v", v}, {"u", g}, {"value", c}}.dump() << '\n';
    } else {
      os << "u1,u2,value\n";
      for (std::size_t i = 0; i < g.size(); ++i) {
        for (std::size_t j = 0; j < g.size(); ++j) {
          os << format_number(g[i]) << ',' << format_number(g[j]) << ',' << format_number(c[i][j]) << '\n';
        }
      }
    }
    return 0;
  }

  if (!a.u1 || !a.u2) {
    throw ValidationError("eval needs --u1 and --u2, or --grid");
  }
  check_unit(*a.u1, "--u1");
  check_unit(*a.u2, "--u2");
  const double c = value(*a.u1, *a.u2);
  if (a.format == "json") {
    os << json{{"u1", *a.u1}, {"u2", *a.u2}, {"v", v}, {"value", c}}.dump() << '\n';
  } else {
    os << format_number(c) << '\n';
  }
  return 0;
}

struct CurveArgs
{
  std::vector<std::string> fits;
  std::string grid;
  bool grid_is_v = false;
  std::string format = "csv";
  std::string out;
};

double type7(std::vector<double> values, double p)
{
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

int cmd_curve(const CurveArgs& a)
{
  const auto grid = parse_grid(a.grid);
  if (grid.empty()) {
    throw ValidationError("--grid is empty");
  }
  std::vector<DependenceCurve> curves;
  for (const auto& path : a.fits) {
    const auto model = load_model(path);
    curves.push_back(a.grid_is_v ? dependence_curve(model, grid) : dependence_curve_at_x(model, grid));
  }
  Output out(a.out);
  auto& os = out.stream();

  if (curves.size() == 1) {
    if (a.format == "json") {
      json rows = json::array();
      for (const auto& p : curves[0]) {
        rows.push_back({{"x", p.x}, {"v", p.v}, {"tau", p.tau}, {"rho", p.rho}});
      }
      os << rows.dump() << '\n';
    } else {
      write_curve_csv(os, curves[0]);
    }
    return 0;
  }

  // several fits: mean curve plus 5%/95% bands across fits
  json rows = json::array();
  if (a.format != "json") {
    os << "x,v,tau,rho,tau_p05,tau_p95,rho_p05,rho_p95\n";
  }
  for (std::size_t k = 0; k < grid.size(); ++k) {
    std::vector<double> v, tau, rho;
    for (const auto& c : curves) {
      v.push_back(c[k].v);
      tau.push_back(c[k].tau);
      rho.push_back(c[k].rho);
    }
    auto mean = [](const std::vector<double>& xs) {
      double s = 0.0;
      for (double x : xs) {
        s += x;
      }
      return s / static_cast<double>(xs.size());
    };
    const double x = a.grid_is_v ? curves[0][k].x : grid[k];
    const double row[] = {x, mean(v), mean(tau), mean(rho), type7(tau, 0.05), type7(tau, 0.95), type7(rho, 0.05),
                          type7(rho, 0.95)};
    if (a.format == "json") {
      rows.push_back({{"x", row[0]}, {"v", row[1]}, {"tau", row[2]}, {"rho", row[3]}, {"tau_p05", row[4]},
                      {"tau_p95", row[5]}, {"rho_p05", row[6]}, {"rho_p95", row[7]}});
    } else {
      for (int i = 0; i < 8; ++i) {
        os << (i ? "," : "") << format_number(row[i]);
      }
      os << '\n';
    }
  }
  if (a.format == "json") {
    os << rows.dump() << '\n';
  }
  return 0;
}

struct SimulateArgs
{
  std::string scenario;
  std::string out;
  unsigned workers = 0;
};

int cmd_simulate(const SimulateArgs& a)
{
  std::ifstream in(a.scenario);
  if (!in) {
    throw ValidationError("cannot open scenario " + a.scenario);
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("malformed scenario " + a.scenario + ": " + e.what());
  }
  const auto model = scenario_from_json(j);
  const auto reps = simulate_replicates(model, a.workers);
  const auto truth = true_tau_curve(model, reps.v_grid);
  const auto result = performance_metrics(reps, truth, model.x_hi - model.x_lo);

  json failures = json::array();
  for (const auto& [r, what] : reps.failures) {
    failures.push_back({{"replicate", r}, {"error", what}});
  }
  const json summary = {{"scenario", to_json(model)},
                        {"replicates_ok", reps.tau.size()},
                        {"failures", failures},
                        {"result", to_json(result)}};

  std::ofstream js(a.out + ".json");
  std::ofstream csv(a.out + ".csv");
  if (!js || !csv) {
    throw ValidationError("cannot write outputs with prefix " + a.out);
  }
  js << summary.dump(2) << '\n';
  csv << "v,x,truth,mean,p05,p95\n";
  for (std::size_t k = 0; k < result.v_grid.size(); ++k) {
    const double x = model.x_lo + result.v_grid[k] * (model.x_hi - model.x_lo);
    csv << format_number(result.v_grid[k]) << ',' << format_number(x) << ',' << format_number(result.truth[k]) << ','
        << format_number(result.mean[k]) << ',' << format_number(result.p05[k]) << ','
        << format_number(result.p95[k]) << '\n';
  }
  std::cout << model.label() << ", n = " << model.n << ", N = " << model.replicates << '\n'
            << "IBIAS2 " << format_number(result.ibias2) << "  IVAR " << format_number(result.ivar) << "  IMSE "
            << format_number(result.imse) << '\n';
  if (!reps.failures.empty()) {
    std::cerr << "warning: " << reps.failures.size() << " replicates failed\n";
  }
  return 0;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Conditional copula estimation with empirical checkerboard Bernstein copulas"};
  app.require_subcommand(1);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a conditional copula to a delimited data file");
  fit_cmd->add_option("--input", fit.input, "Data file with a header row")->required();
  fit_cmd->add_option("--cols", fit.cols, "Column names y1,y2,x");
  fit_cmd->add_option("--log10", fit.log10, "Apply log10 to this column (repeatable)");
  fit_cmd->add_option("--degrees", fit.degrees, "plugin | l1,l2,m | prior:K");
  fit_cmd->add_option("--seed", fit.seed, "Seed for prior-sample degrees");
  fit_cmd->add_option("--delimiter", fit.delimiter, "Field delimiter (\\t for tab)");
  fit_cmd->add_option("--out", fit.out, "Fit file to write (stdout if omitted)");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate the conditional copula");
  eval_cmd->add_option("--fit", eval.fit, "Fit file")->required();
  eval_cmd->add_option("--u1", eval.u1);
  eval_cmd->add_option("--u2", eval.u2);
  eval_cmd->add_option("--x", eval.x, "Raw covariate value");
  eval_cmd->add_option("--v", eval.v, "Covariate on the uniform scale");
  eval_cmd->add_flag("--raw", eval.raw, "Unnormalized C^{#(1)} instead of the normalized copula");
  eval_cmd->add_option("--grid", eval.grid, "Evaluate on a k x k equally spaced grid over [0,1]^2");
  eval_cmd->add_option("--tol", eval.tol, "Margin inversion tolerance");
  eval_cmd->add_option("--format", eval.format)->check(CLI::IsMember({"csv", "json"}));
  eval_cmd->add_option("--out", eval.out);

  CurveArgs curve;
  auto* curve_cmd = app.add_subcommand("curve", "Kendall's tau and Spearman's rho along the covariate");
  curve_cmd->add_option("--fit", curve.fits, "Fit file (repeat for replicate bands)")->required();
  curve_cmd->add_option("--grid", curve.grid, "x values a,b,c or lo:hi:count")->required();
  curve_cmd->add_flag("--v", curve.grid_is_v, "Grid is on the uniform scale");
  curve_cmd->add_option("--format", curve.format)->check(CLI::IsMember({"csv", "json"}));
  curve_cmd->add_option("--out", curve.out);

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo study from a scenario file");
  sim_cmd->add_option("--scenario", sim.scenario, "Scenario JSON")->required();
  sim_cmd->add_option("--out", sim.out, "Output prefix for .json and .csv")->required();
  sim_cmd->add_option("--workers", sim.workers, "Threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*fit_cmd) {
      return cmd_fit(fit);
    }
    if (*eval_cmd) {
      return cmd_eval(eval);
    }
    if (*curve_cmd) {
      return cmd_curve(curve);
    }
    return cmd_simulate(sim);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
}
