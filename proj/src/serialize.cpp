#include "ecbc/serialize.hpp"

#include "ecbc/errors.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace ecbc {

using nlohmann::json;

namespace {

int parse_int(std::string_view text, std::string_view what)
{
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ValidationError("invalid integer '" + std::string(text) + "' in " + std::string(what));
  }
  return value;
}

double parse_double(std::string_view text)
{
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ValidationError("invalid number '" + std::string(text) + "' in curve file");
  }
  return value;
}

const char* policy_name(DegreePolicy p)
{
  switch (p) {
    case DegreePolicy::fixed:
      return "fixed";
    case DegreePolicy::plugin:
      return "plugin";
    case DegreePolicy::prior_sample:
      return "prior-sample";
  }
  return "plugin";
}

DegreePolicy policy_from_name(const std::string& name)
{
  if (name == "fixed") {
    return DegreePolicy::fixed;
  }
  if (name == "plugin") {
    return DegreePolicy::plugin;
  }
  if (name == "prior-sample") {
    return DegreePolicy::prior_sample;
  }
  throw ValidationError("unknown degree policy '" + name + "'");
}

json config_to_json(const DegreeConfig& c)
{
  return {{"policy", policy_name(c.policy)},
          {"degrees", {c.degrees.l1, c.degrees.l2, c.degrees.m}},
          {"draws", c.draws},
          {"seed", c.seed}};
}

DegreeConfig config_from_json(const json& j)
{
  DegreeConfig c;
  c.policy = policy_from_name(j.at("policy").get<std::string>());
  const auto d = j.at("degrees").get<std::vector<int>>();
  if (d.size() != 3) {
    throw ValidationError("degree triple must have 3 entries");
  }
  c.degrees = Degrees{d[0], d[1], d[2]};
  c.draws = j.at("draws").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

} // namespace

std::string format_number(double value)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

DegreeConfig parse_degree_spec(std::string_view spec, std::uint64_t seed)
{
  DegreeConfig c;
  c.seed = seed;
  if (spec == "plugin") {
    c.policy = DegreePolicy::plugin;
  } else if (spec.starts_with("prior:")) {
    c.policy = DegreePolicy::prior_sample;
    c.draws = parse_int(spec.substr(6), "degree spec");
  } else {
    std::vector<int> parts;
    std::size_t start = 0;
    while (start <= spec.size()) {
      const auto end = spec.find(',', start);
      const auto piece = spec.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
      parts.push_back(parse_int(piece, "degree spec"));
      if (end == std::string_view::npos) {
        break;
      }
      start = end + 1;
    }
    if (parts.size() != 3) {
      throw ValidationError("degree spec must be 'plugin', 'l1,l2,m' or 'prior:K'");
    }
    c.policy = DegreePolicy::fixed;
    c.degrees = Degrees{parts[0], parts[1], parts[2]};
  }
  c.validate();
  return c;
}

std::string degree_spec_string(const DegreeConfig& c)
{
  switch (c.policy) {
    case DegreePolicy::plugin:
      return "plugin";
    case DegreePolicy::prior_sample:
      return "prior:" + std::to_string(c.draws);
    case DegreePolicy::fixed:
      break;
  }
  return std::to_string(c.degrees.l1) + "," + std::to_string(c.degrees.l2) + "," + std::to_string(c.degrees.m);
}

json to_json(const EcbcCoefficients& coeffs)
{
  return {{"degrees", coeffs.degrees()}, {"theta", coeffs.theta()}};
}

EcbcCoefficients coefficients_from_json(const json& j)
{
  return EcbcCoefficients(j.at("degrees").get<std::vector<int>>(), j.at("theta").get<std::vector<double>>());
}

json to_json(const ConditionalCopulaEnsemble& model)
{
  json members = json::array();
  for (const auto& fit : model.members) {
    const auto& d = fit.degrees;
    json stage1 = json::array();
    for (const auto& stage : fit.stage1) {
      stage1.push_back({{"coefficients", to_json(stage.coeffs)}, {"response_sample", stage.response_cdf.sorted()}});
    }
    members.push_back({
      {"degrees", {{"g1", d.g1}, {"m1", d.m1}, {"g2", d.g2}, {"m2", d.m2}, {"l1", d.joint.l1}, {"l2", d.joint.l2}, {"m", d.joint.m}}},
      {"stage1", std::move(stage1)},
      {"adjusted", {{"u1", fit.adjusted.columns.at(0)}, {"u2", fit.adjusted.columns.at(1)}, {"v", fit.adjusted.columns.at(2)}}},
      {"stage2", to_json(fit.stage2)},
    });
  }
  return {
    {"format", "ecbc-conditional-copula"},
    {"version", kFitFormatVersion},
    {"config", config_to_json(model.config)},
    {"tie_groups", model.tie_groups},
    {"covariate_sample", model.covariate_cdf().sorted()},
    {"members", std::move(members)},
  };
}

ConditionalCopulaEnsemble ensemble_from_json(const json& j)
{
  if (j.value("format", std::string()) != "ecbc-conditional-copula") {
    throw ValidationError("not an ECBC conditional copula fit file");
  }
  if (j.at("version").get<int>() != kFitFormatVersion) {
    throw ValidationError("unsupported fit file version " + j.at("version").dump());
  }
  ConditionalCopulaEnsemble model;
  model.config = config_from_json(j.at("config"));
  model.tie_groups = j.at("tie_groups").get<std::size_t>();
  const EmpiricalCdf covariate(j.at("covariate_sample").get<std::vector<double>>());
  for (const auto& m : j.at("members")) {
    ConditionalCopulaFit fit;
    const auto& d = m.at("degrees");
    fit.degrees = DegreeDraw{d.at("g1").get<int>(), d.at("m1").get<int>(), d.at("g2").get<int>(), d.at("m2").get<int>(),
                             Degrees{d.at("l1").get<int>(), d.at("l2").get<int>(), d.at("m").get<int>()}};
    const auto& stage1 = m.at("stage1");
    if (stage1.size() != 2) {
      throw ValidationError("fit member must have two stage-1 fits");
    }
    for (std::size_t s = 0; s < 2; ++s) {
      fit.stage1[s] = MarginalStage{coefficients_from_json(stage1[s].at("coefficients")),
                                    EmpiricalCdf(stage1[s].at("response_sample").get<std::vector<double>>())};
    }
    const auto& adj = m.at("adjusted");
    fit.adjusted.columns = {adj.at("u1").get<std::vector<double>>(), adj.at("u2").get<std::vector<double>>(),
                            adj.at("v").get<std::vector<double>>()};
    fit.adjusted.roles = {ColumnRole::response1, ColumnRole::response2, ColumnRole::covariate};
    fit.stage2 = coefficients_from_json(m.at("stage2"));
    if (fit.stage2.dim() != 3) {
      throw ValidationError("stage-2 coefficients must be trivariate");
    }
    fit.covariate_cdf = covariate;
    model.members.push_back(std::move(fit));
  }
  if (model.members.empty()) {
    throw ValidationError("fit file has no members");
  }
  return model;
}

void save_model(const ConditionalCopulaEnsemble& model, const std::filesystem::path& path)
{
  std::ofstream out(path);
  if (!out) {
    throw ValidationError("cannot write fit file " + path.string());
  }
  out << to_json(model).dump() << '\n';
}

ConditionalCopulaEnsemble load_model(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open fit file " + path.string());
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("malformed fit file " + path.string() + ": " + e.what());
  }
  try {
    return ensemble_from_json(j);
  } catch (const json::exception& e) {
    throw ValidationError("malformed fit file " + path.string() + ": " + e.what());
  }
}

SimModel scenario_from_json(const json& j)
{
  try {
    SimModel m;
    const auto model = j.at("model").get<std::string>();
    if (model == "A") {
      m.link = LinkModel::model_a;
    } else if (model == "B") {
      m.link = LinkModel::model_b;
      m.model_b_center = j.value("center", 4.0);
    } else {
      throw ValidationError("scenario model must be \"A\" or \"B\"");
    }
    const auto range = j.at("range").get<std::vector<double>>();
    if (range.size() != 2) {
      throw ValidationError("scenario range must be [lo, hi]");
    }
    m.x_lo = range[0];
    m.x_hi = range[1];
    m.n = j.at("n").get<std::size_t>();
    m.replicates = j.at("N").get<std::size_t>();
    m.seed = j.value("seed", std::uint64_t{1});
    m.degrees = parse_degree_spec(j.value("degrees", std::string("plugin")), m.seed);
    if (j.contains("grid")) {
      m.v_grid = j.at("grid").get<std::vector<double>>();
    }
    m.validate();
    return m;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed scenario: ") + e.what());
  }
}

json to_json(const SimModel& m)
{
  json j = {{"model", m.link == LinkModel::model_a ? "A" : "B"},
            {"label", m.label()},
            {"range", {m.x_lo, m.x_hi}},
            {"n", m.n},
            {"N", m.replicates},
            {"seed", m.seed},
            {"degrees", degree_spec_string(m.degrees)},
            {"grid", m.v_grid.empty() ? default_v_grid() : m.v_grid}};
  if (m.link == LinkModel::model_b) {
    j["center"] = m.model_b_center;
  }
  return j;
}

json to_json(const BenchResult& r)
{
  return {{"ibias2", r.ibias2}, {"ivar", r.ivar}, {"imse", r.imse}, {"v", r.v_grid},
          {"truth", r.truth},   {"mean", r.mean},  {"p05", r.p05},   {"p95", r.p95}};
}

void write_curve_csv(std::ostream& out, const DependenceCurve& curve)
{
  out << "x,v,tau,rho\n";
  for (const auto& p : curve) {
    out << format_number(p.x) << ',' << format_number(p.v) << ',' << format_number(p.tau) << ','
        << format_number(p.rho) << '\n';
  }
}

DependenceCurve read_curve_csv(std::istream& in)
{
  std::string line;
  if (!std::getline(in, line) || line.rfind("x,v,tau,rho", 0) != 0) {
    throw ValidationError("curve CSV must start with header x,v,tau,rho");
  }
  DependenceCurve curve;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    std::vector<double> fields;
    std::size_t start = 0;
    for (int k = 0; k < 4; ++k) {
      const auto end = line.find(',', start);
      fields.push_back(parse_double(std::string_view(line).substr(start, end == std::string::npos ? std::string::npos : end - start)));
      if (end == std::string::npos) {
        break;
      }
      start = end + 1;
    }
    if (fields.size() < 4) {
      throw ValidationError("curve CSV row has fewer than 4 fields");
    }
    curve.push_back({fields[0], fields[1], fields[2], fields[3]});
  }
  return curve;
}

} // namespace ecbc
