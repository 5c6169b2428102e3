#pragma once

#include "ecbc/conditional.hpp"
#include "ecbc/depmeasures.hpp"
#include "ecbc/simbench.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

namespace ecbc {

inline constexpr int kFitFormatVersion = 1;

// 12 significant digits, '.' decimal point.
std::string format_number(double value);

// "plugin", "l1,l2,m" (fixed) or "prior:K".
DegreeConfig parse_degree_spec(std::string_view spec, std::uint64_t seed);
std::string degree_spec_string(const DegreeConfig& config);

nlohmann::json to_json(const EcbcCoefficients& coeffs);
EcbcCoefficients coefficients_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ConditionalCopulaEnsemble& model);
ConditionalCopulaEnsemble ensemble_from_json(const nlohmann::json& j);

void save_model(const ConditionalCopulaEnsemble& model, const std::filesystem::path& path);
ConditionalCopulaEnsemble load_model(const std::filesystem::path& path);

// Scenario keys: model ("A" | "B"), center (model B only), range [lo, hi], n,
// N, seed, degrees (degree spec string), grid (optional v values).
SimModel scenario_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SimModel& model);
nlohmann::json to_json(const BenchResult& result);

// CSV with header x,v,tau,rho.
void write_curve_csv(std::ostream& out, const DependenceCurve& curve);
DependenceCurve read_curve_csv(std::istream& in);

} // namespace ecbc
